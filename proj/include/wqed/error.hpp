#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace wqed {

enum class ErrorCode {
    InvalidArgument,
    LocalizedPole,
    OffResonant,
    Undefined,
    GridMismatch,
    NonConvergence,
};

constexpr std::string_view to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::InvalidArgument: return "invalid-argument";
        case ErrorCode::LocalizedPole: return "localized-pole";
        case ErrorCode::OffResonant: return "off-resonant";
        case ErrorCode::Undefined: return "undefined";
        case ErrorCode::GridMismatch: return "grid-mismatch";
        case ErrorCode::NonConvergence: return "non-convergence";
    }
    return "unknown";
}

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

}  // namespace wqed

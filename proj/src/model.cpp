#include "wqed/model.hpp"

#include <cmath>
#include <cstdio>

#include "wqed/error.hpp"

namespace wqed {

SystemParams SystemParams::from_ratios(double gamma_over_omega, double Gamma_over_gamma,
                                       double d_over_lambda, double omega, double v_g) {
    SystemParams p;
    p.omega = omega;
    p.v_g = v_g;
    p.gamma_wg = gamma_over_omega * omega;
    p.gamma_res = Gamma_over_gamma * p.gamma_wg;
    p.d = d_over_lambda * p.wavelength();
    p.validate();
    return p;
}

void SystemParams::validate() const {
    auto require = [](bool ok, const char* what) {
        if (!ok) throw Error(ErrorCode::InvalidArgument, what);
    };
    require(std::isfinite(omega) && omega > 0.0, "omega must be positive");
    require(std::isfinite(gamma_wg) && gamma_wg > 0.0, "gamma_wg must be positive");
    require(std::isfinite(gamma_res) && gamma_res >= 0.0, "gamma_res must be non-negative");
    require(std::isfinite(d) && d > 0.0, "d must be positive");
    require(std::isfinite(v_g) && v_g > 0.0, "v_g must be positive");
}

std::string SystemParams::describe() const {
    char buf[256];
    std::snprintf(buf, sizeof buf,
                  "omega=%.17g gamma=%.17g Gamma=%.17g d=%.17g v_g=%.17g", omega,
                  gamma_wg, gamma_res, d, v_g);
    return buf;
}

double wavelength(const SystemParams& p) { return p.wavelength(); }

std::optional<int> resonance_order(const SystemParams& p, double tol) {
    if (tol < 0.0) throw Error(ErrorCode::InvalidArgument, "tol must be non-negative");
    const double lambda = p.wavelength();
    const double n = std::round(2.0 * p.d / lambda);
    if (n < 1.0) return std::nullopt;
    if (std::abs(p.d - n * lambda / 2.0) > tol * lambda) return std::nullopt;
    return static_cast<int>(n);
}

Subspace resonant_subspace(int n) {
    if (n < 1) throw Error(ErrorCode::InvalidArgument, "resonance order must be >= 1");
    return n % 2 == 0 ? Subspace::Odd : Subspace::Even;
}

std::optional<Subspace> localized_subspace(const SystemParams& p, double tol) {
    if (auto n = resonance_order(p, tol)) return resonant_subspace(*n);
    return std::nullopt;
}

double purcell_factor(const SystemParams& p) {
    if (p.gamma_res <= 0.0)
        throw Error(ErrorCode::Undefined, "Purcell factor undefined without reservoir loss");
    return (2.0 * p.gamma_wg + p.gamma_res) / p.gamma_res;
}

double beta_factor(const SystemParams& p) {
    return 2.0 * p.gamma_wg / (2.0 * p.gamma_wg + p.gamma_res);
}

}  // namespace wqed

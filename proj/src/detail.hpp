#pragma once

#include <cmath>
#include <complex>

namespace wqed::detail {

using cplx = std::complex<double>;

inline constexpr cplx I{0.0, 1.0};

/// 1 + eta*exp(i*phi), written through the half angle so that its zeros are
/// reproduced without cancellation.
inline cplx collective_factor(int eta, double phi) {
    const double h = 0.5 * phi;
    const cplx half = std::polar(2.0, h);
    return eta > 0 ? half * std::cos(h) : half * cplx(0.0, -std::sin(h));
}

}  // namespace wqed::detail

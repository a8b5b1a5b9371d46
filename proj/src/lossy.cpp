#include <cmath>

#include "detail.hpp"
#include "wqed/eigenstates.hpp"
#include "wqed/error.hpp"

namespace wqed {

using detail::I;

EigenCoeffs scattering_coeffs_lossy(const SystemParams& p, Subspace s, double eps) {
    if (p.lossless()) return scattering_coeffs(p, s, eps);

    // Omega -> Omega - i*Gamma/2 in the lossless expressions.
    const int h = eta(s);
    const double tau = p.delay();
    const cplx u = cplx(eps - p.omega, 0.5 * p.gamma_res);
    const cplx X = detail::collective_factor(h, eps * tau);
    const cplx D = u + I * p.gamma_wg * X;
    const cplx s_bar = std::polar(1.0, -0.5 * eps * tau);

    EigenCoeffs c;
    c.energy = eps;
    c.subspace = s;
    c.branch = Branch::Scattering;
    c.A = 1.0;
    c.a = 0.0;
    c.alpha = p.coupling_wg() * s_bar * X / D;
    c.t0 = u / D;
    c.t1 = (u - I * p.gamma_wg * std::conj(X)) / D;
    c.b = -I * (p.coupling_res() / p.v()) * c.alpha;
    return c;
}

EigenCoeffs quasi_localized_coeffs(const SystemParams& p, Subspace s, double eps) {
    if (p.lossless())
        throw Error(ErrorCode::InvalidArgument,
                    "quasi-localized branch requires reservoir loss");
    const int h = eta(s);
    const double tau = p.delay();
    const cplx X = detail::collective_factor(h, eps * tau);
    const cplx D = cplx(eps - p.omega, 0.5 * p.gamma_res) + I * p.gamma_wg * X;
    const cplx sh = std::polar(1.0, 0.5 * eps * tau);
    const double V = p.coupling_wg();
    const double K = p.coupling_res();

    EigenCoeffs c;
    c.energy = eps;
    c.subspace = s;
    c.branch = Branch::QuasiLocalized;
    c.A = 0.0;
    c.a = 1.0;
    c.alpha = K / D;
    c.t0 = -I * (V / p.v_g) * c.alpha * sh;
    c.t1 = c.t0 - I * double(h) * (V / p.v_g) * c.alpha * std::conj(sh);
    c.b = 1.0 - I * (K / p.v()) * c.alpha;
    return c;
}

FluxBalance branch_flux_check(const EigenCoeffs& c, const SystemParams& p) {
    FluxBalance f;
    f.in = p.v_g * std::norm(c.A) + p.v() * std::norm(c.a);
    f.out = p.v_g * std::norm(c.t1) + p.v() * std::norm(c.b);
    return f;
}

}  // namespace wqed

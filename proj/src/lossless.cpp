#include <cmath>
#include <numbers>

#include "detail.hpp"
#include "wqed/eigenstates.hpp"
#include "wqed/error.hpp"

namespace wqed {

using detail::I;

namespace {

// |D| below this (relative to the energy scale) is treated as the bound-state
// pole.
constexpr double kPoleTolerance = 1e-12;

bool at_localized_pole(const SystemParams& p, Subspace s, cplx denom) {
    const auto sector = localized_subspace(p);
    if (!sector || *sector != s) return false;
    return std::abs(denom) <= kPoleTolerance * (p.omega + p.gamma_wg);
}

}  // namespace

EigenCoeffs scattering_coeffs(const SystemParams& p, Subspace s, double eps) {
    const int h = eta(s);
    const double tau = p.delay();
    const double u = eps - p.omega;
    const cplx X = detail::collective_factor(h, eps * tau);
    const cplx D = u + I * p.gamma_wg * X;
    if (at_localized_pole(p, s, D))
        throw Error(ErrorCode::LocalizedPole,
                    "scattering coefficients evaluated on the bound-state pole");

    const cplx s_bar = std::polar(1.0, -0.5 * eps * tau);
    EigenCoeffs c;
    c.energy = eps;
    c.subspace = s;
    c.branch = Branch::Scattering;
    c.A = 1.0;
    c.alpha = p.coupling_wg() * s_bar * X / D;
    c.t0 = u / D;
    c.t1 = (u - I * p.gamma_wg * std::conj(X)) / D;
    return c;
}

std::optional<LocalizedState> localized_state(const SystemParams& p) {
    const auto sector = localized_subspace(p);
    if (!sector) return std::nullopt;
    LocalizedState st;
    st.subspace = *sector;
    st.energy = p.omega;
    st.alpha = 1.0 / std::sqrt(1.0 + p.gamma_wg * p.delay());
    // The jump condition at x = -d/2 fixes the cavity amplitude; it carries
    // no parity sign.
    st.t0 = -I * (p.coupling_wg() * st.alpha / p.v_g) *
            std::polar(1.0, std::numbers::pi * p.d_over_lambda());
    return st;
}

double localized_fraction(const SystemParams& p) {
    if (!resonance_order(p))
        throw Error(ErrorCode::OffResonant, "no bound state at an off-resonant separation");
    return 1.0 / (1.0 + 2.0 * std::numbers::pi * p.gamma_over_omega() * p.d_over_lambda());
}

Transmission physical_transmission(const SystemParams& p, double eps) {
    cplx t1[2];
    for (int k = 0; k < 2; ++k) {
        const Subspace s = kSubspaces[k];
        try {
            t1[k] = scattering_coeffs(p, s, eps).t1;
        } catch (const Error& e) {
            if (e.code() != ErrorCode::LocalizedPole) throw;
            // removable singularity: t1 -> 1 as eps -> Omega
            t1[k] = 1.0;
        }
    }
    return {0.5 * (t1[0] + t1[1]), 0.5 * (t1[0] - t1[1])};
}

double eigen_residual(const SystemParams& p, const EigenCoeffs& c) {
    const int h = eta(c.subspace);
    const double V = p.coupling_wg();
    const double K = p.coupling_res();
    const double v = p.v();
    const cplx s = std::polar(1.0, 0.5 * c.energy * p.delay());
    const cplx sb = std::conj(s);

    const cplx jump_left = I * p.v_g * (c.t0 - c.A) * sb - V * c.alpha;
    const cplx jump_right = I * p.v_g * (c.t1 - c.t0) * s - double(h) * V * c.alpha;
    const cplx jump_res = I * v * (c.b - c.a) - K * c.alpha;
    const cplx qubit = (c.energy - p.omega) * c.alpha -
                       V * (0.5 * (c.A + c.t0) * sb + 0.5 * double(h) * (c.t0 + c.t1) * s) -
                       0.5 * K * (c.a + c.b);

    const double scale = 1.0 + std::abs(c.alpha) * (V + K + std::abs(c.energy) + p.omega) +
                         p.v_g * (std::abs(c.A) + std::abs(c.t0) + std::abs(c.t1));
    double r = std::abs(jump_left);
    r = std::max(r, std::abs(jump_right));
    r = std::max(r, std::abs(jump_res));
    r = std::max(r, std::abs(qubit));
    return r / scale;
}

}  // namespace wqed

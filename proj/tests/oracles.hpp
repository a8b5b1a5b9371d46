// Independent references used by the tests.
//
// For a qubit-only initial state each sector amplitude obeys the delay
// equation
//   c'(t) = -(i Omega + gamma + Gamma/2) c(t) - gamma eta c(t - tau),  c(0) = 1,
// whose solution is the finite sum over round trips
//   c(t) = sum_n (-gamma eta)^n (t - n tau)^n / n! exp(-(W + i Omega)(t - n tau)).
// The photon amplitude follows from the emission history of both qubits.

#pragma once

#include <cmath>
#include <complex>
#include <numbers>

#include "wqed/model.hpp"

namespace oracle {

using cplx = std::complex<double>;

inline cplx sector_amplitude(const wqed::SystemParams& p, wqed::Subspace s, double t) {
    if (t < 0.0) return 0.0;
    const double tau = p.delay(), W = p.amplitude_rate(), g = p.gamma_wg;
    const double sign_phase = std::numbers::pi * (wqed::eta(s) > 0 ? 1.0 : 2.0);
    cplx sum = 0.0;
    for (int n = 0; n * tau <= t; ++n) {
        const double r = t - n * tau;
        if (n > 0 && r == 0.0) continue;
        const double log_mag = (n ? n * std::log(g * r) : 0.0) - std::lgamma(n + 1.0) - W * r;
        sum += std::polar(std::exp(log_mag), n * sign_phase - p.omega * r);
    }
    return sum;
}

// Sector photon amplitude at position x (raw units) for unit sector amplitude.
inline cplx sector_field(const wqed::SystemParams& p, wqed::Subspace s, double x, double t) {
    const double half = 0.5 * p.d;
    if (x < -half) return 0.0;
    cplx r = sector_amplitude(p, s, t - (x + half) / p.v_g);
    if (x > half) r += double(wqed::eta(s)) * sector_amplitude(p, s, t - (x - half) / p.v_g);
    return cplx(0.0, -p.coupling_wg() / p.v_g) * r;
}

// |phi_R(x)|^2 + |phi_L(x)|^2 per wavelength, for an initial state with the
// given sector projections.
inline double density(const wqed::SystemParams& p, cplx pe, cplx po, double x_over_lambda,
                      double gamma_t) {
    const double lam = p.wavelength(), x = x_over_lambda * lam, t = gamma_t / p.gamma_wg;
    using wqed::Subspace;
    const cplx e1 = pe * sector_field(p, Subspace::Even, x, t);
    const cplx o1 = po * sector_field(p, Subspace::Odd, x, t);
    const cplx e2 = pe * sector_field(p, Subspace::Even, -x, t);
    const cplx o2 = po * sector_field(p, Subspace::Odd, -x, t);
    return (std::norm(e1 + o1) + std::norm(e2 - o2)) * 0.5 * lam;
}

}  // namespace oracle

#include "wqed/markov.hpp"

#include <algorithm>
#include <cmath>

#include "wqed/error.hpp"

namespace wqed {

MarkovRates markov_rates(const SystemParams& p) {
    p.validate();
    const double kd = 2.0 * std::numbers::pi * p.d_over_lambda();
    MarkovRates r;
    r.Gamma_plus = p.gamma_res + 2.0 * p.gamma_wg * (1.0 + std::cos(kd));
    r.Gamma_minus = p.gamma_res + 2.0 * p.gamma_wg * (1.0 - std::cos(kd));
    r.g = p.gamma_wg * std::sin(kd);
    return r;
}

QubitTrajectory markov_trajectory(const SystemParams& p, std::span<const double> gamma_t,
                                  const InitialState& init) {
    init.validate();
    const MarkovRates r = markov_rates(p);
    const cplx ce = init.projection(Subspace::Even);
    const cplx co = init.projection(Subspace::Odd);
    const double coherence_rate = p.gamma_res + 2.0 * p.gamma_wg;

    QubitTrajectory tr;
    const std::size_t n = gamma_t.size();
    tr.gamma_t.assign(gamma_t.begin(), gamma_t.end());
    tr.rho_pp.resize(n);
    tr.rho_mm.resize(n);
    tr.rho_pm.resize(n);
    tr.concurrence.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double gt = gamma_t[i];
        if (!std::isfinite(gt) || gt < 0.0)
            throw Error(ErrorCode::InvalidArgument, "times must be finite and >= 0");
        const double t = gt / p.gamma_wg;
        tr.rho_pp[i] = std::norm(ce) * std::exp(-r.Gamma_plus * t);
        tr.rho_mm[i] = std::norm(co) * std::exp(-r.Gamma_minus * t);
        tr.rho_pm[i] = ce * std::conj(co) * std::exp(-coherence_rate * t) *
                       std::polar(1.0, -2.0 * r.g * t);
        tr.concurrence[i] = concurrence(tr.rho_pp[i], tr.rho_mm[i], tr.rho_pm[i]);
    }
    return tr;
}

double markov_deviation(const QubitTrajectory& a, const QubitTrajectory& b) {
    if (a.size() != b.size())
        throw Error(ErrorCode::GridMismatch, "trajectories have different lengths");
    double dev = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double tol = 1e-12 * std::max(1.0, std::abs(a.gamma_t[i]));
        if (std::abs(a.gamma_t[i] - b.gamma_t[i]) > tol)
            throw Error(ErrorCode::GridMismatch, "trajectories use different time grids");
        dev = std::max(dev, std::abs(a.rho_pp[i] - b.rho_pp[i]) +
                                std::abs(a.rho_mm[i] - b.rho_mm[i]) +
                                std::abs(a.concurrence[i] - b.concurrence[i]));
    }
    return dev;
}

}  // namespace wqed

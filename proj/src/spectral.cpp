#include "wqed/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "detail.hpp"
#include "spectral_engine.hpp"
#include "wqed/error.hpp"
#include "wqed/quadrature.hpp"

namespace wqed {

using detail::I;
using detail::SectorOutputs;
using detail::SectorTransform;

namespace {

constexpr double kPi = std::numbers::pi;
constexpr int kTimeNodes = 16;
// Delay multiples beyond which the retardation kinks are smooth enough to be
// crossed by a Gauss panel.
constexpr int kKinkBreakpoints = 16;
constexpr double kSinglePoleDelay = 0.1;

int sector_index(Subspace s) { return s == Subspace::Even ? 0 : 1; }

void check_times(std::span<const double> gt) {
    for (std::size_t i = 0; i < gt.size(); ++i) {
        if (!std::isfinite(gt[i]) || gt[i] < 0.0)
            throw Error(ErrorCode::InvalidArgument, "times must be finite and >= 0");
        if (i > 0 && gt[i] < gt[i - 1])
            throw Error(ErrorCode::InvalidArgument, "times must be sorted");
    }
}

double oscillation_time(const SystemParams& p, const QuadratureSpec& q, double t_last) {
    const double t_max = std::max(q.gamma_t_max / p.gamma_wg, t_last);
    return t_max + 2.0 * p.delay();
}

void fill_report(QuadratureReport& r, const SectorTransform& tr, int k) {
    r.nodes[k] = tr.nodes();
    r.panels[k] = tr.panels();
    r.window_half_width = tr.half_width();
    r.truncation_estimate = std::max(r.truncation_estimate, tr.truncation_estimate());
}

void finish_convergence(QuadratureReport& r, double change, const QuadratureSpec& q) {
    r.quadrature_error = change;
    r.converged = change <= q.convergence_tol;
    if (!r.converged)
        throw Error(ErrorCode::NonConvergence,
                    "doubling quadrature nodes changed the result by " + std::to_string(change));
}

// Sector amplitude kernels at raw times, with optional doubled-node check.
struct KernelRun {
    std::array<std::vector<cplx>, 2> kernel;
    QuadratureReport report;
};

KernelRun run_kernels(const SystemParams& p, std::span<const double> t, const QuadratureSpec& q,
                      double t_osc) {
    KernelRun run;
    double change = 0.0;
    for (Subspace s : kSubspaces) {
        const int k = sector_index(s);
        SectorTransform tr(p, s, q, t_osc, q.nodes_per_panel, false);
        SectorOutputs out;
        tr.evaluate(t, out);
        run.kernel[k] = std::move(out.kernel);
        fill_report(run.report, tr, k);
        if (q.check_convergence) {
            SectorTransform fine(p, s, q, t_osc, 2 * q.nodes_per_panel, false);
            SectorOutputs o2;
            fine.evaluate(t, o2);
            for (std::size_t i = 0; i < t.size(); ++i)
                change = std::max(change, std::abs(o2.kernel[i] - run.kernel[k][i]));
        }
    }
    if (q.check_convergence) finish_convergence(run.report, change, q);
    return run;
}

// Retarded-time panels of one sector: the photon amplitudes as functions of
// T = t - x/v_g in the three waveguide regions and in the reservoir.
struct SectorFields {
    SectorTransform tr;
    double half;  // d/(2 v_g)

    SectorFields(const SystemParams& p, Subspace s, const QuadratureSpec& q, double t_osc)
        : tr(p, s, q, t_osc, q.nodes_per_panel, true), half(0.5 * p.delay()) {}
};

// Amplitudes at the requested retarded times.
struct RegionAmps {
    std::vector<cplx> left, mid, right, res;
    std::vector<cplx> kernel;
};

RegionAmps region_amplitudes(const SystemParams& p, const SectorFields& f, Subspace s,
                             std::span<const double> T) {
    const std::size_t n = T.size();
    std::vector<double> shifted(n);
    SectorOutputs o, om, op;
    f.tr.evaluate(T, o);
    for (std::size_t i = 0; i < n; ++i) shifted[i] = T[i] - f.half;
    f.tr.evaluate(shifted, om);
    for (std::size_t i = 0; i < n; ++i) shifted[i] = T[i] + f.half;
    f.tr.evaluate(shifted, op);
    const double h = eta(s);
    const cplx cv = -I * p.coupling_wg() / p.v_g;
    const cplx cr = -I * p.coupling_res() / p.v();
    RegionAmps r;
    r.left.resize(n);
    r.mid.resize(n);
    r.right.resize(n);
    r.res.resize(n);
    r.kernel.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const cplx fa = o.falpha[i];
        r.left[i] = fa;
        r.mid[i] = fa + cv * om.kernel[i];
        r.right[i] = fa + cv * (om.kernel[i] + h * op.kernel[i]);
        r.res[i] = o.fres[i] + cr * o.kernel[i];
        r.kernel[i] = o.kernel[i];
    }
    return r;
}

// Gauss panels covering [a, b] with the given breakpoints and width cap.
struct TimePanels {
    std::vector<double> cuts;  // panel edges
    std::vector<double> nodes;
    std::vector<double> weights;
};

template <class Width>
TimePanels time_panels(double a, double b, std::vector<double> bp, Width h_max) {
    TimePanels tp;
    bp.push_back(a);
    bp.push_back(b);
    std::sort(bp.begin(), bp.end());
    const double eps = 1e-12 * std::max({1.0, std::abs(a), std::abs(b)});
    std::vector<double> edges;
    for (double x : bp) {
        if (x < a || x > b) continue;
        if (!edges.empty() && x - edges.back() <= eps) continue;
        edges.push_back(x);
    }
    if (edges.back() < b) edges.back() = b;
    const GaussRule& rule = gauss_legendre(kTimeNodes);
    tp.cuts.push_back(edges.front());
    for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
        const double lo = edges[i], hi = edges[i + 1];
        const int pieces = std::max(1, int(std::ceil((hi - lo) / h_max(lo) * (1.0 - 1e-12))));
        const double h = (hi - lo) / pieces;
        for (int k = 0; k < pieces; ++k) {
            const double pa = lo + k * h;
            const double pb = (k + 1 == pieces) ? hi : lo + (k + 1) * h;
            const double c = 0.5 * (pa + pb), r = 0.5 * (pb - pa);
            for (int j = 0; j < kTimeNodes; ++j) {
                tp.nodes.push_back(c + r * rule.x[j]);
                tp.weights.push_back(r * rule.w[j]);
            }
            tp.cuts.push_back(pb);
        }
    }
    return tp;
}

// Region amplitudes at every panel node. Consecutive panels of equal width
// are evaluated together, one Gauss node index at a time.
RegionAmps panel_amplitudes(const SystemParams& p, const SectorFields& f, Subspace s,
                            const TimePanels& tp) {
    RegionAmps all;
    const std::size_t n = tp.nodes.size();
    all.left.resize(n);
    all.mid.resize(n);
    all.right.resize(n);
    all.res.resize(n);
    all.kernel.resize(n);
    const std::size_t np = tp.cuts.size() - 1;
    auto width = [&](std::size_t i) { return tp.cuts[i + 1] - tp.cuts[i]; };
    std::vector<double> T;
    std::size_t first = 0;
    while (first < np) {
        std::size_t last = first + 1;
        while (last < np && std::abs(width(last) - width(first)) <= 1e-12 * width(first)) ++last;
        const std::size_t count = last - first;
        for (int j = 0; j < kTimeNodes; ++j) {
            T.resize(count);
            for (std::size_t k = 0; k < count; ++k) T[k] = tp.nodes[(first + k) * kTimeNodes + j];
            const RegionAmps r = region_amplitudes(p, f, s, T);
            for (std::size_t k = 0; k < count; ++k) {
                const std::size_t idx = (first + k) * kTimeNodes + j;
                all.left[idx] = r.left[k];
                all.mid[idx] = r.mid[k];
                all.right[idx] = r.right[k];
                all.res[idx] = r.res[k];
                all.kernel[idx] = r.kernel[k];
            }
        }
        first = last;
    }
    return all;
}

// Cumulative integral at each panel edge.
std::vector<double> cumulative(const TimePanels& tp, const std::vector<double>& dens) {
    std::vector<double> c(tp.cuts.size(), 0.0);
    for (std::size_t panel = 0; panel + 1 < tp.cuts.size(); ++panel) {
        double s = 0.0;
        for (int j = 0; j < kTimeNodes; ++j) {
            const std::size_t idx = panel * kTimeNodes + j;
            s += tp.weights[idx] * dens[idx];
        }
        c[panel + 1] = c[panel] + s;
    }
    return c;
}

double at_edge(const TimePanels& tp, const std::vector<double>& cum, double x) {
    const auto it = std::lower_bound(tp.cuts.begin(), tp.cuts.end(),
                                     x - 1e-12 * std::max(1.0, std::abs(x)));
    const std::size_t i = std::min<std::size_t>(it - tp.cuts.begin(), tp.cuts.size() - 1);
    return cum[i];
}

struct Budgets {
    std::vector<double> qubit, waveguide, reservoir;
    std::array<std::vector<cplx>, 2> amp;  // sector qubit amplitudes
    QuadratureReport report;
};

// Waveguide and reservoir probabilities from the reconstructed photon
// wavefunctions, integrated in retarded time.
Budgets compute_budgets(const SystemParams& p, const InitialState& init,
                        std::span<const double> t, const QuadratureSpec& q) {
    const double t_last = t.empty() ? 0.0 : t.back();
    const double t_osc = oscillation_time(p, q, t_last);
    const double half = 0.5 * p.delay();
    const double W = p.amplitude_rate();
    const double h_env = 0.5 / (W + p.gamma_wg);
    const double h_near = std::min(half, h_env);
    // With gamma*tau small only one collective pole carries weight, so past
    // the first kinks the densities vary on the envelope scale alone.
    const double h_far = p.gamma_wg * p.delay() < kSinglePoleDelay ? h_env : h_near;
    const double kink_end = kKinkBreakpoints * p.delay() + half;

    std::vector<double> bp;
    for (int k = -1; k <= 2 * kKinkBreakpoints + 1; ++k) bp.push_back(k * half);
    for (double ti : t) {
        bp.push_back(ti);
        bp.push_back(ti - half);
        bp.push_back(ti + half);
    }
    const TimePanels tp = time_panels(-half, t_last + half, bp, [&](double lo) {
        return lo < kink_end ? h_near : h_far;
    });

    Budgets b;
    b.qubit.assign(t.size(), 0.0);
    b.waveguide.assign(t.size(), 0.0);
    b.reservoir.assign(t.size(), 0.0);
    double change = 0.0;
    for (Subspace s : kSubspaces) {
        const int k = sector_index(s);
        const double w = std::norm(init.projection(s));
        SectorFields f(p, s, q, t_osc);
        fill_report(b.report, f.tr, k);
        const RegionAmps ra = panel_amplitudes(p, f, s, tp);
        std::vector<double> dm(tp.nodes.size()), dr(tp.nodes.size()), dq(tp.nodes.size());
        for (std::size_t i = 0; i < tp.nodes.size(); ++i) {
            dm[i] = std::norm(ra.mid[i]);
            dr[i] = std::norm(ra.right[i]);
            dq[i] = tp.nodes[i] >= 0.0 ? std::norm(ra.res[i]) : 0.0;
        }
        const auto cm = cumulative(tp, dm);
        const auto cr = cumulative(tp, dr);
        const auto cq = cumulative(tp, dq);

        SectorOutputs qo;
        f.tr.evaluate(t, qo);
        b.amp[k].resize(t.size());
        for (std::size_t i = 0; i < t.size(); ++i) {
            const double ti = t[i];
            const cplx c = init.projection(s) * qo.kernel[i];
            b.amp[k][i] = c;
            b.qubit[i] += std::norm(c);
            const double mid = at_edge(tp, cm, ti + half) - at_edge(tp, cm, ti - half);
            const double right = at_edge(tp, cr, ti - half) - at_edge(tp, cr, -half);
            const double res = at_edge(tp, cq, ti) - at_edge(tp, cq, 0.0);
            b.waveguide[i] += w * p.v_g * (mid + right);
            b.reservoir[i] += w * p.v() * res;
        }
        if (q.check_convergence) {
            SectorTransform fine(p, s, q, t_osc, 2 * q.nodes_per_panel, false);
            SectorOutputs o2;
            fine.evaluate(t, o2);
            for (std::size_t i = 0; i < t.size(); ++i)
                change = std::max(change, std::abs(o2.kernel[i] - qo.kernel[i]));
        }
    }
    if (q.check_convergence) finish_convergence(b.report, change, q);
    return b;
}

std::vector<double> to_raw(const SystemParams& p, std::span<const double> gt) {
    std::vector<double> t(gt.size());
    for (std::size_t i = 0; i < gt.size(); ++i) t[i] = gt[i] / p.gamma_wg;
    return t;
}

}  // namespace

InitialState InitialState::symmetric() {
    const double r = 1.0 / std::sqrt(2.0);
    return {cplx(r, 0.0), cplx(r, 0.0)};
}

InitialState InitialState::antisymmetric() {
    const double r = 1.0 / std::sqrt(2.0);
    return {cplx(r, 0.0), cplx(-r, 0.0)};
}

cplx InitialState::projection(Subspace s) const {
    return (c1 + double(eta(s)) * c2) / std::sqrt(2.0);
}

void InitialState::validate() const {
    const double n = std::norm(c1) + std::norm(c2);
    if (!std::isfinite(n) || std::abs(n - 1.0) > 1e-12)
        throw Error(ErrorCode::InvalidArgument, "initial state must be normalized");
}

void QuadratureSpec::validate() const {
    if (!(kappa > 0.0) || !std::isfinite(kappa))
        throw Error(ErrorCode::InvalidArgument, "kappa must be positive");
    if (nodes_per_panel < 2 || nodes_per_panel > 256 || nodes_per_panel % 2 != 0)
        throw Error(ErrorCode::InvalidArgument, "nodes_per_panel must be even in [2, 256]");
    if (!(gamma_t_max >= 0.0)) throw Error(ErrorCode::InvalidArgument, "gamma_t_max must be >= 0");
    if (!(min_nodes_per_period >= 8.0))
        throw Error(ErrorCode::InvalidArgument, "at least 8 nodes per oscillation period");
    if (!(refine_tol > 0.0)) throw Error(ErrorCode::InvalidArgument, "refine_tol must be positive");
    if (max_refine_depth < 0 || max_refine_depth > 60)
        throw Error(ErrorCode::InvalidArgument, "max_refine_depth out of range");
    if (!(truncation_tol > 0.0))
        throw Error(ErrorCode::InvalidArgument, "truncation_tol must be positive");
    if (!(convergence_tol > 0.0))
        throw Error(ErrorCode::InvalidArgument, "convergence_tol must be positive");
}

cplx qubit_overlap(const EigenCoeffs& coeffs, const InitialState& init, Subspace s) {
    return std::conj(coeffs.alpha) * init.projection(s);
}

ClosureReport closure_check(const SystemParams& p, const QuadratureSpec& q) {
    p.validate();
    q.validate();
    ClosureReport r;
    const double t_osc = oscillation_time(p, q, 0.0);
    for (Subspace s : kSubspaces) {
        const int k = sector_index(s);
        SectorTransform tr(p, s, q, t_osc, q.nodes_per_panel, false);
        r.continuum[k] = tr.continuum_weight();
        r.localized[k] = tr.localized_weight();
        r.total[k] = r.continuum[k] + r.localized[k];
        r.nodes[k] = tr.nodes();
        r.truncation_estimate[k] = tr.truncation_estimate();
        r.window_half_width = tr.half_width();
        SectorTransform fine(p, s, q, t_osc, 2 * q.nodes_per_panel, false);
        r.quadrature_error[k] = std::abs(fine.continuum_weight() - r.continuum[k]);
    }
    return r;
}

QubitAmplitudes evolve_qubit_amplitudes(const SystemParams& p, const InitialState& init,
                                        std::span<const double> gamma_t,
                                        const QuadratureSpec& q) {
    p.validate();
    init.validate();
    q.validate();
    check_times(gamma_t);
    const auto t = to_raw(p, gamma_t);
    const double t_osc = oscillation_time(p, q, t.empty() ? 0.0 : t.back());
    KernelRun run = run_kernels(p, t, q, t_osc);

    QubitAmplitudes a;
    a.gamma_t.assign(gamma_t.begin(), gamma_t.end());
    a.even.resize(t.size());
    a.odd.resize(t.size());
    const cplx pe = init.projection(Subspace::Even);
    const cplx po = init.projection(Subspace::Odd);
    for (std::size_t i = 0; i < t.size(); ++i) {
        a.even[i] = pe * run.kernel[0][i];
        a.odd[i] = po * run.kernel[1][i];
    }
    a.report = run.report;
    return a;
}

double concurrence(double rho_pp, double rho_mm, cplx rho_pm) {
    const double d = rho_pp - rho_mm;
    const double im = rho_pm.imag();
    return 0.5 * std::sqrt(d * d + 4.0 * im * im);
}

QubitTrajectory trajectory_from_amplitudes(const QubitAmplitudes& a) {
    QubitTrajectory tr;
    const std::size_t n = a.gamma_t.size();
    tr.gamma_t = a.gamma_t;
    tr.rho_pp.resize(n);
    tr.rho_mm.resize(n);
    tr.rho_pm.resize(n);
    tr.concurrence.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        tr.rho_pp[i] = std::norm(a.even[i]);
        tr.rho_mm[i] = std::norm(a.odd[i]);
        tr.rho_pm[i] = a.even[i] * std::conj(a.odd[i]);
        tr.concurrence[i] = concurrence(tr.rho_pp[i], tr.rho_mm[i], tr.rho_pm[i]);
    }
    tr.report = a.report;
    return tr;
}

QubitTrajectory trajectory(const SystemParams& p, const InitialState& init,
                           std::span<const double> gamma_t, const QuadratureSpec& q) {
    return trajectory_from_amplitudes(evolve_qubit_amplitudes(p, init, gamma_t, q));
}

FieldSnapshot field_snapshot(const SystemParams& p, const InitialState& init, double gamma_t,
                             std::span<const double> x_over_lambda, const QuadratureSpec& q,
                             ReservoirMode mode) {
    p.validate();
    init.validate();
    q.validate();
    if (!std::isfinite(gamma_t) || gamma_t < 0.0)
        throw Error(ErrorCode::InvalidArgument, "snapshot time must be >= 0");
    for (double x : x_over_lambda)
        if (!std::isfinite(x)) throw Error(ErrorCode::InvalidArgument, "non-finite grid point");

    const double t = gamma_t / p.gamma_wg;
    const double lam = p.wavelength();
    const double half_d = 0.5 * p.d;
    const double tv[1] = {t};
    const Budgets b = compute_budgets(p, init, tv, q);

    FieldSnapshot snap;
    snap.gamma_t = gamma_t;
    snap.x_over_lambda.assign(x_over_lambda.begin(), x_over_lambda.end());
    snap.qubit_even = std::norm(b.amp[0][0]);
    snap.qubit_odd = std::norm(b.amp[1][0]);
    snap.waveguide_probability = b.waveguide[0];
    snap.report = b.report;
    snap.reservoir_mode = mode;
    if (mode == ReservoirMode::Explicit)
        snap.reservoir_probability = b.reservoir[0];
    else
        snap.reservoir_probability =
            1.0 - snap.qubit_even - snap.qubit_odd - snap.waveguide_probability;

    // Sector amplitudes at +x and -x for every grid point; each half is
    // evaluated on its own so an equally spaced grid stays a progression.
    const std::size_t n = x_over_lambda.size();
    std::array<std::vector<double>, 2> X, T;
    for (int side = 0; side < 2; ++side) {
        X[side].resize(n);
        T[side].resize(n);
        for (std::size_t i = 0; i < n; ++i) {
            X[side][i] = (side == 0 ? 1.0 : -1.0) * x_over_lambda[i] * lam;
            T[side][i] = t - X[side][i] / p.v_g;
        }
    }
    const double t_osc = oscillation_time(p, q, t);
    std::array<std::array<std::vector<cplx>, 2>, 2> phi;  // [sector][side]
    for (Subspace s : kSubspaces) {
        const int k = sector_index(s);
        SectorFields f(p, s, q, t_osc);
        const cplx proj = init.projection(s);
        for (int side = 0; side < 2; ++side) {
            const RegionAmps ra = region_amplitudes(p, f, s, T[side]);
            auto& out = phi[k][side];
            out.resize(n);
            for (std::size_t i = 0; i < n; ++i) {
                const double x = X[side][i];
                const cplx a =
                    x < -half_d ? ra.left[i] : (x < half_d ? ra.mid[i] : ra.right[i]);
                out[i] = proj * a;
            }
        }
    }
    snap.density.resize(n);
    snap.interference.resize(n);
    const double r2 = 1.0 / std::sqrt(2.0);
    for (std::size_t i = 0; i < n; ++i) {
        const cplx right = r2 * (phi[0][0][i] + phi[1][0][i]);
        const cplx left = r2 * (phi[0][1][i] - phi[1][1][i]);
        snap.density[i] = (std::norm(right) + std::norm(left)) * lam;
        snap.interference[i] = 2.0 * std::real(right * std::conj(left)) * lam;
    }
    return snap;
}

double total_probability(const FieldSnapshot& snap) {
    return snap.qubit_even + snap.qubit_odd + snap.waveguide_probability +
           snap.reservoir_probability;
}

std::vector<ProbabilityBudget> probability_budget(const SystemParams& p,
                                                  const InitialState& init,
                                                  std::span<const double> gamma_t,
                                                  const QuadratureSpec& q) {
    p.validate();
    init.validate();
    q.validate();
    check_times(gamma_t);
    const auto t = to_raw(p, gamma_t);
    const Budgets b = compute_budgets(p, init, t, q);
    std::vector<ProbabilityBudget> out(t.size());
    for (std::size_t i = 0; i < t.size(); ++i) {
        out[i].gamma_t = gamma_t[i];
        out[i].qubit = b.qubit[i];
        out[i].waveguide = b.waveguide[i];
        out[i].reservoir = b.reservoir[i];
    }
    return out;
}

}  // namespace wqed

#include "wqed/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <utility>
#include <vector>

#include <Eigen/Eigenvalues>

#include "detail.hpp"
#include "spectral_engine.hpp"
#include "wqed/error.hpp"
#include "wqed/quadrature.hpp"

namespace wqed {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kMinWidths = 20.0;
constexpr int kMaxSecularIterations = 400;

double linewidth(const SystemParams& p) { return 2.0 * p.gamma_wg + p.gamma_res; }

cplx wg_coupling(const SystemParams& p, Subspace s, const LatticeSpec& spec, int n) {
    const double e = spec.mode_energy(n);
    const double half = 0.5 * e * p.delay();
    const double amp = p.coupling_wg() * std::sqrt(spec.spacing() / (2.0 * kPi * p.v_g));
    return amp * (std::polar(1.0, -half) + double(eta(s)) * std::polar(1.0, half));
}

double res_coupling(const SystemParams& p, const LatticeSpec& spec) {
    return p.coupling_res() * std::sqrt(spec.reservoir_spacing() / (2.0 * kPi * p.v()));
}

// Every continuum mode couples only to the qubit, so with the coupling phases
// gauged away the subspace is a real arrowhead [[Omega, b^T], [b, diag(eps)]].
// Modes of equal energy reduce to one bright mode with b^2 summed; the dark
// combinations and uncoupled modes never acquire qubit amplitude.
struct Poles {
    std::vector<double> eps;
    std::vector<double> b2;
};

Poles collect_poles(const SystemParams& p, Subspace s, const LatticeSpec& spec) {
    std::vector<std::pair<double, double>> modes;
    modes.reserve(std::size_t(spec.n_wg) + spec.n_res);
    for (int n = 0; n < spec.n_wg; ++n)
        modes.emplace_back(spec.mode_energy(n), std::norm(wg_coupling(p, s, spec, n)));
    if (!p.lossless()) {
        const double h = res_coupling(p, spec);
        for (int m = 0; m < spec.n_res; ++m) modes.emplace_back(spec.reservoir_energy(m), h * h);
    }
    std::stable_sort(modes.begin(), modes.end(),
                     [](const auto& a, const auto& b) { return a.first < b.first; });
    double largest = 0.0;
    for (const auto& m : modes) largest = std::max(largest, m.second);
    Poles out;
    for (const auto& [e, b2] : modes) {
        if (!(b2 > 1e-30 * largest)) continue;
        if (!out.eps.empty() && std::abs(e - out.eps.back()) <= 1e-14 * std::max(1.0, std::abs(e))) {
            out.b2.back() += b2;
            continue;
        }
        out.eps.push_back(e);
        out.b2.push_back(b2);
    }
    return out;
}

// One eigenvalue, stored relative to its nearest pole for accuracy.
struct Root {
    int origin = 0;
    double delta = 0.0;
    double weight = 0.0;
};

// Secular function g(lambda) = lambda - Omega - sum b_j^2 / (lambda - eps_j)
// and its derivative, with lambda = eps_o + x.
struct Secular {
    const Poles& poles;
    double omega;

    std::pair<double, double> eval(int o, double x) const {
        const double eo = poles.eps[o];
        double f = x + (eo - omega), df = 1.0;
        const std::size_t n = poles.eps.size();
        for (std::size_t j = 0; j < n; ++j) {
            const double r = 1.0 / (x - (poles.eps[j] - eo));
            f -= poles.b2[j] * r;
            df += poles.b2[j] * r * r;
        }
        return {f, df};
    }

    // g increases monotonically between poles; lo < root < hi with g(lo) < 0 < g(hi).
    Root solve(int o, double lo, double hi) const {
        double x = 0.5 * (lo + hi);
        double last_width = hi - lo;
        for (int it = 0; it < kMaxSecularIterations; ++it) {
            const auto [f, df] = eval(o, x);
            if (f == 0.0) break;
            (f < 0.0 ? lo : hi) = x;
            const double width = hi - lo;
            if (width <= 4.0 * std::numeric_limits<double>::epsilon() *
                             std::max(std::abs(lo), std::abs(hi)))
                break;
            double next = x - f / df;
            if (!(next > lo && next < hi) || width > 0.5 * last_width) next = 0.5 * (lo + hi);
            last_width = width;
            if (next == x) break;
            x = next;
        }
        Root r;
        r.origin = o;
        r.delta = x;
        r.weight = 1.0 / eval(o, x).second;
        return r;
    }
};

std::vector<Root> secular_roots(const Poles& poles, double omega) {
    const int n = int(poles.eps.size());
    if (n == 0) return {Root{-1, omega, 1.0}};
    const Secular sec{poles, omega};
    double norm_b = 0.0;
    for (double b2 : poles.b2) norm_b += b2;
    norm_b = std::sqrt(norm_b);
    std::vector<Root> roots(std::size_t(n) + 1);
    const double reach_lo = poles.eps.front() - std::min(omega, poles.eps.front()) + norm_b;
    const double reach_hi = std::max(omega, poles.eps.back()) - poles.eps.back() + norm_b;
#ifdef WQED_HAVE_OPENMP
#pragma omp parallel for schedule(dynamic, 64) num_threads(detail::worker_threads())
#endif
    for (int k = 0; k <= n; ++k) {
        if (k == 0) {
            roots[0] = sec.solve(0, -(2.0 * reach_lo + 1e-300), 0.0);
        } else if (k == n) {
            roots[n] = sec.solve(n - 1, 0.0, 2.0 * reach_hi + 1e-300);
        } else {
            const double gap = poles.eps[k] - poles.eps[k - 1];
            if (sec.eval(k - 1, 0.5 * gap).first >= 0.0)
                roots[k] = sec.solve(k - 1, 0.0, 0.5 * gap);
            else
                roots[k] = sec.solve(k, -0.5 * gap, 0.0);
        }
    }
    return roots;
}

double root_energy(const Poles& poles, const Root& r) {
    return r.origin < 0 ? r.delta : poles.eps[r.origin] + r.delta;
}

// max |1 - |psi|^2| over the given times, with eigenvectors rebuilt from the
// closed form (1, b_j / (lambda - eps_j)) sqrt(weight).
double secular_unitarity(const Poles& poles, const std::vector<Root>& roots,
                         std::span<const double> times) {
    if (poles.eps.empty()) return 0.0;
    const std::size_t n = poles.eps.size();
    double worst = 0.0;
    for (double t : times) {
        std::vector<cplx> coef(roots.size());
        cplx qubit = 0.0;
        for (std::size_t k = 0; k < roots.size(); ++k) {
            coef[k] = roots[k].weight * std::polar(1.0, -root_energy(poles, roots[k]) * t);
            qubit += coef[k];
        }
        std::vector<double> part(n, 0.0);
#ifdef WQED_HAVE_OPENMP
#pragma omp parallel for schedule(static) num_threads(detail::worker_threads())
#endif
        for (std::size_t j = 0; j < n; ++j) {
            cplx amp = 0.0;
            for (std::size_t k = 0; k < roots.size(); ++k) {
                const double eo = poles.eps[roots[k].origin];
                amp += coef[k] / (roots[k].delta - (poles.eps[j] - eo));
            }
            part[j] = poles.b2[j] * std::norm(amp);
        }
        double total = std::norm(qubit);
        for (double v : part) total += v;
        worst = std::max(worst, std::abs(1.0 - total));
    }
    return worst;
}

struct SubspaceResult {
    LatticeSpectrum spectrum;
    double unitarity_error = 0.0;
};

SubspaceResult solve_secular(const SystemParams& p, Subspace s, const LatticeSpec& spec,
                             std::span<const double> check_t) {
    const Poles poles = collect_poles(p, s, spec);
    const std::vector<Root> roots = secular_roots(poles, p.omega);
    SubspaceResult out;
    out.spectrum.energy.reserve(roots.size());
    out.spectrum.weight.reserve(roots.size());
    for (const Root& r : roots) {
        out.spectrum.energy.push_back(root_energy(poles, r));
        out.spectrum.weight.push_back(r.weight);
    }
    out.unitarity_error = secular_unitarity(poles, roots, check_t);
    return out;
}

SubspaceResult solve_dense(const SystemParams& p, Subspace s, const LatticeSpec& spec,
                           std::span<const double> check_t) {
    const Eigen::MatrixXcd H = build_hamiltonian(p, s, spec);
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(H);
    if (es.info() != Eigen::Success)
        throw Error(ErrorCode::NonConvergence, "dense eigendecomposition failed");
    const Eigen::MatrixXcd& V = es.eigenvectors();
    const Eigen::VectorXd& w = es.eigenvalues();
    const Eigen::Index n = H.rows();
    SubspaceResult out;
    out.spectrum.energy.assign(w.data(), w.data() + n);
    out.spectrum.weight.resize(n);
    for (Eigen::Index k = 0; k < n; ++k) out.spectrum.weight[k] = std::norm(V(0, k));
    for (double t : check_t) {
        Eigen::VectorXcd coef(n);
        for (Eigen::Index k = 0; k < n; ++k) coef[k] = std::polar(1.0, -w[k] * t) * std::conj(V(0, k));
        out.unitarity_error = std::max(out.unitarity_error, std::abs(1.0 - (V * coef).squaredNorm()));
    }
    return out;
}

SubspaceResult solve(const SystemParams& p, Subspace s, const LatticeSpec& spec,
                     std::span<const double> check_t) {
    return spec.solver == LatticeSolver::Dense ? solve_dense(p, s, spec, check_t)
                                               : solve_secular(p, s, spec, check_t);
}

// Qubit spectral density of the continuum restricted to [lo, hi]: the modes
// outside the window no longer contribute their level shift
//   I(lam) = int_outside c(eps) / (lam - eps) d eps,
// c = (gamma |X|^2 + Gamma) / 2 pi, so the denominator D becomes D + I.
double windowed_density(const SystemParams& p, Subspace s, double lam, double lo, double hi) {
    const double g = p.gamma_wg, tau = p.delay();
    const double a = hi - lam, b = lam - lo;
    const int e = eta(s);
    const cplx X = detail::collective_factor(e, lam * tau);
    const double flat = (2.0 * g + p.gamma_res) / (2.0 * kPi) * std::log(a / b);
    const double osc = std::cos(lam * tau) * (cosine_integral(a * tau) - cosine_integral(b * tau)) +
                       std::sin(lam * tau) * (kPi - sine_integral(a * tau) - sine_integral(b * tau));
    const cplx D = cplx(lam - p.omega + flat + g * e / kPi * osc, 0.5 * p.gamma_res) + detail::I * g * X;
    return (g * std::norm(X) + p.gamma_res) / (2.0 * kPi * std::norm(D));
}

}  // namespace

LatticeSpec LatticeSpec::for_times(const SystemParams& p, double gamma_t_max, int n_wg) {
    p.validate();
    if (!(gamma_t_max > 0.0)) throw Error(ErrorCode::InvalidArgument, "gamma_t_max must be > 0");
    if (n_wg < 2) throw Error(ErrorCode::InvalidArgument, "need at least 2 modes");
    const double t_max = gamma_t_max / p.gamma_wg;
    const double spacing = 0.9 * kPi / t_max;
    const double half = std::max(0.5 * n_wg * spacing, kMinWidths * linewidth(p));
    LatticeSpec s;
    s.n_wg = n_wg;
    s.n_res = n_wg;
    s.window_lo = p.omega - half;
    s.window_hi = p.omega + half;
    return s;
}

void LatticeSpec::validate(const SystemParams& p) const {
    if (n_wg < 2 || n_res < 2) throw Error(ErrorCode::InvalidArgument, "need N >= 2");
    if (!(window_hi > window_lo)) throw Error(ErrorCode::InvalidArgument, "empty window");
    const double need = kMinWidths * linewidth(p) * (1.0 - 1e-12);
    if (window_lo > p.omega - need || window_hi < p.omega + need)
        throw Error(ErrorCode::InvalidArgument,
                    "window must cover Omega +- 20 (2 gamma + Gamma)");
}

double recurrence_limit(const SystemParams& p, const LatticeSpec& spec) {
    return p.gamma_wg * kPi / spec.spacing();
}

Eigen::MatrixXcd build_hamiltonian(const SystemParams& p, Subspace s, const LatticeSpec& spec) {
    p.validate();
    spec.validate(p);
    const int n = 1 + spec.n_wg + spec.n_res;
    Eigen::MatrixXcd H = Eigen::MatrixXcd::Zero(n, n);
    H(0, 0) = p.omega;
    for (int k = 0; k < spec.n_wg; ++k) {
        const cplx g = wg_coupling(p, s, spec, k);
        H(1 + k, 1 + k) = spec.mode_energy(k);
        H(0, 1 + k) = g;
        H(1 + k, 0) = std::conj(g);
    }
    const double h = res_coupling(p, spec);
    for (int m = 0; m < spec.n_res; ++m) {
        const int r = 1 + spec.n_wg + m;
        H(r, r) = spec.reservoir_energy(m);
        H(0, r) = h;
        H(r, 0) = h;
    }
    return H;
}

LatticeSpectrum lattice_spectrum(const SystemParams& p, Subspace s, const LatticeSpec& spec) {
    p.validate();
    spec.validate(p);
    return solve(p, s, spec, {}).spectrum;
}

QubitTrajectory evolve_exact(const SystemParams& p, const InitialState& init,
                             std::span<const double> gamma_t, const LatticeSpec& spec,
                             LatticeDiagnostics* diag) {
    p.validate();
    init.validate();
    spec.validate(p);
    for (double gt : gamma_t)
        if (!std::isfinite(gt) || gt < 0.0)
            throw Error(ErrorCode::InvalidArgument, "times must be finite and >= 0");

    std::vector<double> check;
    if (!gamma_t.empty()) {
        check.push_back(gamma_t.front() / p.gamma_wg);
        check.push_back(gamma_t[gamma_t.size() / 2] / p.gamma_wg);
        check.push_back(gamma_t.back() / p.gamma_wg);
    }
    QubitAmplitudes amps;
    amps.gamma_t.assign(gamma_t.begin(), gamma_t.end());
    double unitarity = 0.0;
    for (Subspace s : kSubspaces) {
        const SubspaceResult r = solve(p, s, spec, check);
        unitarity = std::max(unitarity, r.unitarity_error);
        const cplx proj = init.projection(s);
        auto& out = s == Subspace::Even ? amps.even : amps.odd;
        out.resize(gamma_t.size());
        const auto& e = r.spectrum.energy;
        const auto& w = r.spectrum.weight;
        for (std::size_t i = 0; i < gamma_t.size(); ++i) {
            const double t = gamma_t[i] / p.gamma_wg;
            cplx c = 0.0;
            for (std::size_t k = 0; k < e.size(); ++k) c += w[k] * std::polar(1.0, -e[k] * t);
            out[i] = proj * c;
        }
    }
    if (diag) {
        diag->unitarity_error = unitarity;
        diag->recurrence_gamma_t = recurrence_limit(p, spec);
    }
    QubitTrajectory tr = trajectory_from_amplitudes(amps);
    tr.report.reset();
    return tr;
}

double orthogonality_probe(const SystemParams& p, const LatticeSpec& spec) {
    p.validate();
    spec.validate(p);
    if (p.lossless()) return 0.0;
    if (spec.n_res != spec.n_wg)
        throw Error(ErrorCode::InvalidArgument, "probe needs n_res == n_wg");
    const double reach = 10.0 * linewidth(p);
    double worst = 0.0;
    for (Subspace s : kSubspaces) {
        const LatticeSpectrum sp = solve_secular(p, s, spec, {}).spectrum;
        const auto& w = sp.energy;
        double peak = 0.0, dev = 0.0;
        for (std::size_t k = 1; k + 1 < w.size(); ++k) {
            if (std::abs(w[k] - p.omega) > reach) continue;
            const double ldos = sp.weight[k] / (0.5 * (w[k + 1] - w[k - 1]));
            const double exact =
                windowed_density(p, s, w[k], spec.window_lo, spec.window_hi);
            peak = std::max(peak, exact);
            dev = std::max(dev, std::abs(ldos - exact));
        }
        if (peak > 0.0) worst = std::max(worst, dev / peak);
    }
    return worst;
}

}  // namespace wqed

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "wqed/error.hpp"
#include "wqed/lattice.hpp"

using namespace wqed;

namespace {

std::vector<double> grid(double hi, int n) {
    std::vector<double> t(n + 1);
    for (int i = 0; i <= n; ++i) t[i] = hi * i / n;
    return t;
}

LatticeSpec small_spec(const SystemParams& p, int n) {
    LatticeSpec s;
    const double w = 25.0 * (2.0 * p.gamma_wg + p.gamma_res);
    s.window_lo = p.omega - w;
    s.window_hi = p.omega + w;
    s.n_wg = s.n_res = n;
    return s;
}

}  // namespace

TEST_CASE("hamiltonian structure") {
    const SystemParams p = SystemParams::from_ratios(0.01, 0.1, 1.0);
    const LatticeSpec spec = small_spec(p, 50);
    for (Subspace s : kSubspaces) {
        const Eigen::MatrixXcd H = build_hamiltonian(p, s, spec);
        REQUIRE(H.rows() == 101);
        CHECK((H - H.adjoint()).cwiseAbs().maxCoeff() == 0.0);
        CHECK(H(0, 0).real() == p.omega);
        for (int n = 0; n < spec.n_wg; ++n) CHECK(H(1 + n, 1 + n).real() == spec.mode_energy(n));
        for (int m = 0; m < spec.n_res; ++m)
            CHECK(std::abs(H(0, 1 + spec.n_wg + m)) ==
                  doctest::Approx(p.coupling_res() * std::sqrt(spec.reservoir_spacing() / (2.0 * std::numbers::pi))));
    }

    // one mode exactly at Omega: |e^{-i pi} + e^{i pi}| = 2
    LatticeSpec centred = spec;
    centred.n_wg = centred.n_res = 51;
    REQUIRE(centred.mode_energy(25) == doctest::Approx(p.omega).epsilon(1e-14));
    const Eigen::MatrixXcd He = build_hamiltonian(p, Subspace::Even, centred);
    CHECK(std::abs(He(0, 26)) ==
          doctest::Approx(2.0 * p.coupling_wg() * std::sqrt(centred.spacing() / (2.0 * std::numbers::pi)))
              .epsilon(1e-10));
    const Eigen::MatrixXcd Ho = build_hamiltonian(p, Subspace::Odd, centred);
    CHECK(std::abs(Ho(0, 26)) < 1e-10);
}

TEST_CASE("uncoupled lattice") {
    SystemParams p = SystemParams::from_ratios(0.01, 0.1, 1.0);
    const LatticeSpec spec = small_spec(p, 20);
    // couplings of order 1e-100
    p.gamma_wg = 1e-200;
    p.gamma_res = 0.0;
    const Eigen::MatrixXcd H = build_hamiltonian(p, Subspace::Even, spec);
    CHECK(H.isDiagonal(1e-90));
    LatticeSpec dense = spec;
    dense.solver = LatticeSolver::Dense;
    const LatticeSpectrum sp = lattice_spectrum(p, Subspace::Even, dense);
    std::vector<double> diag;
    for (int i = 0; i < H.rows(); ++i) diag.push_back(H(i, i).real());
    std::sort(diag.begin(), diag.end());
    REQUIRE(sp.energy.size() == diag.size());
    for (std::size_t i = 0; i < diag.size(); ++i) CHECK(sp.energy[i] == doctest::Approx(diag[i]).epsilon(1e-14));
}

TEST_CASE("secular and dense solvers agree") {
    for (double dl : {1.0, 0.6, 10.0}) {
        const SystemParams p = SystemParams::from_ratios(0.05, 0.1, dl);
        LatticeSpec sec = small_spec(p, 200);
        LatticeSpec dense = sec;
        dense.solver = LatticeSolver::Dense;
        const std::vector<double> t = grid(5.0, 30);
        for (Subspace s : kSubspaces) {
            const LatticeSpectrum a = lattice_spectrum(p, s, sec);
            const LatticeSpectrum b = lattice_spectrum(p, s, dense);
            double wa = 0.0, wb = 0.0;
            for (double w : a.weight) wa += w;
            for (double w : b.weight) wb += w;
            CHECK(wa == doctest::Approx(1.0).epsilon(1e-12));
            CHECK(wb == doctest::Approx(1.0).epsilon(1e-12));
            // every coupled secular level appears among the dense eigenvalues
            for (std::size_t k = 0; k < a.energy.size(); ++k) {
                if (a.weight[k] < 1e-10) continue;
                auto it = std::lower_bound(b.energy.begin(), b.energy.end(), a.energy[k] - 1e-9);
                REQUIRE(it != b.energy.end());
                CHECK(std::abs(*it - a.energy[k]) < 1e-9);
            }
        }
        const QubitTrajectory ta = evolve_exact(p, InitialState::qubit1(), t, sec);
        const QubitTrajectory tb = evolve_exact(p, InitialState::qubit1(), t, dense);
        for (std::size_t i = 0; i < t.size(); ++i) {
            CHECK(std::abs(ta.rho_pp[i] - tb.rho_pp[i]) < 1e-10);
            CHECK(std::abs(ta.rho_mm[i] - tb.rho_mm[i]) < 1e-10);
            CHECK(std::abs(ta.rho_pm[i] - tb.rho_pm[i]) < 1e-10);
        }
    }
}

TEST_CASE("initial values and unitarity") {
    const SystemParams p = SystemParams::from_ratios(0.01, 0.1, 1.0);
    const std::vector<double> t = grid(5.0, 49);
    LatticeDiagnostics diag;
    const QubitTrajectory tr = evolve_exact(p, InitialState::qubit1(), t, LatticeSpec::for_times(p, 5.0), &diag);
    CHECK(tr.rho_pp[0] == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(tr.rho_mm[0] == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(tr.concurrence[0] < 1e-12);
    CHECK(diag.unitarity_error < 1e-12);
    CHECK(diag.recurrence_gamma_t > 5.0);
}

TEST_CASE("golden-rule decay before the first round trip") {
    const SystemParams p = SystemParams::from_ratios(0.01, 0.1, 10.0);
    const std::vector<double> t = grid(0.6, 30);
    const QubitTrajectory tr = evolve_exact(p, InitialState::qubit1(), t, LatticeSpec::for_times(p, 0.6));
    for (std::size_t i = 0; i < t.size(); ++i)
        CHECK(std::abs(tr.rho_pp[i] + tr.rho_mm[i] - std::exp(-2.1 * t[i])) < 1e-3);
}

TEST_CASE("agreement with the spectral evolution") {
    const SystemParams p = SystemParams::from_ratios(0.01, 0.1, 1.0);
    const std::vector<double> t = grid(5.0, 100);
    const LatticeSpec spec = LatticeSpec::for_times(p, 5.0, 4000);
    REQUIRE(recurrence_limit(p, spec) > 5.0);
    const QubitTrajectory a = evolve_exact(p, InitialState::qubit1(), t, spec);
    const QubitTrajectory b = trajectory(p, InitialState::qubit1(), t);
    double worst = 0.0;
    for (std::size_t i = 0; i < t.size(); ++i) {
        worst = std::max(worst, std::abs(a.rho_pp[i] - b.rho_pp[i]));
        worst = std::max(worst, std::abs(a.rho_mm[i] - b.rho_mm[i]));
    }
    CHECK(worst < 1e-3);
}

TEST_CASE("branch orthogonality probe") {
    const SystemParams p = SystemParams::from_ratios(0.01, 0.1, 1.0);
    LatticeSpec minimal;
    minimal.window_lo = p.omega - 20.0 * (2.0 * p.gamma_wg + p.gamma_res);
    minimal.window_hi = p.omega + 20.0 * (2.0 * p.gamma_wg + p.gamma_res);
    double last = 0.0;
    for (int n : {1000, 2000, 4000}) {
        minimal.n_wg = minimal.n_res = n;
        const double probe = orthogonality_probe(p, minimal);
        MESSAGE("probe N=", n, ": ", probe);
        if (last > 0.0) CHECK(probe <= 0.5 * last);
        last = probe;
    }
    CHECK(last < 1e-2);

    CHECK(orthogonality_probe(SystemParams::from_ratios(0.01, 0.0, 0.6), minimal) == 0.0);
}

TEST_CASE("lattice validation") {
    const SystemParams p = SystemParams::from_ratios(0.01, 0.1, 1.0);
    LatticeSpec s = LatticeSpec::for_times(p, 5.0);
    s.n_wg = 1;
    CHECK_THROWS_AS(s.validate(p), Error);
    s = LatticeSpec::for_times(p, 5.0);
    s.window_hi = p.omega + 0.1;
    CHECK_THROWS_AS(s.validate(p), Error);
    CHECK_THROWS_AS(evolve_exact(p, InitialState::qubit1(), std::vector<double>{1.0}, s), Error);
}

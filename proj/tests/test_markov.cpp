#include <doctest.h>

#include <cmath>
#include <vector>

#include "wqed/error.hpp"
#include "wqed/markov.hpp"

using namespace wqed;

namespace {

std::vector<double> grid(double hi, int n) {
    std::vector<double> t(n + 1);
    for (int i = 0; i <= n; ++i) t[i] = hi * i / n;
    return t;
}

}  // namespace

TEST_CASE("collective rates") {
    for (int n = 1; n <= 5; ++n) {
        const SystemParams p = SystemParams::from_ratios(0.01, 0.1, n);
        const MarkovRates r = markov_rates(p);
        CHECK(r.Gamma_minus == doctest::Approx(p.gamma_res).epsilon(1e-9));
        CHECK(r.Gamma_plus == doctest::Approx(p.gamma_res + 4.0 * p.gamma_wg).epsilon(1e-12));
        CHECK(std::abs(r.g) < 1e-12);
    }
    for (double dl : {0.13, 0.6, 1.37, 10.2}) {
        const SystemParams p = SystemParams::from_ratios(0.02, 0.3, dl);
        const MarkovRates r = markov_rates(p);
        CHECK(r.Gamma_plus + r.Gamma_minus ==
              doctest::Approx(2.0 * (p.gamma_res + 2.0 * p.gamma_wg)).epsilon(1e-14));
        CHECK(r.g == doctest::Approx(p.gamma_wg * std::sin(2.0 * std::numbers::pi * dl)).epsilon(1e-12));
    }
}

TEST_CASE("initial values") {
    const double t[] = {0.0};
    const QubitTrajectory m = markov_trajectory(SystemParams::from_ratios(0.01, 0.1, 0.6), t);
    CHECK(m.rho_pp[0] == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(m.rho_mm[0] == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(m.concurrence[0] == doctest::Approx(0.0));
}

TEST_CASE("resonant antisymmetric decay depends only on the loss rate") {
    const std::vector<double> t = grid(10.0, 50);
    for (double G : {0.05, 0.1, 1.0}) {
        const SystemParams p = SystemParams::from_ratios(1e-3, G, 1.0);
        const QubitTrajectory m = markov_trajectory(p, t);
        for (std::size_t i = 0; i < t.size(); ++i)
            CHECK(m.rho_mm[i] == doctest::Approx(0.5 * std::exp(-G * t[i])).epsilon(1e-12));
    }
}

TEST_CASE("concurrence follows from the density matrix") {
    const std::vector<double> t = grid(10.0, 50);
    for (const InitialState& init : {InitialState::qubit1(), InitialState::symmetric()}) {
        const QubitTrajectory m = markov_trajectory(SystemParams::from_ratios(0.01, 0.1, 0.37), t, init);
        for (std::size_t i = 0; i < t.size(); ++i)
            CHECK(m.concurrence[i] == concurrence(m.rho_pp[i], m.rho_mm[i], m.rho_pm[i]));
    }
}

TEST_CASE("deviation") {
    const std::vector<double> t = grid(5.0, 20);
    const SystemParams p = SystemParams::from_ratios(0.01, 0.1, 10.0);
    const QubitTrajectory m = markov_trajectory(p, t);
    CHECK(markov_deviation(m, m) == 0.0);

    const QubitTrajectory other = markov_trajectory(p, grid(5.0, 21));
    try {
        markov_deviation(m, other);
        FAIL("expected grid mismatch");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::GridMismatch);
    }
}

TEST_CASE("deviation from the exact dynamics") {
    const std::vector<double> t = grid(10.0, 100);
    const SystemParams weak = SystemParams::from_ratios(1e-3, 0.1, 1.0);
    CHECK(markov_deviation(trajectory(weak, InitialState::qubit1(), t), markov_trajectory(weak, t)) < 0.02);

    const SystemParams delayed = SystemParams::from_ratios(0.01, 0.1, 10.0);
    CHECK(markov_deviation(trajectory(delayed, InitialState::qubit1(), t),
                           markov_trajectory(delayed, t)) > 0.1);
}

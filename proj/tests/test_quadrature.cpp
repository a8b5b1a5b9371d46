#include <doctest.h>

#include <cmath>
#include <numbers>

#include "wqed/quadrature.hpp"

using namespace wqed;

// reference values from scipy.special.sici
TEST_CASE("sine and cosine integrals") {
    struct Ref {
        double x, si, ci;
    };
    const Ref refs[] = {
        {0.1, 0.09994446110827694, -1.7278683866572966},
        {1.0, 0.9460830703671831, 0.33740392290096816},
        {3.9, 1.7765013604478055, -0.12349934920781536},
        {4.1, 1.7387436264917688, -0.156165391828121},
        {10.0, 1.658347594218874, -0.04545643300445537},
        {100.0, 1.5622254668890563, -0.005148825142610493},
    };
    for (const Ref& r : refs) {
        CHECK(sine_integral(r.x) == doctest::Approx(r.si).epsilon(1e-13));
        CHECK(cosine_integral(r.x) == doctest::Approx(r.ci).epsilon(1e-12));
    }
    CHECK(sine_integral(0.0) == 0.0);
    CHECK(sine_integral(-1.0) == doctest::Approx(-0.9460830703671831).epsilon(1e-13));
    CHECK(sine_integral(1e6) == doctest::Approx(std::numbers::pi / 2).epsilon(1e-6));
}

TEST_CASE("oscillatory inverse-square tail") {
    // mpmath quadosc
    CHECK(inverse_square_tail(0.7, 3.0) == doctest::Approx(-0.2275008365039073).epsilon(1e-10));
    CHECK(inverse_square_tail(0.0, 3.0) == doctest::Approx(2.0 / 3.0).epsilon(1e-14));
    CHECK(inverse_square_tail(-0.7, 3.0) == inverse_square_tail(0.7, 3.0));
}

TEST_CASE("Gauss-Legendre rules") {
    for (int n : {1, 2, 8, 16, 32}) {
        const GaussRule& g = gauss_legendre(n);
        REQUIRE(g.x.size() == static_cast<std::size_t>(n));
        double w = 0.0;
        for (double v : g.w) w += v;
        CHECK(w == doctest::Approx(2.0).epsilon(1e-14));
        for (int k = 0; k < 2 * n; ++k) {
            double s = 0.0;
            for (int i = 0; i < n; ++i) s += g.w[i] * std::pow(g.x[i], k);
            const double exact = k % 2 ? 0.0 : 2.0 / (k + 1);
            CHECK(std::abs(s - exact) < 1e-13);
        }
        for (int i = 1; i < n; ++i) CHECK(g.x[i] > g.x[i - 1]);
    }
    CHECK(&gauss_legendre(16) == &gauss_legendre(16));
}

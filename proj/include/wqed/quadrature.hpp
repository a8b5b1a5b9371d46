// quadrature.hpp - Gauss-Legendre rules and the special functions needed for
// analytic tails of 1/u^2 spectral integrands.

#pragma once

#include <vector>

namespace wqed {

struct GaussRule {
    std::vector<double> x;  // nodes on [-1, 1], ascending
    std::vector<double> w;
};

/// n-point Gauss-Legendre rule, cached per n. Thread-safe.
const GaussRule& gauss_legendre(int n);

/// Si(x) = int_0^x sin(t)/t dt.
double sine_integral(double x);

/// Ci(x) = -int_x^inf cos(t)/t dt, x > 0.
double cosine_integral(double x);

/// int_{|u|>L} exp(i*k*u)/u^2 du for L > 0 (even in k, real).
double inverse_square_tail(double k, double L);

}  // namespace wqed

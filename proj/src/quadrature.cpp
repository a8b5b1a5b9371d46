#include "wqed/quadrature.hpp"

#include <cmath>
#include <complex>
#include <map>
#include <mutex>
#include <numbers>

#include "wqed/error.hpp"

namespace wqed {

namespace {

GaussRule make_rule(int n) {
    GaussRule r;
    r.x.resize(n);
    r.w.resize(n);
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = 0.0;
            for (int j = 0; j < n; ++j) {
                const double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * j + 1.0) * z * p1 - j * p2) / (j + 1.0);
            }
            dp = n * (z * p0 - p1) / (z * z - 1.0);
            const double dz = p0 / dp;
            z -= dz;
            if (std::abs(dz) < 1e-16) break;
        }
        const double w = 2.0 / ((1.0 - z * z) * dp * dp);
        r.x[i] = -z;
        r.x[n - 1 - i] = z;
        r.w[i] = w;
        r.w[n - 1 - i] = w;
    }
    return r;
}

}  // namespace

const GaussRule& gauss_legendre(int n) {
    if (n < 1 || n > 512) throw Error(ErrorCode::InvalidArgument, "unsupported Gauss order");
    static std::mutex mu;
    static std::map<int, GaussRule> cache;
    std::lock_guard lock(mu);
    auto it = cache.find(n);
    if (it == cache.end()) it = cache.emplace(n, make_rule(n)).first;
    return it->second;
}

namespace {

// e^{-ix} E1(ix) by the modified Lentz continued fraction, for x > 2.
std::complex<double> e1_scaled(double x) {
    using cplx = std::complex<double>;
    constexpr double tiny = 1e-300;
    cplx b(1.0, x);
    cplx c(1.0 / tiny, 0.0);
    cplx d = 1.0 / b;
    cplx h = d;
    for (int i = 2; i < 100000; ++i) {
        const double a = -double(i - 1) * double(i - 1);
        b += 2.0;
        d = 1.0 / (a * d + b);
        c = b + a / c;
        const cplx del = c * d;
        h *= del;
        if (std::abs(del.real() - 1.0) + std::abs(del.imag()) < 1e-16) break;
    }
    return h * cplx(std::cos(x), -std::sin(x));
}

}  // namespace

double sine_integral(double x) {
    if (x < 0.0) return -sine_integral(-x);
    if (x <= 4.0) {
        // power series; terms stay below ~2 in magnitude on [0, 4]
        double sum = 0.0;
        double term = x;  // x^(2k+1)/(2k+1)!
        for (int k = 0; k < 60; ++k) {
            const double add = term / (2 * k + 1);
            sum += (k % 2 == 0) ? add : -add;
            if (std::abs(add) < 1e-18 * std::abs(sum)) break;
            term *= x * x / ((2.0 * k + 2.0) * (2.0 * k + 3.0));
        }
        return sum;
    }
    return 0.5 * std::numbers::pi + e1_scaled(x).imag();
}

double cosine_integral(double x) {
    if (!(x > 0.0)) throw Error(ErrorCode::InvalidArgument, "Ci needs x > 0");
    if (x <= 4.0) {
        constexpr double euler = 0.57721566490153286061;
        double sum = 0.0;
        double term = 1.0;  // x^(2k)/(2k)!
        for (int k = 1; k < 60; ++k) {
            term *= x * x / ((2.0 * k - 1.0) * (2.0 * k));
            const double add = term / (2 * k);
            sum += (k % 2 == 1) ? -add : add;
            if (add < 1e-18) break;
        }
        return euler + std::log(x) + sum;
    }
    return -e1_scaled(x).real();
}

double inverse_square_tail(double k, double L) {
    if (!(L > 0.0)) throw Error(ErrorCode::InvalidArgument, "tail cutoff must be positive");
    const double ak = std::abs(k);
    // 2 * int_L^inf cos(k u)/u^2 du
    return 2.0 * (std::cos(ak * L) / L - ak * (0.5 * std::numbers::pi - sine_integral(ak * L)));
}

}  // namespace wqed

#include "spectral_engine.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <numbers>

#ifdef WQED_HAVE_OPENMP
#include <omp.h>
#endif

#include "detail.hpp"
#include "wqed/error.hpp"
#include "wqed/quadrature.hpp"

namespace wqed::detail {

namespace {

constexpr double kPi = std::numbers::pi;

// Retarded step with the symmetric value at 0 (principal-value convention of
// the truncated energy integral).
double half_step(double x) {
    if (x > 0.0) return 1.0;
    if (x < 0.0) return 0.0;
    return 0.5;
}

// 2*pi*i * exp(-i*(Omega + i*W)*T) * H(-T): transform of 1/(u - i*W).
cplx retarded_pole(double omega, double W, double T) {
    if (T > 0.0) return 0.0;
    return 2.0 * kPi * I * std::polar(std::exp(W * T), -omega * T) * half_step(-T);
}

}  // namespace

int worker_threads() {
    int n = 1;
#ifdef WQED_HAVE_OPENMP
    n = omp_get_max_threads();
#endif
    if (const char* env = std::getenv("WQED_THREADS")) {
        const int cap = std::atoi(env);
        if (cap > 0) n = std::min(n, cap);
    }
    return std::max(n, 1);
}

cplx collective_pole(const SystemParams& p, Subspace s) {
    const double h = eta(s);
    const double tau = p.delay();
    const double g = p.gamma_wg;
    const double W = p.amplitude_rate();
    const double phi = p.omega * tau;
    cplx z(p.omega + g * h * std::sin(phi), -(W + g * h * std::cos(phi)));
    const cplx guess = z;
    for (int it = 0; it < 60; ++it) {
        const cplx e = std::exp(I * z * tau);
        const cplx f = z - p.omega + I * (0.5 * p.gamma_res) + I * g * (1.0 + h * e);
        const cplx df = 1.0 - g * h * tau * e;
        if (std::abs(df) < 1e-300) break;
        const cplx dz = f / df;
        z -= dz;
        if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return guess;
        if (std::abs(dz) <= 1e-15 * (std::abs(z) + 1.0)) break;
    }
    if (z.imag() > 0.0) return guess;
    return z;
}

double SectorTransform::spectral_density(const SystemParams& p, Subspace s, double eps) {
    const cplx X = collective_factor(eta(s), eps * p.delay());
    const cplx D = cplx(eps - p.omega, 0.5 * p.gamma_res) + I * p.gamma_wg * X;
    const double num = p.gamma_wg * std::norm(X) + p.gamma_res * p.v() / p.v_g;
    return num / (2.0 * kPi * std::norm(D));
}

SectorTransform::SectorTransform(const SystemParams& p, Subspace s, const QuadratureSpec& q,
                                 double t_osc, int nodes_per_panel, bool fields)
    : p_(p), s_(s), eta_(eta(s)), W_(p.amplitude_rate()), tau_(p.delay()), fields_(fields) {
    const double g = p.gamma_wg;
    const double scale = std::max(2.0 * g + p.gamma_res, kPi * p.v_g / p.d);
    L_ = q.kappa * scale;
    // Leading neglected tail term is O(gamma^2 (W + gamma) / L^3).
    const double need = std::cbrt(g * g * (W_ + g) / (kPi * q.truncation_tol));
    L_ = std::max(L_, need);
    trunc_ = g * g * (W_ + g) / (kPi * L_ * L_ * L_);
    if (fields_) {
        const double V = p.coupling_wg();
        trunc_ = std::max(trunc_, V * g * g / (kPi * p.v_g * L_ * L_));
    }

    loc_weight_ = 0.0;
    if (const auto st = localized_state(p); p.lossless() && st && st->subspace == s)
        loc_weight_ = st->alpha * st->alpha;

    build_nodes(q, t_osc, nodes_per_panel);
}

double SectorTransform::residual_density(double eps) const {
    const double u = eps - p_.omega;
    return spectral_density(p_, s_, eps) - (W_ / kPi) / (u * u + W_ * W_);
}

void SectorTransform::build_nodes(const QuadratureSpec& q, double t_osc, int n) {
    const double lo = p_.omega - L_;
    const double hi = p_.omega + L_;
    std::vector<double> bp{lo, p_.omega, hi};
    if (q.layout == PanelLayout::PoleGraded) {
        const cplx z = collective_pole(p_, s_);
        const double w = std::abs(z.imag());
        if (w > 1e-14 * (p_.omega + p_.gamma_wg)) {
            bp.push_back(z.real());
            for (double h = w; h < 2.0 * L_; h *= 2.0) {
                bp.push_back(z.real() - h);
                bp.push_back(z.real() + h);
            }
        }
    }
    std::sort(bp.begin(), bp.end());
    std::vector<double> cuts;
    for (double b : bp) {
        if (b < lo || b > hi) continue;
        if (!cuts.empty() && b - cuts.back() <= 1e-12 * L_) continue;
        cuts.push_back(b);
    }
    if (cuts.back() < hi) cuts.back() = hi;

    const double h_max =
        std::min(2.0 * kPi * (double(n) / q.min_nodes_per_period) / t_osc, 0.25 * L_);
    const GaussRule& rule = gauss_legendre(n);

    struct Est {
        double value, magnitude;
    };
    auto gl = [&](double a, double b) {
        const double c = 0.5 * (a + b), r = 0.5 * (b - a);
        Est e{0.0, 0.0};
        for (int k = 0; k < n; ++k) {
            const double f = rule.w[k] * residual_density(c + r * rule.x[k]);
            e.value += f;
            e.magnitude += std::abs(f) + rule.w[k] * spectral_density(p_, s_, c + r * rule.x[k]);
        }
        e.value *= r;
        e.magnitude *= r;
        return e;
    };
    auto emit = [&](double a, double b) {
        const double c = 0.5 * (a + b), r = 0.5 * (b - a);
        for (int k = 0; k < n; ++k) {
            eps_.push_back(c + r * rule.x[k]);
            gk_.push_back(r * rule.w[k]);  // weight for now
        }
        ++panels_;
    };
    // Bisection until the two halves agree with the whole panel.
    // The magnitude term keeps rounding noise of the subtracted density from
    // driving the bisection.
    auto refine = [&](auto&& self, double a, double b, Est whole, int depth) -> void {
        const double m = 0.5 * (a + b);
        const Est left = gl(a, m);
        const Est right = gl(m, b);
        const double tol = q.refine_tol * (b - a) / (2.0 * L_) + 1e-13 * whole.magnitude;
        if (std::abs(left.value + right.value - whole.value) <= tol ||
            depth >= q.max_refine_depth) {
            emit(a, m);
            emit(m, b);
            return;
        }
        self(self, a, m, left, depth + 1);
        self(self, m, b, right, depth + 1);
    };

    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        const double a = cuts[i], b = cuts[i + 1];
        const int pieces = std::max(1, int(std::ceil((b - a) / h_max * (1.0 - 1e-12))));
        const double h = (b - a) / pieces;
        for (int k = 0; k < pieces; ++k) {
            const double pa = a + k * h;
            const double pb = (k + 1 == pieces) ? b : a + (k + 1) * h;
            refine(refine, pa, pb, gl(pa, pb), 0);
        }
    }

    const double V = p_.coupling_wg();
    const double K = p_.coupling_res();
    const double norm = 1.0 / (2.0 * kPi * p_.v_g);
    if (fields_) {
        gar_.resize(eps_.size());
        gai_.resize(eps_.size());
        gqr_.resize(eps_.size());
        gqi_.resize(eps_.size());
    }
    for (std::size_t k = 0; k < eps_.size(); ++k) {
        const double e = eps_[k];
        const double w = gk_[k];
        gk_[k] = w * residual_density(e);
        if (!fields_) continue;
        const double u = e - p_.omega;
        const cplx X = collective_factor(eta_, e * tau_);
        const cplx D = cplx(u, 0.5 * p_.gamma_res) + I * p_.gamma_wg * X;
        const cplx s = std::polar(1.0, 0.5 * e * tau_);
        const cplx sx = s * std::conj(X);  // s + eta*conj(s)
        const cplx ref_den(u, -W_);
        const cplx ga = w * norm * (V * sx / std::conj(D) - V * sx / ref_den);
        const cplx gq = w * norm * (K / std::conj(D) - K / ref_den);
        gar_[k] = ga.real();
        gai_[k] = ga.imag();
        gqr_[k] = gq.real();
        gqi_[k] = gq.imag();
    }
    // Nodes are stored relative to Omega so that phases u*T stay small.
    for (double& e : eps_) e -= p_.omega;
}

void SectorTransform::add_reference_and_tails(double T, cplx& k, cplx* fa, cplx* fq) const {
    const double om = p_.omega;
    const double g = p_.gamma_wg;
    const double h = eta_;
    auto tail = [&](double Tp) { return std::polar(inverse_square_tail(Tp, L_), -om * Tp); };

    k += std::polar(std::exp(-W_ * std::abs(T)), -om * T);
    k += (g * h / (2.0 * kPi)) * (tail(T - tau_) + tail(T + tau_));
    if (loc_weight_ > 0.0) k += loc_weight_ * std::polar(1.0, -om * T);

    if (!fields_) return;
    const double V = p_.coupling_wg();
    const double K = p_.coupling_res();
    const double vg = p_.v_g;
    const double half = 0.5 * tau_;
    *fa += (V / (2.0 * kPi * vg)) *
           (retarded_pole(om, W_, T - half) + h * retarded_pole(om, W_, T + half));
    *fa += (I * g * V / (2.0 * kPi * vg)) * (h * tail(T + half) + tail(T + 3.0 * half));
    *fq += (K / (2.0 * kPi * vg)) * retarded_pole(om, W_, T);
    *fq += (I * g * h * K / (2.0 * kPi * vg)) * tail(T + tau_);
}

namespace {

constexpr std::size_t kBlock = 2048;        // nodes per partial sum
constexpr std::size_t kReseed = 64;         // recurrence steps between exact phases
constexpr std::size_t kMinProgression = 12;

bool is_progression(std::span<const double> T) {
    if (T.size() < kMinProgression) return false;
    const double dT = (T.back() - T.front()) / double(T.size() - 1);
    if (dT == 0.0) return false;
    const double tol = 1e-13 * (std::abs(T.front()) + std::abs(T.back()) + std::abs(dT));
    for (std::size_t i = 0; i < T.size(); ++i)
        if (std::abs(T[i] - (T.front() + double(i) * dT)) > tol) return false;
    return true;
}

}  // namespace

void SectorTransform::finish(double t, const double* sums, cplx& kern, cplx& fa, cplx& fq) const {
    // carrier exp(-i*Omega*T) of the node sums
    const cplx carrier = std::polar(1.0, -p_.omega * t);
    kern = carrier * cplx(sums[0], sums[1]);
    fa = fields_ ? carrier * cplx(sums[2], sums[3]) : 0.0;
    fq = fields_ ? carrier * cplx(sums[4], sums[5]) : 0.0;
    add_reference_and_tails(t, kern, &fa, &fq);
}

void SectorTransform::evaluate(std::span<const double> T, SectorOutputs& out) const {
    const std::size_t n = T.size();
    out.kernel.assign(n, 0.0);
    if (fields_) {
        out.falpha.assign(n, 0.0);
        out.fres.assign(n, 0.0);
    } else {
        out.falpha.clear();
        out.fres.clear();
    }
    if (n == 0) return;
    if (is_progression(T)) {
        evaluate_progression(T.front(), (T.back() - T.front()) / double(n - 1), n, out);
        return;
    }
    const std::size_t m = eps_.size();
    const long long nn = static_cast<long long>(n);
    // Each output is reduced over nodes in ascending order by one thread, so
    // results do not depend on the thread count.
#ifdef WQED_HAVE_OPENMP
#pragma omp parallel for schedule(static) num_threads(worker_threads())
#endif
    for (long long i = 0; i < nn; ++i) {
        const double t = T[i];
        double sums[6] = {0.0, 0.0, 0.0, 0.0, 0.0, 0.0};
        for (std::size_t k = 0; k < m; ++k) {
            const double ph = eps_[k] * t;
            const double c = std::cos(ph), s = -std::sin(ph);
            sums[0] += gk_[k] * c;
            sums[1] += gk_[k] * s;
            if (fields_) {
                sums[2] += gar_[k] * c - gai_[k] * s;
                sums[3] += gar_[k] * s + gai_[k] * c;
                sums[4] += gqr_[k] * c - gqi_[k] * s;
                sums[5] += gqr_[k] * s + gqi_[k] * c;
            }
        }
        cplx kern, fa, fq;
        finish(t, sums, kern, fa, fq);
        out.kernel[i] = kern;
        if (fields_) {
            out.falpha[i] = fa;
            out.fres[i] = fq;
        }
    }
}

// Equally spaced times: exp(-i u T) advances by one complex multiply per
// step, with exact phases every kReseed steps. Nodes are split in fixed
// blocks whose partial sums are added in block order.
void SectorTransform::evaluate_progression(double T0, double dT, std::size_t n,
                                           SectorOutputs& out) const {
    const std::size_t m = eps_.size();
    const std::size_t nb = (m + kBlock - 1) / kBlock;
    constexpr std::size_t nc = 6;
    std::vector<double> part(nb * n * nc, 0.0);
    const long long nbl = static_cast<long long>(nb);
#ifdef WQED_HAVE_OPENMP
#pragma omp parallel for schedule(static) num_threads(worker_threads())
#endif
    for (long long b = 0; b < nbl; ++b) {
        const std::size_t k0 = std::size_t(b) * kBlock;
        const std::size_t len = std::min(kBlock, m - k0);
        const double* u = eps_.data() + k0;
        const double* gk = gk_.data() + k0;
        std::vector<double> zr(len), zi(len), rr(len), ri(len);
        for (std::size_t k = 0; k < len; ++k) {
            rr[k] = std::cos(u[k] * dT);
            ri[k] = -std::sin(u[k] * dT);
        }
        for (std::size_t i = 0; i < n; ++i) {
            if (i % kReseed == 0) {
                const double t = T0 + double(i) * dT;
                for (std::size_t k = 0; k < len; ++k) {
                    zr[k] = std::cos(u[k] * t);
                    zi[k] = -std::sin(u[k] * t);
                }
            } else {
#pragma omp simd
                for (std::size_t k = 0; k < len; ++k) {
                    const double a = zr[k] * rr[k] - zi[k] * ri[k];
                    zi[k] = zr[k] * ri[k] + zi[k] * rr[k];
                    zr[k] = a;
                }
            }
            double* dst = part.data() + (std::size_t(b) * n + i) * nc;
            double s0 = 0.0, s1 = 0.0;
#pragma omp simd reduction(+ : s0, s1)
            for (std::size_t k = 0; k < len; ++k) {
                s0 += gk[k] * zr[k];
                s1 += gk[k] * zi[k];
            }
            dst[0] = s0;
            dst[1] = s1;
            if (!fields_) continue;
            const double* ar = gar_.data() + k0;
            const double* ai = gai_.data() + k0;
            const double* qr = gqr_.data() + k0;
            const double* qi = gqi_.data() + k0;
            double s2 = 0.0, s3 = 0.0, s4 = 0.0, s5 = 0.0;
#pragma omp simd reduction(+ : s2, s3, s4, s5)
            for (std::size_t k = 0; k < len; ++k) {
                s2 += ar[k] * zr[k] - ai[k] * zi[k];
                s3 += ar[k] * zi[k] + ai[k] * zr[k];
                s4 += qr[k] * zr[k] - qi[k] * zi[k];
                s5 += qr[k] * zi[k] + qi[k] * zr[k];
            }
            dst[2] = s2;
            dst[3] = s3;
            dst[4] = s4;
            dst[5] = s5;
        }
    }
    for (std::size_t i = 0; i < n; ++i) {
        double sums[nc] = {0.0, 0.0, 0.0, 0.0, 0.0, 0.0};
        for (std::size_t b = 0; b < nb; ++b)
            for (std::size_t c = 0; c < nc; ++c) sums[c] += part[(b * n + i) * nc + c];
        const double t = T0 + double(i) * dT;
        cplx kern, fa, fq;
        finish(t, sums, kern, fa, fq);
        out.kernel[i] = kern;
        if (fields_) {
            out.falpha[i] = fa;
            out.fres[i] = fq;
        }
    }
}

cplx SectorTransform::kernel(double T) const {
    SectorOutputs o;
    const double t[1] = {T};
    evaluate(t, o);
    return o.kernel[0];
}

double SectorTransform::continuum_weight() const {
    double sum = 0.0;
    for (double g : gk_) sum += g;
    cplx k = sum;
    cplx dummy_a = 0.0, dummy_q = 0.0;
    add_reference_and_tails(0.0, k, &dummy_a, &dummy_q);
    return k.real() - loc_weight_;
}

}  // namespace wqed::detail

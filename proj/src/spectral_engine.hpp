// Per-sector spectral transforms.
//
// For one subspace j the engine holds a Gauss-Legendre node set on
// [Omega - L, Omega + L] and evaluates, for arbitrary retarded time T,
//
//   kernel(T) = int A_j(eps) exp(-i eps T) d eps          (+ bound-state term)
//   falpha(T) = int conj(alpha_S) exp(-i eps T) d eps / (2 pi v_g)
//   fres(T)   = int conj(alpha_Q) exp(-i eps T) d eps / (2 pi v_g)
//
// with A_j = (|alpha_S|^2 + |alpha_Q|^2) / (2 pi v_g). Each integrand is split
// into a reference with a closed-form transform over the whole real line, a
// residual integrated numerically inside the window and an analytic 1/u^2
// tail outside it.

#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "wqed/eigenstates.hpp"
#include "wqed/model.hpp"
#include "wqed/spectral.hpp"

namespace wqed::detail {

struct SectorOutputs {
    std::vector<cplx> kernel;
    std::vector<cplx> falpha;
    std::vector<cplx> fres;
};

class SectorTransform {
public:
    SectorTransform(const SystemParams& p, Subspace s, const QuadratureSpec& q, double t_osc,
                    int nodes_per_panel, bool fields);

    /// Spectral density A_j(eps) summed over both branches.
    static double spectral_density(const SystemParams& p, Subspace s, double eps);

    /// Equally spaced T (12 or more) use a phase recurrence; the summation
    /// order is fixed either way and independent of the thread count.
    void evaluate(std::span<const double> T, SectorOutputs& out) const;
    cplx kernel(double T) const;

    /// int A_j over the real line, continuum only.
    double continuum_weight() const;
    /// Weight of the discrete bound state in this sector (0 if none).
    double localized_weight() const { return loc_weight_; }

    std::size_t nodes() const { return eps_.size(); }
    std::size_t panels() const { return panels_; }
    double half_width() const { return L_; }
    double truncation_estimate() const { return trunc_; }

private:
    void build_nodes(const QuadratureSpec& q, double t_osc, int n);
    double residual_density(double eps) const;
    void add_reference_and_tails(double T, cplx& k, cplx* fa, cplx* fq) const;
    void finish(double t, const double* sums, cplx& kern, cplx& fa, cplx& fq) const;
    void evaluate_progression(double T0, double dT, std::size_t n, SectorOutputs& out) const;

    SystemParams p_;
    Subspace s_;
    int eta_;
    double W_, tau_, L_, trunc_, loc_weight_;
    bool fields_;
    std::size_t panels_ = 0;
    std::vector<double> eps_;
    std::vector<double> gk_;
    std::vector<double> gar_, gai_, gqr_, gqi_;
};

/// Zero of eps - Omega + i Gamma/2 + i gamma (1 + eta exp(i eps tau)) nearest to
/// the Markov estimate (lower half plane).
cplx collective_pole(const SystemParams& p, Subspace s);

/// Number of worker threads for transform evaluation (WQED_THREADS caps it).
int worker_threads();

}  // namespace wqed::detail

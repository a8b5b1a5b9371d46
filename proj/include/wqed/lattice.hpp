// lattice.hpp - brute-force reference: the continuum is replaced by a finite
// set of energy modes (star discretization) and the single-excitation
// Hamiltonian is diagonalized exactly.

#pragma once

#include <span>
#include <vector>

#include <Eigen/Dense>

#include "wqed/model.hpp"
#include "wqed/spectral.hpp"

namespace wqed {

/// Secular: every mode couples to the qubit only, so after gauging away the
/// coupling phases each subspace is a real arrowhead matrix whose eigenvalues
/// solve a secular equation exactly; the qubit component of each eigenvector
/// follows in closed form. Dense: Eigen's Hermitian solver on the full matrix
/// (O(N^3), for cross-checks at modest N).
enum class LatticeSolver { Secular, Dense };

struct LatticeSpec {
    int n_wg = 4000;   // waveguide modes per subspace
    int n_res = 4000;  // reservoir modes per qubit
    double window_lo = 0.0;
    double window_hi = 2.0;
    LatticeSolver solver = LatticeSolver::Secular;

    double spacing() const { return (window_hi - window_lo) / n_wg; }
    double reservoir_spacing() const { return (window_hi - window_lo) / n_res; }
    /// Energy of waveguide mode n (cell midpoints).
    double mode_energy(int n) const { return window_lo + (n + 0.5) * spacing(); }
    double reservoir_energy(int m) const { return window_lo + (m + 0.5) * reservoir_spacing(); }

    /// Window centred on Omega with spacing 0.9*pi/t_max, so that the
    /// finite-size recurrence stays beyond 2 t_max. The window never shrinks
    /// below Omega +- 20 (2 gamma + Gamma).
    static LatticeSpec for_times(const SystemParams& p, double gamma_t_max, int n_wg = 4000);

    /// Throws Error(InvalidArgument) for N < 2 or a window not covering
    /// Omega +- 20 (2 gamma + Gamma).
    void validate(const SystemParams& p) const;
};

/// Latest gamma*t for which results are free of recurrences: pi/spacing.
double recurrence_limit(const SystemParams& p, const LatticeSpec& spec);

/// Full (1 + N_wg + N_res) Hermitian matrix of one subspace, ordered qubit,
/// waveguide modes, reservoir modes.
Eigen::MatrixXcd build_hamiltonian(const SystemParams& p, Subspace s, const LatticeSpec& spec);

/// Eigenvalues and qubit weights |<k|qubit>|^2 of one subspace, ascending.
/// Modes that do not couple to the qubit are omitted by the secular solver.
struct LatticeSpectrum {
    std::vector<double> energy;
    std::vector<double> weight;
};

LatticeSpectrum lattice_spectrum(const SystemParams& p, Subspace s, const LatticeSpec& spec);

struct LatticeDiagnostics {
    /// max |1 - sum of all mode probabilities| over the checked times.
    double unitarity_error = 0.0;
    double recurrence_gamma_t = 0.0;
};

/// Qubit trajectory from exact diagonalization per subspace. Times are gamma*t.
QubitTrajectory evolve_exact(const SystemParams& p, const InitialState& init,
                             std::span<const double> gamma_t, const LatticeSpec& spec,
                             LatticeDiagnostics* diag = nullptr);

/// Largest deviation, relative to the peak, between the lattice qubit
/// spectral weight per unit energy and the sum of both analytic branch
/// densities (|alpha_S|^2 + |alpha_Q|^2)/(2 pi v_g), over Omega +- 10 (2 gamma
/// + Gamma). Any overlap between the scattering and loss branches would add a
/// cross term and show up as a mismatch. The analytic side uses the continuum
/// restricted to the lattice window, so only the discretization is probed.
/// Returns 0 for Gamma = 0, where only one branch exists.
double orthogonality_probe(const SystemParams& p, const LatticeSpec& spec);

}  // namespace wqed

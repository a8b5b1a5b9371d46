// spectral.hpp - time evolution by the closure relation over both eigenstate
// branches (plus the discrete bound state when the system is lossless and
// resonant).
//
// All public times are dimensionless gamma*t; positions are x/lambda.

#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "wqed/eigenstates.hpp"
#include "wqed/model.hpp"

namespace wqed {

struct InitialState {
    cplx c1{1.0, 0.0};  // amplitude of sigma_1^dagger |0>
    cplx c2{0.0, 0.0};  // amplitude of sigma_2^dagger |0>

    static InitialState qubit1() { return {}; }
    static InitialState symmetric();
    static InitialState antisymmetric();

    /// <sigma_j|Phi(0)> for the even (j=e) or odd (j=o) collective qubit state.
    cplx projection(Subspace s) const;
    void validate() const;
};

enum class PanelLayout { PoleGraded, Uniform };

struct QuadratureSpec {
    /// Energy window half-width in units of max(2*gamma + Gamma, pi*v_g/d).
    double kappa = 25.0;
    int nodes_per_panel = 16;
    PanelLayout layout = PanelLayout::PoleGraded;
    /// Largest gamma*t the node set must resolve; 0 means "derive from the
    /// requested times".
    double gamma_t_max = 0.0;
    double min_nodes_per_period = 8.0;
    /// Absolute tolerance of the adaptive panel refinement (spectral weight).
    double refine_tol = 1e-10;
    int max_refine_depth = 24;
    /// The window is widened until the analytic tail-error estimate is below
    /// this value.
    double truncation_tol = 1e-8;
    /// Re-run with doubled nodes per panel and compare.
    bool check_convergence = true;
    double convergence_tol = 1e-4;

    void validate() const;
};

struct QuadratureReport {
    std::array<std::size_t, 2> nodes{};  // indexed even, odd
    std::array<std::size_t, 2> panels{};
    double window_half_width = 0.0;      // energy units
    double truncation_estimate = 0.0;
    /// Largest change of any output under node doubling (negative if not run).
    double quadrature_error = -1.0;
    bool converged = true;
};

/// conj(alpha) * <sigma_j|Phi(0)>: overlap of an eigenstate with a purely
/// excitonic initial state.
cplx qubit_overlap(const EigenCoeffs& coeffs, const InitialState& init, Subspace s);

struct ClosureReport {
    std::array<double, 2> total{};       // continuum + bound state
    std::array<double, 2> continuum{};   // both branches, no bound state
    std::array<double, 2> localized{};   // bound-state weight (0 if none)
    std::array<double, 2> quadrature_error{};
    std::array<double, 2> truncation_estimate{};
    std::array<std::size_t, 2> nodes{};
    double window_half_width = 0.0;

    double value(Subspace s) const { return total[s == Subspace::Even ? 0 : 1]; }
};

/// Sum over branches of int |alpha|^2 d(eps)/(2*pi*v_g), per sector.
ClosureReport closure_check(const SystemParams& p, const QuadratureSpec& quad = {});

struct QubitAmplitudes {
    std::vector<double> gamma_t;
    std::vector<cplx> even;  // <sigma_e|Phi(t)>
    std::vector<cplx> odd;   // <sigma_o|Phi(t)>
    QuadratureReport report;
};

QubitAmplitudes evolve_qubit_amplitudes(const SystemParams& p, const InitialState& init,
                                        std::span<const double> gamma_t,
                                        const QuadratureSpec& quad = {});

struct QubitTrajectory {
    std::vector<double> gamma_t;
    std::vector<double> rho_pp;
    std::vector<double> rho_mm;
    std::vector<cplx> rho_pm;
    std::vector<double> concurrence;
    std::optional<QuadratureReport> report;

    std::size_t size() const { return gamma_t.size(); }
};

/// Reduced single-excitation concurrence
/// C = 1/2 sqrt((rho_pp - rho_mm)^2 + 4 Im(rho_pm)^2).
double concurrence(double rho_pp, double rho_mm, cplx rho_pm);

QubitTrajectory trajectory_from_amplitudes(const QubitAmplitudes& amps);

QubitTrajectory trajectory(const SystemParams& p, const InitialState& init,
                           std::span<const double> gamma_t, const QuadratureSpec& quad = {});

enum class ReservoirMode { Balance, Explicit };

struct FieldSnapshot {
    double gamma_t = 0.0;
    std::vector<double> x_over_lambda;
    /// |phi_R(x)|^2 + |phi_L(x)|^2, probability per wavelength.
    std::vector<double> density;
    /// 2 Re(phi_R conj(phi_L)) per wavelength: the fringe term that the full
    /// field intensity |phi_R + phi_L|^2 adds to the density. Nonzero only
    /// where counter-propagating waves overlap.
    std::vector<double> interference;
    double qubit_even = 0.0;  // rho_++
    double qubit_odd = 0.0;   // rho_--
    double waveguide_probability = 0.0;
    double reservoir_probability = 0.0;
    ReservoirMode reservoir_mode = ReservoirMode::Balance;
    QuadratureReport report;
};

FieldSnapshot field_snapshot(const SystemParams& p, const InitialState& init, double gamma_t,
                             std::span<const double> x_over_lambda,
                             const QuadratureSpec& quad = {},
                             ReservoirMode reservoir = ReservoirMode::Balance);

/// Qubits + waveguide + reservoir.
double total_probability(const FieldSnapshot& snap);

struct ProbabilityBudget {
    double gamma_t = 0.0;
    double qubit = 0.0;
    double waveguide = 0.0;
    double reservoir = 0.0;  // from the reconstructed reservoir wavefunction

    double total() const { return qubit + waveguide + reservoir; }
};

/// Probability bookkeeping at many times sharing one spectral evaluation.
/// Waveguide and reservoir parts are integrated from the reconstructed photon
/// wavefunctions, never from the balance.
std::vector<ProbabilityBudget> probability_budget(const SystemParams& p,
                                                  const InitialState& init,
                                                  std::span<const double> gamma_t,
                                                  const QuadratureSpec& quad = {});

}  // namespace wqed

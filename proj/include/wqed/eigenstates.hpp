// eigenstates.hpp - closed-form single-excitation eigenstates.
//
// In each mirror sector the photon wavefunction is a piecewise plane wave
// exp(i*eps*x/v_g) with amplitude A (x < -d/2), t0 (|x| < d/2) and t1
// (x > d/2); the reservoir wavefunction is exp(i*eps*z/v) with amplitude a
// (z < 0) and b (z > 0). Continuum states are normalized as
// <eps|eps'> = 2*pi*v_g * delta(eps - eps').

#pragma once

#include <complex>
#include <optional>

#include "wqed/model.hpp"

namespace wqed {

using cplx = std::complex<double>;

struct EigenCoeffs {
    double energy = 0.0;
    Subspace subspace = Subspace::Even;
    Branch branch = Branch::Scattering;
    cplx A{1.0, 0.0};
    cplx t0{};
    cplx t1{};
    cplx a{};
    cplx b{};
    cplx alpha{};
};

/// Discrete bound state of the lossless system at eps = Omega. The photon
/// lives only between the qubits.
struct LocalizedState {
    Subspace subspace = Subspace::Odd;
    double alpha = 0.0;  // real, positive
    cplx t0{};
    double energy = 0.0;
};

// -- lossless -----------------------------------------------------------------

/// Scattering branch (A = 1) of the lossless Hamiltonian; gamma_res is
/// ignored. Throws Error(LocalizedPole) at eps = Omega in the resonant sector
/// of a resonant separation.
EigenCoeffs scattering_coeffs(const SystemParams& p, Subspace s, double eps);

std::optional<LocalizedState> localized_state(const SystemParams& p);

/// Qubit weight of the bound state, 1/(1 + gamma*d/v_g).
/// Throws Error(OffResonant) if d is not resonant.
double localized_fraction(const SystemParams& p);

struct Transmission {
    cplx t;
    cplx r;
};

/// Physical transmission and reflection of a right-incident photon in the
/// lossless system. At the bound-state energy the removable limit of the
/// sector amplitudes is used.
Transmission physical_transmission(const SystemParams& p, double eps);

// -- lossy --------------------------------------------------------------------

/// Scattering branch (A = 1, a = 0) with reservoir loss. Falls back to the
/// lossless branch when gamma_res = 0.
EigenCoeffs scattering_coeffs_lossy(const SystemParams& p, Subspace s, double eps);

/// Quasi-localized branch (A = 0, a = 1). Requires gamma_res > 0.
EigenCoeffs quasi_localized_coeffs(const SystemParams& p, Subspace s, double eps);

struct FluxBalance {
    double in = 0.0;
    double out = 0.0;
};

FluxBalance branch_flux_check(const EigenCoeffs& c, const SystemParams& p);

/// Residual of the stationary Schroedinger equations (jump conditions at the
/// two qubits and at the reservoir contact, plus the qubit equation). Zero
/// for an exact eigenstate.
double eigen_residual(const SystemParams& p, const EigenCoeffs& c);

}  // namespace wqed

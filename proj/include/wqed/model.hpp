// model.hpp - physical parameters of two qubits on a 1D waveguide with
// independent unidirectional loss reservoirs.
//
// Units: hbar = 1. The default construction uses Omega = 1 and v_g = 1, so
// energies are in units of Omega and the qubit wavelength is 2*pi.

#pragma once

#include <cmath>
#include <numbers>
#include <optional>
#include <string>

namespace wqed {

/// Mirror-symmetry sector. The underlying value is the parity sign eta.
enum class Subspace : int { Even = 1, Odd = -1 };

constexpr int eta(Subspace s) { return static_cast<int>(s); }

constexpr const char* to_string(Subspace s) {
    return s == Subspace::Even ? "even" : "odd";
}

inline constexpr Subspace kSubspaces[] = {Subspace::Even, Subspace::Odd};

enum class Branch { Scattering, QuasiLocalized };

constexpr const char* to_string(Branch b) {
    return b == Branch::Scattering ? "scattering" : "quasi-localized";
}

inline constexpr double kResonanceTolerance = 1e-9;

struct SystemParams {
    double omega = 1.0;      // qubit transition frequency
    double gamma_wg = 0.01;  // decay rate into one waveguide direction
    double gamma_res = 0.001;  // decay rate into the reservoir
    double d = 2.0 * std::numbers::pi;  // qubit separation
    double v_g = 1.0;        // waveguide group velocity

    /// Builds parameters from the dimensionless ratios used on figure axes:
    /// gamma/Omega, Gamma/gamma and d/lambda.
    static SystemParams from_ratios(double gamma_over_omega, double Gamma_over_gamma,
                                    double d_over_lambda, double omega = 1.0,
                                    double v_g = 1.0);

    /// Throws Error(InvalidArgument) when a field is out of range.
    void validate() const;

    /// Reservoir group velocity; always equal to v_g.
    double v() const { return v_g; }
    double wavelength() const { return 2.0 * std::numbers::pi * v_g / omega; }
    double coupling_wg() const { return std::sqrt(gamma_wg * v_g); }
    double coupling_res() const { return std::sqrt(gamma_res * v()); }
    /// Photon transit time between the qubits.
    double delay() const { return d / v_g; }
    /// Single-emitter amplitude decay rate gamma + Gamma/2.
    double amplitude_rate() const { return gamma_wg + 0.5 * gamma_res; }
    bool lossless() const { return gamma_res == 0.0; }

    double d_over_lambda() const { return d / wavelength(); }
    double gamma_over_omega() const { return gamma_wg / omega; }

    std::string describe() const;
};

double wavelength(const SystemParams& p);

/// Returns n >= 1 when |d - n*lambda/2| <= tol*lambda.
std::optional<int> resonance_order(const SystemParams& p,
                                   double tol = kResonanceTolerance);

/// Sector holding the bound state at d = n*lambda/2: the one with
/// 1 + eta*(-1)^n = 0.
Subspace resonant_subspace(int n);

/// Sector holding the bound state, if d is resonant.
std::optional<Subspace> localized_subspace(const SystemParams& p,
                                           double tol = kResonanceTolerance);

/// (2*gamma + Gamma)/Gamma. Throws Error(Undefined) for Gamma = 0.
double purcell_factor(const SystemParams& p);

/// 2*gamma/(2*gamma + Gamma).
double beta_factor(const SystemParams& p);

}  // namespace wqed

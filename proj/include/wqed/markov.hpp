// markov.hpp - Markovian collective decay of the two qubits.
//
// Gamma_pm = Gamma + 2 gamma (1 +- cos kd), g = gamma sin kd, k = 2 pi/lambda.

#pragma once

#include <span>

#include "wqed/model.hpp"
#include "wqed/spectral.hpp"

namespace wqed {

struct MarkovRates {
    double Gamma_plus = 0.0;   // population decay of the symmetric state
    double Gamma_minus = 0.0;  // population decay of the antisymmetric state
    double g = 0.0;            // coherent exchange
};

MarkovRates markov_rates(const SystemParams& p);

/// rho_pp = |c_e|^2 exp(-Gamma_+ t), rho_mm = |c_o|^2 exp(-Gamma_- t),
/// rho_pm = c_e conj(c_o) exp(-(Gamma + 2 gamma) t) exp(-2 i g t).
/// Times are gamma*t.
QubitTrajectory markov_trajectory(const SystemParams& p, std::span<const double> gamma_t,
                                  const InitialState& init = InitialState::qubit1());

/// max_t |d rho_pp| + |d rho_mm| + |d C|. Throws Error(GridMismatch) unless
/// both trajectories share the same time grid.
double markov_deviation(const QubitTrajectory& numeric, const QubitTrajectory& markov);

}  // namespace wqed

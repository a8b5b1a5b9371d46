"""Two qubits coupled through a 1D waveguide with reservoir losses."""

from ._core import (
    Error,
    InitialState,
    QuadratureSpec,
    Subspace,
    SystemParams,
    beta_factor,
    closure_check,
    field_snapshot,
    lattice_trajectory,
    localized_fraction,
    markov_deviation,
    markov_trajectory,
    purcell_factor,
    resonance_order,
    trajectory,
    transmission,
)

__version__ = "0.1.0"

"""Exact propagators and pulse synthesis for a driven two-qubit anisotropic Ising pair."""
from .errors import *  # noqa: F401,F403
from .model import PhysicalParams, DerivedParams, derive, spectrum, eigenbasis
from .states import TwoQubitState, bell_state, computational_state
from .evolution import (
    UnitaryBell, propagator, spectral_oracle, sector, compose, compose_all, adjoint, apply,
    evolve_sequence, classify_form, equal_up_to_phase,
)
from .synthesis import (
    PulseSpec, TwoPulseSpec, loop_one_pulse, search_loop_selectors, exchange_two_pulse,
    exchange_solutions, solve_xi, feasibility_map, general_diagonal, general_antidiag,
    diagonal_form, antidiagonal_form,
)
from .entanglement import (
    concurrence, bell_concurrence_closed, tuning_field_commensurate, amplitude_maximizing_field,
    selective_fields,
)
from .geometry import (
    ChartPoint, chart_state, chart_concurrence, project_magnitude, project_real, fold_chart,
    sample_trajectory,
)
from .gates import to_computational, to_bell, verify_equivalences, teleport

__version__ = "0.1.0"

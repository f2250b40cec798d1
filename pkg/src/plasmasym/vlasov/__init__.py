"""1D1V multi-species Vlasov-Poisson solver, moments and symmetry flows."""

from .diagnostics import (
    UNDERSHOOT_TOLERANCE,
    HistoryError,
    MomentVector,
    ampere_series,
    moment_residual,
    moments,
    undershoot,
)
from .solver import CflError, VlasovError, advection_bound, run, step
from .spline import spline_shift
from .state import (
    NeutralityError,
    PhaseSpaceGrid,
    PhaseSpaceState,
    SpeciesSpec,
    initial_state,
    poisson_field,
)
from .transforms import GENERATORS, TransformError, apply_finite_transform, transform_history

__all__ = [
    "CflError", "GENERATORS", "HistoryError", "MomentVector", "NeutralityError", "PhaseSpaceGrid",
    "PhaseSpaceState", "SpeciesSpec", "TransformError", "UNDERSHOOT_TOLERANCE", "VlasovError",
    "advection_bound", "ampere_series", "apply_finite_transform", "initial_state", "moment_residual",
    "moments", "poisson_field", "run", "spline_shift", "step", "transform_history", "undershoot",
]

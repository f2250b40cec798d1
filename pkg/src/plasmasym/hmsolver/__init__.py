"""Numerical drift-wave solvers: the reduced (t, y) system and the 2D model."""

from .frequency import FrequencyError, FrequencyEstimate, measure_frequency
from .reduced import (
    HmExactParams,
    InstabilityError,
    ReducedHmState,
    SingularityError,
    SolverError,
    StepBoundError,
    consistency,
    exact_error,
    mode_amplitude,
    run_reduced,
    seed_exact,
    seed_profile,
    step_reduced,
)
from .spectral2d import (
    DealiasError,
    Grid2D,
    Hm2DSolver,
    Spectral2DState,
    hm_invariants,
    random_state,
    shear_flow_state,
    state_from_phi,
    step_2d,
)

__all__ = [
    "DealiasError", "FrequencyError", "FrequencyEstimate", "Grid2D", "Hm2DSolver", "HmExactParams",
    "InstabilityError", "ReducedHmState", "SingularityError", "SolverError", "Spectral2DState",
    "StepBoundError", "consistency", "exact_error", "hm_invariants", "measure_frequency",
    "mode_amplitude", "random_state", "run_reduced", "seed_exact", "seed_profile", "shear_flow_state",
    "state_from_phi", "step_2d", "step_reduced",
]

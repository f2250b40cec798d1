"""Charge-density mixing of equal charge-to-mass species and species reduction."""

from .core import (
    NUMERIC_MIXING,
    InvarianceReport,
    NoEligiblePairError,
    QmMismatchError,
    ReductionResult,
    charge_density_invariance,
    exp_family_transform,
    extended_transform,
    find_equal_qm_pair,
    linear_combination_residual,
    reduce_equal_qm,
    reduction_equivalence,
)

__all__ = [
    "InvarianceReport", "NUMERIC_MIXING", "NoEligiblePairError", "QmMismatchError", "ReductionResult",
    "charge_density_invariance", "exp_family_transform", "extended_transform", "find_equal_qm_pair",
    "linear_combination_residual", "reduce_equal_qm", "reduction_equivalence",
]

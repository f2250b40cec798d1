"""Lie point symmetry verification by prolongation and on-shell reduction."""

from .catalogue import (
    build_moment_system,
    build_paper_generator,
    emhd_system,
    hm_system,
    kinetic_system,
    reduced_hm_system,
)
from .core import (
    NOT_A_SYMMETRY,
    SYMMETRY,
    Generator,
    ProlongationError,
    ProlongedGenerator,
    ScopeMismatchError,
    SymmetryReport,
    check_conditional_symmetry,
    check_symmetry,
    commutator,
    parse_generators,
    prolong,
)

__all__ = [
    "Generator", "NOT_A_SYMMETRY", "ProlongationError", "ProlongedGenerator", "SYMMETRY",
    "ScopeMismatchError", "SymmetryReport", "build_moment_system", "build_paper_generator",
    "check_conditional_symmetry", "check_symmetry", "commutator", "emhd_system", "hm_system",
    "kinetic_system", "parse_generators", "prolong", "reduced_hm_system",
]

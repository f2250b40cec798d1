"""Extended symmetries of plasmas with two equal charge-to-mass species.

Species 1 and 2 enter the field equations only through e1 f1 + e2 f2, and
with e1/m1 = e2/m2 both obey the same (linear, first-order) Vlasov operator.
Hence f1 -> f1 - e2 F(f1, f2), f2 -> f2 + e1 F(f1, f2) preserves solutions,
and F = f1/e2 folds species 1 into species 2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from fractions import Fraction

import numpy as np

from ..symkernel import Deriv, Expr, Func, PdeSystem, Scope, is_zero, to_dsl, total_derivative
from ..symkernel.expr import ZERO
from ..vlasov.solver import run
from ..vlasov.state import PhaseSpaceState, SpeciesSpec, exact

VELOCITIES = ("vx", "vy", "vz")
POSITIONS = ("x", "y", "z")
ROUNDOFF = 8 * np.finfo(float).eps


class QmMismatchError(ValueError):
    pass


class NoEligiblePairError(ValueError):
    pass


# ------------------------------------------------------------- symbolic


def vlasov_scope(mixing: str | None = "F") -> Scope:
    """Scope of the 3D electromagnetic Vlasov operator for two species.

    Fields E_i, B_i are arbitrary functions of (t, x, y, z); ``r`` is the
    common charge-to-mass ratio and ``c`` the speed of light.
    """
    s = Scope()
    for n in ("t",) + POSITIONS + VELOCITIES:
        s.declare(n, "independent")
    for n in ("f1", "f2"):
        s.declare(n, "dependent")
    for n in ("e1", "e2", "r", "c"):
        s.declare(n, "parameter")
    for n in ("E1", "E2", "E3", "B1", "B2", "B3"):
        s.declare_function(n, ("t",) + POSITIONS)
    if mixing:
        s.declare_function(mixing, ("f1", "f2"))
    return s


def vlasov_operator(scope: Scope, f: Expr, ratio: Expr) -> Expr:
    """f_t + v . grad_r f + ratio (E + v x B / c) . grad_v f."""
    v = [scope.expr(n) for n in VELOCITIES]
    E = [scope.expr(f"E{i}") for i in (1, 2, 3)]
    B = [scope.expr(f"B{i}") for i in (1, 2, 3)]
    c = scope.expr("c")
    vxb = [v[1] * B[2] - v[2] * B[1], v[2] * B[0] - v[0] * B[2], v[0] * B[1] - v[1] * B[0]]
    out = total_derivative(f, "t")
    for vi, xi in zip(v, POSITIONS):
        out = out + vi * total_derivative(f, xi)
    for i, vn in enumerate(VELOCITIES):
        out = out + ratio * (E[i] + vxb[i] / c) * total_derivative(f, vn)
    return out


def mixing_expr(scope: Scope, kind: str = "arbitrary") -> Expr:
    """Named mixing functions F(f1, f2)."""
    f1, f2, e2 = scope.expr("f1"), scope.expr("f2"), scope.expr("e2")
    table = {
        "zero": ZERO,
        "arbitrary": scope.expr("F") if "F" in scope.functions else None,
        "const": Expr.const(Fraction(3, 7)),
        "f1": f1,
        "f1*f2": f1 * f2,
        "f1/e2": f1 / e2,
        "2*f1/e2": 2 * f1 / e2,
    }
    if table.get(kind) is None:
        raise ValueError(f"unknown mixing function {kind!r}; choose from {', '.join(k for k in table if table[k] is not None)}")
    return table[kind]


@dataclass
class InvarianceReport:
    mixing: str
    charge_residual: Expr
    vlasov_residuals: list[Expr]
    moments_unbounded: bool | None
    invariant: bool = field(init=False)

    def __post_init__(self):
        self.invariant = self.charge_residual.is_zero() and all(r.is_zero() for r in self.vlasov_residuals)

    def to_json(self) -> dict:
        doc = {
            "mixing": self.mixing,
            "verdict": "invariant" if self.invariant else "not-invariant",
            "charge_residual": to_dsl(self.charge_residual),
            "vlasov_residuals": [to_dsl(r) for r in self.vlasov_residuals],
            "caveats": {"moments_unbounded": self.moments_unbounded},
        }
        for r in [self.charge_residual] + self.vlasov_residuals:
            zero, w = is_zero(r)
            if not zero:
                doc["witness"] = to_dsl(w)
                break
        return doc


def _check_mixing_arguments(F: Expr) -> None:
    for a in F.free_atoms():
        if isinstance(a, Deriv) and a.order == 0 and a.field in ("f1", "f2"):
            continue
        if isinstance(a, Func) and all(isinstance(x, Deriv) and x.field in ("f1", "f2") for x in a.args):
            continue
        if a.__class__.__name__ == "Sym" and a.kind == "parameter":
            continue
        raise ValueError(f"mixing function may depend on f1, f2 and constants only, found {Expr.atom(a)}")


def charge_density_invariance(kind: str = "arbitrary", ratios: tuple | None = None) -> InvarianceReport:
    """Symbolic check of the mixing transformation for a named F.

    ``ratios`` = (e1/m1, e2/m2) as exact numbers; they must agree.  The
    operator equations L f1 = L f2 = 0 are used as rewrite rules for f_t.
    """
    if ratios is not None and exact(ratios[0]) != exact(ratios[1]):
        raise QmMismatchError(f"charge-to-mass ratios differ: {ratios[0]} vs {ratios[1]}")
    s = vlasov_scope()
    F = mixing_expr(s, kind)
    _check_mixing_arguments(F)
    f1, f2 = s.expr("f1"), s.expr("f2")
    e1, e2, r = s.expr("e1"), s.expr("e2"), s.expr("r")
    f1p = f1 - e2 * F
    f2p = f2 + e1 * F
    charge = e1 * f1p + e2 * f2p - (e1 * f1 + e2 * f2)
    system = PdeSystem(s, [vlasov_operator(s, f1, r), vlasov_operator(s, f2, r)], name="vlasov-two-species")
    residuals = [system.reduce(vlasov_operator(s, g, r)) for g in (f1p, f2p)]
    if kind == "arbitrary":
        unbounded = None  # depends on F(0, 0)
    else:
        at_vacuum = F.subs({Deriv("f1"): ZERO, Deriv("f2"): ZERO})
        unbounded = not at_vacuum.is_zero()
    return InvarianceReport(kind, charge, residuals, unbounded)


def linear_combination_residual(c1=Fraction(2), c2=Fraction(-3)) -> Expr:
    """L(c1 f1 + c2 f2) reduced modulo L f1 = L f2 = 0 (common ratio r)."""
    s = vlasov_scope(mixing=None)
    f1, f2, r = s.expr("f1"), s.expr("f2"), s.expr("r")
    system = PdeSystem(s, [vlasov_operator(s, f1, r), vlasov_operator(s, f2, r)])
    return system.reduce(vlasov_operator(s, c1 * f1 + c2 * f2, r))


# ------------------------------------------------------------ numerical


NUMERIC_MIXING = {
    "zero": lambda f1, f2, e2: np.zeros_like(f1),
    "const": lambda f1, f2, e2: np.full_like(f1, 0.1),
    "f1": lambda f1, f2, e2: f1,
    "f1*f2": lambda f1, f2, e2: f1 * f2,
    "f1/e2": lambda f1, f2, e2: f1 / e2,
    "2*f1/e2": lambda f1, f2, e2: 2 * f1 / e2,
}


@dataclass
class ReductionResult:
    combined: SpeciesSpec
    distribution: np.ndarray
    dropped: int
    positivity_lost: bool = False
    moments_unbounded: bool = False
    charge_density_max_change: float = 0.0

    def caveats(self) -> dict:
        return {"positivity_lost": self.positivity_lost, "moments_unbounded": self.moments_unbounded}


def _pair_check(state: PhaseSpaceState, pair) -> tuple[int, int, SpeciesSpec, SpeciesSpec]:
    i, j = pair
    if i == j or not (0 <= i < len(state.species) and 0 <= j < len(state.species)):
        raise ValueError(f"invalid species pair {pair}")
    s1, s2 = state.species[i], state.species[j]
    if s1.qm_ratio != s2.qm_ratio:
        raise QmMismatchError(f"charge-to-mass ratios differ: {s1.qm_ratio} vs {s2.qm_ratio}")
    if s2.charge == 0:
        raise ValueError("the receiving species must be charged")
    return i, j, s1, s2


def _charge_change(before: PhaseSpaceState, after: PhaseSpaceState) -> float:
    rb, ra = before.charge_density(), after.charge_density()
    return float(np.max(np.abs(ra - rb)) / max(np.max(np.abs(rb - before.background)), 1e-300))


def _moments_unbounded(f: np.ndarray, mixing_at_zero: float) -> bool:
    edge = max(float(np.max(np.abs(f[:, 0]))), float(np.max(np.abs(f[:, -1]))))
    return mixing_at_zero != 0 or edge > 1e-6 * max(float(np.max(np.abs(f))), 1e-300)


def extended_transform(state: PhaseSpaceState, pair, kind: str) -> tuple[PhaseSpaceState, ReductionResult]:
    """f1' = f1 - e2 F(f1, f2), f2' = f2 + e1 F(f1, f2) on the grid."""
    i, j, s1, s2 = _pair_check(state, pair)
    if kind not in NUMERIC_MIXING:
        raise ValueError(f"unknown mixing function {kind!r}")
    e1, e2 = float(s1.charge), float(s2.charge)
    f1, f2 = state.f[i], state.f[j]
    F = NUMERIC_MIXING[kind](f1, f2, e2)
    f1p = f1 - e2 * F
    f2p = f2 + e1 * F
    fs = list(state.f)
    fs[i], fs[j] = f1p, f2p
    new = replace(state, f=tuple(fs))
    tol = ROUNDOFF * max(float(np.max(np.abs(f1))), float(np.max(np.abs(e2 * F))), 1e-300)
    F0 = float(NUMERIC_MIXING[kind](np.zeros(1), np.zeros(1), e2)[0])
    res = ReductionResult(s2, f2p, -1, positivity_lost=bool(np.min(f1p) < -tol) or bool(np.min(f2p) < -tol),
                          moments_unbounded=_moments_unbounded(f1p, F0) or _moments_unbounded(f2p, F0),
                          charge_density_max_change=_charge_change(state, new))
    return new, res


def reduce_equal_qm(state: PhaseSpaceState, pair=(0, 1)) -> tuple[PhaseSpaceState, ReductionResult]:
    """Fold species ``pair[0]`` into ``pair[1]``: f2' = f2 + (e1/e2) f1, f1' = 0 dropped."""
    i, j, s1, s2 = _pair_check(state, pair)
    ratio = float(s1.charge / s2.charge)
    combined = state.f[j] + ratio * state.f[i]
    spec = SpeciesSpec(f"{s2.name}+{s1.name}", s2.charge, s2.mass, {"kind": "derived"})
    species = [s for k, s in enumerate(state.species) if k != i]
    fs = [f for k, f in enumerate(state.f) if k != i]
    jj = j if j < i else j - 1
    species[jj] = spec
    fs[jj] = combined
    new = replace(state, species=tuple(species), f=tuple(fs))
    res = ReductionResult(spec, combined, i, positivity_lost=bool(np.min(combined) < 0),
                          moments_unbounded=False, charge_density_max_change=_charge_change(state, new))
    return new, res


def exp_family_transform(state: PhaseSpaceState, a: float, pair=(0, 1)) -> PhaseSpaceState:
    """f1' = e^a f1,  f2' = f2 + (e1/e2)(1 - e^a) f1."""
    i, j, s1, s2 = _pair_check(state, pair)
    w = math.exp(a)
    ratio = float(s1.charge / s2.charge)
    fs = list(state.f)
    fs[i] = w * state.f[i]
    fs[j] = state.f[j] + ratio * (1 - w) * state.f[i]
    return replace(state, f=tuple(fs))


def find_equal_qm_pair(species) -> tuple[int, int]:
    species = list(species)
    if len(species) < 2:
        raise NoEligiblePairError("reduction needs at least two species")
    for a in range(len(species)):
        for b in range(a + 1, len(species)):
            if species[a].qm_ratio == species[b].qm_ratio and species[b].charge != 0:
                return a, b
    raise NoEligiblePairError("no eligible pair: no two species share a charge-to-mass ratio")


@dataclass
class EquivalenceResult:
    relative_l2: float
    steps: int
    reduction: ReductionResult
    e_full: np.ndarray
    e_reduced: np.ndarray


def reduction_equivalence(state: PhaseSpaceState, dt: float, nsteps: int, pair=None) -> EquivalenceResult:
    """Run the full and the reduced system from the same state; compare E(t, x)."""
    pair = pair or find_equal_qm_pair(state.species)
    reduced, result = reduce_equal_qm(state, pair)
    e_full = np.array([s.E for s in run(state, dt, nsteps)])
    e_red = np.array([s.E for s in run(reduced, dt, nsteps)])
    dist = float(np.linalg.norm(e_full - e_red) / max(np.linalg.norm(e_full), 1e-300))
    return EquivalenceResult(dist, nsteps, result, e_full, e_red)

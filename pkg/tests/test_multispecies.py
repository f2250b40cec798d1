from __future__ import annotations

import math
from fractions import Fraction

import numpy as np
import pytest

from plasmasym.multispecies import (
    NUMERIC_MIXING,
    NoEligiblePairError,
    QmMismatchError,
    charge_density_invariance,
    exp_family_transform,
    extended_transform,
    find_equal_qm_pair,
    linear_combination_residual,
    reduce_equal_qm,
    reduction_equivalence,
)
from plasmasym.multispecies.core import vlasov_operator, vlasov_scope
from plasmasym.symkernel import PdeSystem
from plasmasym.vlasov import PhaseSpaceGrid, SpeciesSpec, initial_state


def _mixture(nx=32, nv=64, electrons=True):
    grid = PhaseSpaceGrid(4 * math.pi, 6.0, nx, nv)
    species = [
        SpeciesSpec("alpha", 2, 4, {"kind": "maxwellian", "density": 0.1, "vth": 0.5, "amplitude": 0.05}),
        SpeciesSpec("deuteron", 1, 2, {"kind": "maxwellian", "density": 0.8, "vth": 0.5}),
    ]
    if electrons:
        species.append(SpeciesSpec.electrons({"kind": "maxwellian", "amplitude": 0.02}))
    return initial_state(grid, species)


# ---------------------------------------------------------------- symbolic


@pytest.mark.parametrize("kind", ["arbitrary", "zero", "const", "f1", "f1*f2", "f1/e2"])
def test_mixing_invariance_symbolic(kind):
    rep = charge_density_invariance(kind)
    assert rep.invariant, rep.to_json()
    assert rep.charge_residual.is_zero()


def test_vacuum_caveat_flags():
    assert charge_density_invariance("const").moments_unbounded is True
    assert charge_density_invariance("f1*f2").moments_unbounded is False
    assert charge_density_invariance("arbitrary").moments_unbounded is None


def test_unequal_ratios_rejected():
    with pytest.raises(QmMismatchError):
        charge_density_invariance("f1", ratios=(Fraction(1, 2), Fraction(1, 1)))
    rep = charge_density_invariance("f1", ratios=("2/4", "1/2"))
    assert rep.invariant


def test_linear_combination_solves_same_equation():
    assert linear_combination_residual().is_zero()
    assert linear_combination_residual(Fraction(1, 3), Fraction(7)).is_zero()


def test_different_ratios_break_linearity():
    # negative control: with r1 != r2 the sum f1 + f2 does not solve L_r1
    s = vlasov_scope(mixing=None)
    s.declare("r2", "parameter")
    f1, f2 = s.expr("f1"), s.expr("f2")
    r1, r2 = s.expr("r"), s.expr("r2")
    system = PdeSystem(s, [vlasov_operator(s, f1, r1), vlasov_operator(s, f2, r2)])
    assert not system.reduce(vlasov_operator(s, f1 + f2, r1)).is_zero()


# ---------------------------------------------------------------- numerical


def test_find_pair():
    state = _mixture()
    assert find_equal_qm_pair(state.species) == (0, 1)
    with pytest.raises(NoEligiblePairError, match="at least two"):
        find_equal_qm_pair(state.species[:1])
    with pytest.raises(NoEligiblePairError, match="no eligible pair"):
        find_equal_qm_pair([SpeciesSpec("a", 2, 4), SpeciesSpec("p", 1, 1)])


@pytest.mark.parametrize("kind", sorted(NUMERIC_MIXING))
def test_charge_density_invariant_numerically(kind):
    state = _mixture()
    new, res = extended_transform(state, (0, 1), kind)
    assert res.charge_density_max_change < 1e-13
    rho0, rho1 = state.charge_density(), new.charge_density()
    assert np.allclose(rho0, rho1, rtol=0, atol=1e-14)


def test_positivity_caveat():
    state = _mixture()
    boundary, edge = extended_transform(state, (0, 1), "f1/e2")
    assert not edge.positivity_lost
    assert np.max(np.abs(boundary.f[0])) < 1e-16  # f1' = 0 exactly
    _, neg = extended_transform(state, (0, 1), "2*f1/e2")
    assert neg.positivity_lost


def test_reduction_arithmetic():
    state = _mixture()
    reduced, res = reduce_equal_qm(state, (0, 1))
    assert len(reduced.species) == 2
    assert reduced.species[0].qm_ratio == Fraction(1, 2)
    assert np.array_equal(res.distribution, 2 * state.f[0] + state.f[1])
    assert np.allclose(reduced.charge_density(), state.charge_density(), atol=1e-14)
    assert res.caveats() == {"positivity_lost": False, "moments_unbounded": False}


def test_reduction_of_empty_species_is_removal():
    grid = PhaseSpaceGrid(4 * math.pi, 6.0, 16, 32)
    species = [SpeciesSpec("ghost", 2, 4, {"kind": "zero"}),
               SpeciesSpec("deuteron", 1, 2, {"kind": "maxwellian", "amplitude": 0.1})]
    state = initial_state(grid, species)
    reduced, _ = reduce_equal_qm(state, (0, 1))
    assert np.array_equal(reduced.f[0], state.f[1])


def test_reduction_rejects_unequal_pair():
    state = _mixture()
    with pytest.raises(QmMismatchError):
        reduce_equal_qm(state, (0, 2))


def test_exp_family():
    state = _mixture()
    same = exp_family_transform(state, 0.0)
    assert all(np.array_equal(a, b) for a, b in zip(same.f, state.f))
    one = exp_family_transform(state, 1.0)
    assert np.allclose(one.charge_density(), state.charge_density(), atol=1e-14)
    limit = exp_family_transform(state, -40.0)
    reduced, _ = reduce_equal_qm(state, (0, 1))
    assert np.max(np.abs(limit.f[1] - reduced.f[0])) / np.max(reduced.f[0]) < 1e-16
    assert np.max(limit.f[0]) / np.max(state.f[0]) < 1e-16


def test_reduction_equivalence_short():
    state = _mixture()
    res = reduction_equivalence(state, 0.02, 100)
    assert res.relative_l2 < 1e-10
    assert res.e_full.shape == res.e_reduced.shape == (101, state.grid.nx)

"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Run with ``pytest tests/test_acceptance.py -v`` (the lines are repeated in the
terminal summary) or directly as ``python3 tests/test_acceptance.py``.
"""

from __future__ import annotations

import json
import math
import random
import sys
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).resolve().parent))

from exprgen import SCOPE, build, random_tree, to_text  # noqa: E402
from plasmasym.cli import main as cli_main  # noqa: E402
from plasmasym.hmsolver import (  # noqa: E402
    Grid2D,
    HmExactParams,
    hm_invariants,
    measure_frequency,
    random_state,
    run_reduced,
    seed_exact,
    step_2d,
)
from plasmasym.liecheck.exact import dispersion_frequency, dispersion_polynomial, verify_exact  # noqa: E402
from plasmasym.multispecies import (  # noqa: E402
    NUMERIC_MIXING,
    charge_density_invariance,
    exp_family_transform,
    extended_transform,
    reduce_equal_qm,
    reduction_equivalence,
)
from plasmasym.symkernel import Expr, Scope, canonicalize, parse_expression, to_dsl, total_derivative  # noqa: E402
from plasmasym.vlasov import (  # noqa: E402
    PhaseSpaceGrid,
    SpeciesSpec,
    apply_finite_transform,
    initial_state,
    moment_residual,
    run,
    transform_history,
)

RESULTS: list[str] = []


@dataclass
class Criterion:
    number: int
    title: str
    failures: list[str] = field(default_factory=list)
    notes: list[str] = field(default_factory=list)

    def expect(self, ok: bool, what: str) -> None:
        if not ok:
            self.failures.append(what)

    def note(self, text: str) -> None:
        self.notes.append(text)

    def finish(self) -> None:
        status = "PASS" if not self.failures else "FAIL"
        detail = "; ".join(self.failures if self.failures else self.notes)
        line = f"[{status}] criterion {self.number}: {self.title} ({detail})"
        RESULTS.append(line)
        print(line)
        assert not self.failures, line


def _check(tmp: Path, *argv) -> dict:
    out = tmp / f"run{len(list(tmp.iterdir()))}"
    cli_main(["check", *argv, "--out", str(out)])
    return json.loads((out / "report.json").read_text())


# ---------------------------------------------------------------- 1


def test_symbolic_symmetry_suite(tmp_path):
    c = Criterion(1, "symbolic symmetry suite")
    t0 = time.perf_counter()
    count = 0

    def require_pass(label, doc):
        nonlocal count
        for chk in doc["checks"]:
            count += 1
            c.expect(chk["verdict"] == "pass", f"{label} {chk['name']} not a symmetry")

    require_pass("emhd", _check(tmp_path, "emhd.sys", *(f"emhd-x{i}.gen" for i in range(1, 7))))
    for n in range(5):
        gens = [f"moments-N{n}-x{i}.gen" for i in range(1, 6)]
        require_pass(f"N={n}", _check(tmp_path, f"moments-N{n}.sys", *gens))
    for n in range(1, 5):
        require_pass(f"N={n}", _check(tmp_path, f"moments-N{n}.sys", f"moments-N{n}-xfgn.gen"))
    for k in (1, 2):
        require_pass("hm", _check(tmp_path, "hm.sys", f"hm-x{k}.gen", "--side", f"hm-x{k}.side"))

    # negative controls must fail with a nonzero witness
    for label, argv in (("hm scaling", ("hm.sys", "hm-xscale.gen")), ("hm X1 without side", ("hm.sys", "hm-x1.gen"))):
        doc = _check(tmp_path, *argv)
        for chk in doc["checks"]:
            witness = chk.get("note", "")
            c.expect(chk["verdict"] == "fail" and witness not in ("", "0"), f"{label} did not fail with a witness")

    elapsed = time.perf_counter() - t0
    c.expect(elapsed < 300, f"runtime {elapsed:.0f} s exceeds 300 s")
    c.note(f"{count} generator checks and 2 broken controls in {elapsed:.1f} s")
    c.finish()


# ---------------------------------------------------------------- 2


def test_dispersion_relation():
    c = Criterion(2, "dispersion relation")
    c.expect(verify_exact("hm-eq20").passed, "resonant residual not zero")
    generic = verify_exact("hm-eq20", generic_omega=True)
    c.expect(not generic.passed, "generic frequency residual vanished")

    # independent oracle: (1 + q^2) Omega - q + alpha q^3, expanded by hand
    s = Scope()
    for n in ("alpha", "q", "Omega"):
        s.declare(n, "parameter")
    a, q, om = (s.expr(n) for n in ("alpha", "q", "Omega"))
    hand = (1 + q * q) * om - q + a * q ** 3
    poly = generic.details.get("dispersion_polynomial")
    c.expect(poly is not None and ((poly - hand).is_zero() or (poly + hand).is_zero()),
             "generic witness not proportional to the hand expansion")
    c.expect(dispersion_polynomial(a, q, dispersion_frequency(a, q)).is_zero(), "closed-form root rejected")

    p = HmExactParams(0.05, 0.5, 2)
    t0 = time.perf_counter()
    res = run_reduced(seed_exact(p, 128), 1e-3, 60.0, p.q, stride=10)
    omega = res.frequency().omega
    elapsed = time.perf_counter() - t0
    rel = abs(omega - 0.32) / 0.32
    c.expect(rel < 0.01, f"measured Omega {omega:.6g} off by {rel:.2%}")
    c.expect(elapsed < 30, f"reduced run took {elapsed:.1f} s")
    c.note(f"symbolic residual exact; measured Omega = {omega:.10f} (rel err {rel:.1e}) in {elapsed:.1f} s")
    c.finish()


# ---------------------------------------------------------------- 3


EXACT_CASES = ("hm-eq21", "emhd-background", "emhd-perturbed-derivation", "emhd-gradient-condition",
               "hm-g-minus-one", "hm-shear")


def test_exact_solution_residuals():
    c = Criterion(3, "exact-solution residuals")
    for case in EXACT_CASES:
        rep = verify_exact(case)
        c.expect(rep.passed, f"{case}: residual {rep.to_json().get('witness')}")
    c.note(f"{len(EXACT_CASES)} cases reduce to zero")
    c.finish()


# ---------------------------------------------------------------- 4


def test_conservation():
    c = Criterion(4, "conservation")
    g = Grid2D(128, 128)
    s = random_state(g, 0.1, seed=0)
    e0, z0 = hm_invariants(s)
    de = dz = 0.0
    for _ in range(1000):
        s = step_2d(s, 1e-3)
        e, z = hm_invariants(s)
        de, dz = max(de, abs(e - e0) / e0), max(dz, abs(z - z0) / z0)
    c.expect(de < 1e-6 and dz < 1e-6, f"HM-2D drift energy {de:.2e}, enstrophy {dz:.2e}")

    grid = PhaseSpaceGrid(4 * math.pi, 6.0, 128, 128)
    v0 = initial_state(grid, [SpeciesSpec.electrons({"kind": "maxwellian", "amplitude": 0.05}),
                              SpeciesSpec("ions", 1, 100, {"kind": "maxwellian", "vth": 0.1})])
    hist = run(v0, 0.01, 1000, stride=1)
    mass = max(max(abs(h.mass(i) - hist[0].mass(i)) for h in hist) / hist[0].mass(i) for i in range(2))
    en0 = hist[0].total_energy()
    energy = max(abs(h.total_energy() - en0) for h in hist) / en0
    c.expect(mass < 1e-12, f"Vlasov mass drift {mass:.2e}")
    c.expect(energy < 1e-6, f"Vlasov energy drift {energy:.2e}")
    c.note(f"HM-2D energy {de:.1e} enstrophy {dz:.1e}; Vlasov mass {mass:.1e} energy {energy:.1e}")
    c.finish()


# ---------------------------------------------------------------- 5


def _mean_field_trace(history):
    # uniform mode: d<E>/dt = -<j>, d<j>/dt = <E> (plasma units), so z = -<j> - i<E> ~ exp(-i t)
    return np.array([-np.mean(s.current_density()) - 1j * np.mean(s.E) for s in history])


def test_kinetic_symmetry_closure():
    c = Criterion(5, "kinetic symmetry closure")
    grid = PhaseSpaceGrid(4 * math.pi, 6.0, 64, 128)
    state = initial_state(grid, [SpeciesSpec.electrons({"kind": "maxwellian", "amplitude": 0.05})])
    hist = run(state, 0.01, 400, stride=1)
    base = moment_residual(hist, 3)
    worst = 0.0
    for gid in ("X2", "X3", "X4", "X5"):
        for eps in (0.1, -0.1, 0.05):
            img = moment_residual(transform_history(hist, gid, eps), 3)
            for row, b in base.items():
                ratio = img[row] / b
                worst = max(worst, ratio)
                c.expect(ratio <= 2.0, f"{gid} eps={eps} row {row}: ratio {ratio:.3f}")

    eq = initial_state(grid, [SpeciesSpec.electrons({"kind": "maxwellian"})])
    osc = run(apply_finite_transform(eq, "X5", 0.1), 0.01, 4000, stride=10)
    omega = measure_frequency(_mean_field_trace(osc), np.array([s.time for s in osc])).omega
    c.expect(abs(omega - 1.0) <= 0.01, f"X5 oscillation frequency {omega:.6f}")
    c.note(f"worst residual ratio {worst:.3f} over {len(base)} rows; X5 frequency {omega:.8f}")
    c.finish()


# ---------------------------------------------------------------- 6


def _mixture():
    grid = PhaseSpaceGrid(4 * math.pi, 6.0, 64, 64)
    return initial_state(grid, [
        SpeciesSpec("alpha", 2, 4, {"kind": "maxwellian", "density": 0.1, "vth": 0.5, "amplitude": 0.05}),
        SpeciesSpec("deuteron", 1, 2, {"kind": "maxwellian", "density": 0.8, "vth": 0.5}),
        SpeciesSpec.electrons({"kind": "maxwellian", "amplitude": 0.02}),
    ])


def _abs_charge(state, pair=(0, 1)):
    return float(np.max(sum(abs(float(state.species[i].charge)) * np.abs(state.f[i]).sum(axis=1) * state.grid.dv
                            for i in pair)))


def test_species_reduction():
    c = Criterion(6, "species reduction")
    state = _mixture()
    eq = reduction_equivalence(state, 0.01, 500, (0, 1))
    c.expect(eq.relative_l2 < 1e-10, f"E-field relative L2 {eq.relative_l2:.2e}")

    for kind in ("arbitrary", "zero", "const", "f1", "f1*f2", "f1/e2"):
        c.expect(charge_density_invariance(kind).invariant, f"symbolic charge invariance fails for {kind}")
    # roundoff: deterministic bound for the difference of two Nv-term sums
    bound = 2 * (state.grid.nv + 2) * np.finfo(float).eps
    worst = 0.0
    for kind in NUMERIC_MIXING:
        new, res = extended_transform(state, (0, 1), kind)
        scale = max(_abs_charge(state), _abs_charge(new))
        worst = max(worst, res.charge_density_max_change / scale)
    c.expect(worst <= bound, f"charge density changed by {worst:.2e} relative (roundoff bound {bound:.1e})")

    reduced, _ = reduce_equal_qm(state, (0, 1))
    limit = exp_family_transform(state, -40.0, (0, 1))
    d_new = float(np.max(np.abs(limit.f[1] - reduced.f[0])) / np.max(reduced.f[0]))
    d_old = float(np.max(np.abs(limit.f[0])) / np.max(state.f[0]))
    c.expect(max(d_new, d_old) < 1e-16, f"exp family at a = -40 differs by {max(d_new, d_old):.2e}")
    c.note(f"E-field L2 {eq.relative_l2:.1e}; charge change {worst:.1e}; exp limit {max(d_new, d_old):.1e}")
    c.finish()


# ---------------------------------------------------------------- 7


N_RANDOM = 10_000


def test_kernel_property_suite():
    c = Criterion(7, "kernel property suite")
    rng = random.Random(20240601)
    tested = skipped = 0
    fails: dict[str, int] = {}

    def bad(prop):
        fails[prop] = fails.get(prop, 0) + 1

    prev = Expr.const(1)
    while tested < N_RANDOM:
        tree = random_tree(rng, depth=3)
        try:
            e = build(tree)
        except ZeroDivisionError:
            skipped += 1
            continue
        tested += 1
        k = canonicalize(e)
        if not canonicalize(k).same(k):
            bad("idempotence")
        if not parse_expression(to_dsl(e), SCOPE).same(k) or not parse_expression(to_text(tree), SCOPE).same(k):
            bad("round trip")
        v1, v2 = rng.choice("tx"), rng.choice("tx")
        d12 = total_derivative(total_derivative(e, v1), v2)
        d21 = total_derivative(total_derivative(e, v2), v1)
        if not canonicalize(d12).same(canonicalize(d21)):
            bad("mixed partials")
        f = prev
        if not (canonicalize(e * (f + k)).same(canonicalize(e * f + e * k))
                and canonicalize(e + f).same(canonicalize(f + e))
                and canonicalize(e * f).same(canonicalize(f * e))
                and (e - e).is_zero()):
            bad("ring laws")
        prev = e
    for prop, n in sorted(fails.items()):
        c.expect(False, f"{prop} failed on {n} expressions")
    c.note(f"{tested} expressions ({skipped} zero-divisor trees redrawn)")
    c.finish()


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q", "-s", "-p", "no:cacheprovider"]))

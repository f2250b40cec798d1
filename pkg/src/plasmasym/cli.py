"""Command-line entry point: symbolic checks, exact solutions, simulations, reductions.

Exit codes: 0 every verdict passes, 1 some check failed, 2 usage or parse
error, 3 numerical abort.  Reports written under ``--out`` never contain
timing, so identical config and seed give byte-identical files.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .hmsolver import (
    FrequencyError,
    Grid2D,
    HmExactParams,
    SolverError,
    exact_error,
    hm_invariants,
    measure_frequency,
    random_state,
    run_reduced,
    seed_exact,
    shear_flow_state,
    step_2d,
)
from .liecheck import check_conditional_symmetry, check_symmetry, parse_generators
from .liecheck.catalogue import CATALOGUE, bundle_dir
from .liecheck.exact import CASES, UnknownCaseError, verify_exact
from .multispecies import (
    NUMERIC_MIXING,
    NoEligiblePairError,
    QmMismatchError,
    exp_family_transform,
    extended_transform,
    find_equal_qm_pair,
    reduce_equal_qm,
    reduction_equivalence,
)
from .symkernel import DslError, RewriteBudgetError, RuleError, parse_side_conditions, parse_system
from .vlasov import (
    UNDERSHOOT_TOLERANCE,
    NeutralityError,
    PhaseSpaceGrid,
    SpeciesSpec,
    TransformError,
    VlasovError,
    ampere_series,
    apply_finite_transform,
    initial_state,
    moment_residual,
    run,
    transform_history,
    undershoot,
)

EXIT_PASS, EXIT_FAIL, EXIT_USAGE, EXIT_NUMERICAL = 0, 1, 2, 3
MODELS = ("hm-reduced", "hm-2d", "vlasov")

# closure rows whose baseline is below this are at roundoff and not ratio-tested
CLOSURE_FLOOR = 1e-10
CLOSURE_FACTOR = 2.0


class ConfigError(ValueError):
    pass


@dataclass
class Check:
    name: str
    passed: bool
    value: float | str | None = None
    tolerance: float | None = None
    note: str = ""

    def to_json(self) -> dict:
        doc = {"name": self.name, "verdict": "pass" if self.passed else "fail"}
        if self.value is not None:
            doc["value"] = self.value
        if self.tolerance is not None:
            doc["tolerance"] = self.tolerance
        if self.note:
            doc["note"] = self.note
        return doc


@dataclass
class Report:
    command: str
    config: dict
    checks: list[Check] = field(default_factory=list)
    results: dict = field(default_factory=dict)
    files: list[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def add(self, name: str, passed: bool, value=None, tolerance=None, note: str = "") -> Check:
        c = Check(name, bool(passed), _clean(value), tolerance, note)
        self.checks.append(c)
        return c

    def to_json(self) -> dict:
        return {
            "tool": "plasmasym",
            "version": __version__,
            "command": self.command,
            "config": _clean(self.config),
            "checks": [c.to_json() for c in self.checks],
            "results": _clean(self.results),
            "files": sorted(self.files),
            "passed": self.passed,
        }


def _clean(obj):
    """JSON-safe copy (numpy scalars, tuples, non-finite floats)."""
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.integer, int)):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        x = float(obj)
        return x if math.isfinite(x) else repr(x)
    return obj


def _dumps(doc: dict) -> str:
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def _write_csv(out: Path | None, name: str, header, rows, report: Report) -> None:
    if out is None:
        return
    with open(out / name, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([_fmt(v) if isinstance(v, (float, np.floating)) else v for v in row])
    report.files.append(name)


def _write_text(out: Path | None, name: str, text: str, report: Report) -> None:
    if out is None:
        return
    (out / name).write_text(text, encoding="utf-8")
    report.files.append(name)


# ---------------------------------------------------------------- config


def resolve_input(path: str) -> Path:
    """A path as given, or else the bundled file of that name."""
    p = Path(path)
    if p.is_file():
        return p
    bundled = bundle_dir() / path
    if bundled.is_file():
        return bundled
    raise FileNotFoundError(f"no such file (nor bundled file): {path}")


def load_config(path: str | None) -> dict:
    if path is None:
        return {}
    p = Path(path)
    if not p.is_file():
        raise FileNotFoundError(f"config file not found: {path}")
    try:
        doc = json.loads(p.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON ({exc})") from exc
    if not isinstance(doc, dict):
        raise ConfigError(f"{path}: top level must be a JSON object")
    return doc


def _merge(defaults: dict, given: dict, what: str) -> dict:
    unknown = sorted(set(given) - set(defaults))
    if unknown:
        raise ConfigError(f"{what}: unknown config keys {', '.join(unknown)}")
    return {**defaults, **given}


def _positive(cfg: dict, *keys) -> None:
    for k in keys:
        v = cfg[k]
        if not isinstance(v, (int, float)) or isinstance(v, bool) or not v > 0:
            raise ConfigError(f"{k} must be a positive number, got {v!r}")


def _steps(cfg: dict) -> int:
    if cfg.get("steps") is not None:
        n = cfg["steps"]
        if not isinstance(n, int) or n < 1:
            raise ConfigError(f"steps must be a positive integer, got {n!r}")
        return n
    n = round(cfg["t_end"] / cfg["dt"])
    if n < 1 or not math.isclose(n * cfg["dt"], cfg["t_end"], rel_tol=1e-9):
        raise ConfigError(f"t_end = {cfg['t_end']} is not a whole number of steps of dt = {cfg['dt']}")
    return int(n)


def _stride(cfg: dict, nsteps: int) -> int:
    s = cfg["output_stride"]
    if not isinstance(s, int) or s < 1 or nsteps % s:
        raise ConfigError(f"output_stride must be a positive divisor of the step count {nsteps}, got {s!r}")
    return s


def _species(docs) -> list[SpeciesSpec]:
    if not isinstance(docs, list) or not docs:
        raise ConfigError("species must be a non-empty list")
    try:
        return [SpeciesSpec.from_dict(d) for d in docs]
    except (KeyError, TypeError, ValueError, ZeroDivisionError) as exc:
        raise ConfigError(f"bad species entry: {exc}") from exc


def _phase_grid(cfg: dict) -> PhaseSpaceGrid:
    _positive(cfg, "L", "V", "dt")
    try:
        return PhaseSpaceGrid(float(cfg["L"]), float(cfg["V"]), int(cfg["Nx"]), int(cfg["Nv"]))
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


# ---------------------------------------------------------------- check


def _parse(path: Path, fn):
    try:
        return fn(path.read_text(encoding="utf-8"))
    except DslError as exc:
        raise DslError(f"{path.name}: {exc}") from exc


def cmd_check(args, cfg: dict, out: Path | None) -> Report:
    sys_path = resolve_input(args.system)
    gen_paths = [resolve_input(g) for g in args.generators]
    side_path = resolve_input(args.side) if args.side else None
    report = Report("check", {"system": str(args.system), "generators": list(args.generators),
                              "side": args.side})
    system = _parse(sys_path, lambda text: parse_system(text, name=sys_path.stem))
    side = _parse(side_path, lambda text: parse_side_conditions(text, system.scope)) if side_path else None
    gens = []
    for p in gen_paths:
        for g in _parse(p, lambda text: parse_generators(text, system.scope)):
            gens.append((p.stem, g))
    if not gens:
        raise ConfigError("the generator files define no generators")
    reports = []
    for stem, g in gens:
        rep = check_conditional_symmetry(g, system, side) if side else check_symmetry(g, system)
        doc = rep.to_json()
        reports.append(doc)
        report.add(f"{stem}:{g.label}", rep.passed, rep.verdict,
                   note=doc.get("witness", ""))
    report.results["symmetry_reports"] = reports
    return report


# ---------------------------------------------------------------- verify-exact


def cmd_verify_exact(args, cfg: dict, out: Path | None) -> Report:
    report = Report("verify-exact", {"case": args.case, "generic_omega": args.generic_omega})
    rep = verify_exact(args.case, generic_omega=args.generic_omega)
    doc = rep.to_json()
    poly = doc.get("dispersion_polynomial")
    for name, r in rep.residuals.items():
        zero = r.is_zero()
        note = f"dispersion polynomial {poly}" if poly and not zero else ""
        report.add(f"{args.case}:{name}", zero, "zero" if zero else doc["residuals"][name], note=note)
    report.results["exact"] = doc
    if "ode_dsl" in rep.details:
        _write_text(out, f"{args.case}.dsl", rep.details["ode_dsl"], report)
    return report


# ---------------------------------------------------------------- simulate

HM_REDUCED_DEFAULTS = {"Ny": 128, "dt": 1e-3, "t_end": 60.0, "steps": None, "alpha": 0.05, "beta": 0.5,
                       "q": 2, "output_stride": 10, "frequency_tolerance": 0.01}
HM_2D_DEFAULTS = {"Nx": 128, "Ny": 128, "dt": 1e-3, "t_end": None, "steps": 1000, "amplitude": 0.1,
                  "kmax": 8, "seed": 0, "initial": "random", "output_stride": 10,
                  "drift_tolerance": 1e-6, "steady_tolerance": 1e-10}
VLASOV_DEFAULTS = {
    "L": 4 * math.pi, "V": 6.0, "Nx": 64, "Nv": 128, "dt": 0.01, "t_end": 20.0, "steps": None,
    "species": [{"name": "electrons", "e": -1, "m": 1,
                 "profile": {"kind": "maxwellian", "amplitude": 0.05, "mode": 1}}],
    "transform": None, "moments_N": 2, "output_stride": 10,
    "mass_tolerance": 1e-12, "energy_tolerance": 1e-6, "frequency_tolerance": 0.01,
}


def _simulate_hm_reduced(cfg: dict, report: Report, out: Path | None) -> None:
    _positive(cfg, "dt", "alpha")
    nsteps = _steps(cfg)
    stride = _stride(cfg, nsteps)
    params = HmExactParams(cfg["alpha"], cfg["beta"], int(cfg["q"]))
    state = seed_exact(params, int(cfg["Ny"]))
    res = run_reduced(state, cfg["dt"], nsteps * cfg["dt"], params.q, stride=stride)
    try:
        est = res.frequency()
        rel = abs(est.omega - params.Omega) / abs(params.Omega)
        report.add("frequency", rel <= cfg["frequency_tolerance"], rel, cfg["frequency_tolerance"],
                   note=f"measured {est.omega:.10g}, expected {params.Omega:.10g}")
        report.results["omega_measured"] = est.omega
        report.results["omega_relative_error"] = rel
        report.results["omega_stderr"] = est.stderr
    except FrequencyError as exc:
        report.add("frequency", False, note=str(exc))
    report.results["omega_expected"] = params.Omega
    drift = float(np.max(np.abs(res.masses - res.masses[0])) / abs(res.masses[0]))
    report.add("mass_drift", drift <= 1e-10, drift, 1e-10)
    report.results["consistency"] = {"G_vs_F": res.max_consistency[0], "h_vs_G": res.max_consistency[1]}
    report.results["final_profile_error"] = exact_error(res.final, params)
    _write_csv(out, "hm_reduced_modes.csv", ["time", "mode_re", "mode_im", "mass"],
               ([t, m.real, m.imag, s] for t, m, s in zip(res.times, res.modes, res.masses)), report)
    _write_csv(out, "hm_reduced_final.csv", ["y", "F", "G", "h"],
               zip(res.final.y, res.final.F, res.final.G, res.final.h), report)


def _simulate_hm_2d(cfg: dict, report: Report, out: Path | None) -> None:
    _positive(cfg, "dt")
    nsteps = _steps(cfg)
    stride = _stride(cfg, nsteps)
    grid = Grid2D(int(cfg["Nx"]), int(cfg["Ny"]))
    if cfg["initial"] == "random":
        state = random_state(grid, cfg["amplitude"], int(cfg["seed"]), int(cfg["kmax"]))
    elif cfg["initial"] == "shear":
        state = shear_flow_state(grid)
    else:
        raise ConfigError(f"initial must be 'random' or 'shear', got {cfg['initial']!r}")
    phi0 = state.phi()
    e0, z0 = hm_invariants(state)
    rows = [(state.time, e0, z0)]
    de = dz = 0.0
    for n in range(1, nsteps + 1):
        state = step_2d(state, cfg["dt"])
        e, z = hm_invariants(state)
        de, dz = max(de, abs(e - e0) / abs(e0)), max(dz, abs(z - z0) / abs(z0))
        if not (math.isfinite(e) and math.isfinite(z)):
            raise SolverError(f"non-finite invariants at t = {state.time:.6g}")
        if n % stride == 0:
            rows.append((state.time, e, z))
    tol = cfg["drift_tolerance"]
    report.add("energy_drift", de <= tol, de, tol)
    report.add("enstrophy_drift", dz <= tol, dz, tol)
    if cfg["initial"] == "shear":
        change = float(np.max(np.abs(state.phi() - phi0)) / np.max(np.abs(phi0)))
        report.add("steadiness", change <= cfg["steady_tolerance"], change, cfg["steady_tolerance"])
    _write_csv(out, "hm2d_invariants.csv", ["time", "energy", "enstrophy"], rows, report)


def _mean_field_frequency(history) -> float:
    """Frequency of the uniform field oscillation from z = -<j> - i<E>."""
    z = np.array([-np.mean(s.current_density()) - 1j * np.mean(s.E) for s in history])
    t = np.array([s.time for s in history])
    return measure_frequency(z, t).omega


def _history_rows(history):
    amp = ampere_series(history) if len(history) >= 2 else [float("nan")] * len(history)
    for s, r in zip(history, amp):
        yield [s.time, *(s.mass(i) for i in range(len(s.species))), s.kinetic_energy(), s.field_energy(),
               s.total_energy(), float(np.mean(s.E)), r]


def _transform_spec(tf) -> tuple[str, float, float]:
    keys = {"id", "generator", "epsilon", "at_time"}
    if not isinstance(tf, dict) or set(tf) - keys or not ({"id", "generator"} & set(tf)):
        raise ConfigError('transform must be {"id": ..., "epsilon": ..., "at_time": ...}')
    gid = tf.get("id", tf.get("generator"))
    return gid, float(tf.get("epsilon", 0.1)), float(tf.get("at_time", 0.0))


def _simulate_vlasov(cfg: dict, report: Report, out: Path | None) -> None:
    grid = _phase_grid(cfg)
    species = _species(cfg["species"])
    nsteps = _steps(cfg)
    stride = _stride(cfg, nsteps)
    N = cfg["moments_N"]
    if not isinstance(N, int) or N < 0:
        raise ConfigError(f"moments_N must be a non-negative integer, got {N!r}")
    tf = cfg["transform"]
    state = initial_state(grid, species)
    if tf is not None:
        gid, eps, at_time = _transform_spec(tf)
        start = at_time / (stride * cfg["dt"])
        if not (0 <= start <= nsteps // stride and abs(start - round(start)) < 1e-9):
            raise ConfigError("transform at_time must be a sampled time (a multiple of dt * output_stride)")
        start = round(start)
        apply_finite_transform(state, gid, eps)  # validate before the long run

    history = run(state, cfg["dt"], nsteps, stride)
    for i, s in enumerate(species):
        m0 = history[0].mass(i)
        drift = max(abs(h.mass(i) - m0) for h in history) / abs(m0) if m0 else 0.0
        report.add(f"mass_drift:{s.name}", drift <= cfg["mass_tolerance"], drift, cfg["mass_tolerance"])
    e0 = history[0].total_energy()
    drift = max(abs(h.total_energy() - e0) for h in history) / abs(e0)
    report.add("energy_drift", drift <= cfg["energy_tolerance"], drift, cfg["energy_tolerance"])
    # reported, not enforced: cubic splines may undershoot near steep edges
    report.results["undershoot"] = {s.name: max(undershoot(h, i) for h in history) for i, s in enumerate(species)}
    report.results["undershoot_tolerance"] = UNDERSHOOT_TOLERANCE
    report.results["undershoot_exceeded"] = sorted(k for k, v in report.results["undershoot"].items()
                                                   if v > UNDERSHOOT_TOLERANCE)
    names = [f"mass_{s.name}" for s in species]
    header = ["time", *names, "kinetic", "field", "total", "mean_E", "ampere_residual"]
    _write_csv(out, "vlasov_history.csv", header, _history_rows(history), report)
    baseline = moment_residual(history, N) if len(history) >= 3 else None
    report.results["moment_residuals"] = baseline
    if tf is None:
        return

    window = history[start:]
    images = transform_history(window, gid, eps)
    base = moment_residual(window, N) if len(window) >= 3 else None
    closure = moment_residual(images, N) if base is not None else None
    report.results["transform"] = {"id": gid, "epsilon": eps, "at_time": at_time}
    report.results["transformed_moment_residuals"] = closure
    if closure is not None:
        for row, b in base.items():
            if b < CLOSURE_FLOOR:
                report.results.setdefault("closure_not_assessed", []).append(row)
                continue
            ratio = closure[row] / b
            report.add(f"closure:{gid}:{row}", ratio <= CLOSURE_FACTOR, ratio, CLOSURE_FACTOR)

    remaining = nsteps - start * stride
    evolved = run(apply_finite_transform(history[start], gid, eps), cfg["dt"], remaining, stride)
    _write_csv(out, "vlasov_transformed_history.csv", header, _history_rows(evolved), report)
    if gid in ("X4", "X5"):
        try:
            omega = _mean_field_frequency(evolved)
            err = abs(omega - 1.0)
            report.add(f"frequency:{gid}", err <= cfg["frequency_tolerance"], err, cfg["frequency_tolerance"],
                       note=f"measured {omega:.10g}, expected 1")
            report.results["mean_field_frequency"] = omega
        except FrequencyError as exc:
            report.add(f"frequency:{gid}", False, note=str(exc))


SIMULATORS = {
    "hm-reduced": (HM_REDUCED_DEFAULTS, _simulate_hm_reduced),
    "hm-2d": (HM_2D_DEFAULTS, _simulate_hm_2d),
    "vlasov": (VLASOV_DEFAULTS, _simulate_vlasov),
}


def cmd_simulate(args, cfg: dict, out: Path | None) -> Report:
    defaults, fn = SIMULATORS[args.model]
    cfg = _merge(defaults, cfg, args.model)
    if args.seed is not None and "seed" in cfg:
        cfg["seed"] = args.seed
    report = Report(f"simulate {args.model}", cfg)
    fn(cfg, report, out)
    return report


# ---------------------------------------------------------------- reduce

REDUCE_DEFAULTS = {
    "L": 4 * math.pi, "V": 6.0, "Nx": 64, "Nv": 64, "dt": 0.01, "steps": 500, "t_end": None,
    "species": [
        {"name": "alpha", "e": 2, "m": 4, "profile": {"kind": "maxwellian", "density": 0.1, "vth": 0.5,
                                                      "amplitude": 0.05}},
        {"name": "deuteron", "e": 1, "m": 2, "profile": {"kind": "maxwellian", "density": 0.8, "vth": 0.5}},
        {"name": "electrons", "e": -1, "m": 1, "profile": {"kind": "maxwellian", "amplitude": 0.02}},
    ],
    "pair": None, "mixing": ["const", "f1", "f1*f2", "f1/e2"], "exp_a": -40.0,
    "distance_tolerance": 1e-10, "charge_tolerance": 1e-12, "exp_tolerance": 1e-16,
}


def cmd_reduce(args, cfg: dict, out: Path | None) -> Report:
    cfg = _merge(REDUCE_DEFAULTS, cfg, "reduce")
    if args.pair is not None:
        cfg["pair"] = list(args.pair)
    grid = _phase_grid(cfg)
    species = _species(cfg["species"])
    nsteps = _steps(cfg)
    pair = tuple(cfg["pair"]) if cfg["pair"] is not None else find_equal_qm_pair(species)
    if len(pair) != 2 or not all(isinstance(i, int) and 0 <= i < len(species) for i in pair) or pair[0] == pair[1]:
        raise ConfigError(f"pair must name two distinct species indices, got {list(pair)}")
    for kind in cfg["mixing"]:
        if kind not in NUMERIC_MIXING:
            raise ConfigError(f"unknown mixing kind {kind!r}; choose from {', '.join(NUMERIC_MIXING)}")
    report = Report("reduce", cfg)
    state = initial_state(grid, species)

    eq = reduction_equivalence(state, cfg["dt"], nsteps, pair)
    tol = cfg["distance_tolerance"]
    report.add("e_field_distance", eq.relative_l2 <= tol, eq.relative_l2, tol)
    reduced, red = reduce_equal_qm(state, pair)
    report.results["pair"] = [species[pair[0]].name, species[pair[1]].name]
    report.results["caveats"] = red.caveats()
    report.results["charge_density_max_change"] = {"reduction": red.charge_density_max_change}
    report.add("charge_density:reduction", red.charge_density_max_change <= cfg["charge_tolerance"],
               red.charge_density_max_change, cfg["charge_tolerance"])

    for kind in cfg["mixing"]:
        _, res = extended_transform(state, pair, kind)
        report.results["charge_density_max_change"][kind] = res.charge_density_max_change
        report.results.setdefault("mixing_caveats", {})[kind] = res.caveats()
        report.add(f"charge_density:{kind}", res.charge_density_max_change <= cfg["charge_tolerance"],
                   res.charge_density_max_change, cfg["charge_tolerance"])

    a = cfg["exp_a"]
    expo = exp_family_transform(state, a, pair)
    i, j = pair
    target = reduced.f[j if j < i else j - 1]
    d2 = float(np.max(np.abs(expo.f[j] - target)) / np.max(np.abs(target)))
    d1 = float(np.max(np.abs(expo.f[i])) / np.max(np.abs(state.f[i])))
    dist = max(d1, d2) if a < 0 else math.inf
    report.add("exp_family_limit", dist < cfg["exp_tolerance"], dist, cfg["exp_tolerance"],
               note=f"a = {a:g}")
    _write_csv(out, "reduce_efield.csv", ["time", "l2_full", "l2_reduced", "l2_difference"],
               ([n * cfg["dt"], float(np.linalg.norm(ef)), float(np.linalg.norm(er)), float(np.linalg.norm(ef - er))]
                for n, (ef, er) in enumerate(zip(eq.e_full, eq.e_reduced))), report)
    return report


# ---------------------------------------------------------------- list-cases


def cmd_list_cases(args, cfg: dict, out: Path | None) -> Report:
    report = Report("list-cases", {})
    report.results["exact_cases"] = list(CASES)
    report.results["models"] = list(MODELS)
    report.results["generators"] = {k: list(v) for k, v in CATALOGUE.items()}
    report.results["bundled_files"] = sorted(p.name for p in bundle_dir().iterdir() if p.is_file())
    return report


# ---------------------------------------------------------------- driver


def _common(parser: argparse.ArgumentParser, top: bool) -> None:
    d = {} if top else {"default": argparse.SUPPRESS}
    parser.add_argument("--config", metavar="PATH", help="JSON configuration file", **d)
    parser.add_argument("--out", metavar="DIR", help="directory for report.json and CSV data", **d)
    parser.add_argument("--seed", type=int, metavar="U64", help="random seed (overrides the config)", **d)
    parser.add_argument("--json", action="store_true", help="print the JSON report to stdout", **d)


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="plasmasym", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    _common(p, top=True)
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("check", help="check generators against a PDE system")
    c.add_argument("system", help="system file (path or bundled name, e.g. emhd.sys)")
    c.add_argument("generators", nargs="+", help="generator file(s)")
    c.add_argument("--side", help="side-condition file for a conditional check")
    c.set_defaults(func=cmd_check)

    v = sub.add_parser("verify-exact", help="substitute a closed-form solution")
    v.add_argument("case", choices=list(CASES))
    v.add_argument("--generic-omega", action="store_true", help="leave the wave frequency symbolic")
    v.set_defaults(func=cmd_verify_exact)

    s = sub.add_parser("simulate", help="run a solver and its diagnostics")
    s.add_argument("model", choices=MODELS)
    s.set_defaults(func=cmd_simulate)

    r = sub.add_parser("reduce", help="fold an equal charge-to-mass pair and compare runs")
    r.add_argument("--pair", type=int, nargs=2, metavar=("FROM", "INTO"), help="species indices")
    r.set_defaults(func=cmd_reduce)

    ls = sub.add_parser("list-cases", help="list exact cases, models and bundled files")
    ls.set_defaults(func=cmd_list_cases)

    for sp in (c, v, s, r, ls):
        _common(sp, top=False)
    return p


def _print_human(report: Report, seconds: float) -> None:
    if report.command == "list-cases":
        for key, val in report.results.items():
            print(f"{key}:")
            items = val.items() if isinstance(val, dict) else ((x, None) for x in val)
            for k, extra in items:
                print(f"  {k}" + (f"  {extra}" if extra else ""))
        return
    for c in report.checks:
        tag = "PASS" if c.passed else "FAIL"
        val = "" if c.value is None else f"  value={c.value if isinstance(c.value, str) else f'{c.value:.3e}'}"
        tol = "" if c.tolerance is None else f"  tol={c.tolerance:.1e}"
        note = f"  ({c.note})" if c.note else ""
        print(f"{tag}  {c.name}{val}{tol}{note}")
    print(f"{'PASS' if report.passed else 'FAIL'}: {sum(c.passed for c in report.checks)}/{len(report.checks)} "
          f"checks in {seconds:.2f} s")


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    t0 = time.perf_counter()
    try:
        cfg = load_config(args.config)
        out = None
        if args.out:
            out = Path(args.out)
            out.mkdir(parents=True, exist_ok=True)
        report = args.func(args, cfg, out)
    except (DslError, RuleError) as exc:
        print(f"plasmasym: parse error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (FileNotFoundError, ConfigError, UnknownCaseError, NoEligiblePairError, QmMismatchError,
            TransformError, NeutralityError, ValueError) as exc:
        msg = exc.args[0] if isinstance(exc, KeyError) and exc.args else exc
        print(f"plasmasym: error: {msg}", file=sys.stderr)
        return EXIT_USAGE
    except (SolverError, VlasovError, RewriteBudgetError, FloatingPointError) as exc:
        print(f"plasmasym: numerical abort: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    seconds = time.perf_counter() - t0
    doc = report.to_json()
    if out is not None:
        (out / "report.json").write_text(_dumps(doc), encoding="utf-8")
    if args.json:
        sys.stdout.write(_dumps({**doc, "timing": {"seconds": round(seconds, 3)}}))
    else:
        _print_human(report, seconds)
    return EXIT_PASS if report.passed else EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())

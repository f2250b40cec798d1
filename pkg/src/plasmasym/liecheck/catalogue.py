"""Systems and generators of the plasma models, built programmatically.

Every builder returns objects in a fresh :class:`Scope`; :func:`bundle_files`
renders them to the DSL files shipped under ``plasmasym/bundled``.
"""

from __future__ import annotations

from pathlib import Path

from ..symkernel import Expr, PdeSystem, Scope, cos, sin, total_derivative
from ..symkernel.expr import ONE, ZERO
from .core import Generator, scope_with_functions

XYZ = ("x", "y", "z")


class UnknownGeneratorError(KeyError):
    pass


def _scope(independents, dependents, parameters=(), functions=()) -> Scope:
    s = Scope()
    for n in independents:
        s.declare(n, "independent")
    for n in dependents:
        s.declare(n, "dependent")
    for n in parameters:
        s.declare(n, "parameter")
    for name, args in functions:
        s.declare_function(name, args)
    return s


def _variables(scope: Scope):
    return (tuple(scope.independents), tuple(scope.dependents))


# -------------------------------------------------------------------- EMHD

EMHD_VECTORS = ("Psi", "v", "B")


def emhd_scope() -> Scope:
    deps = [f"{v}{i}" for v in EMHD_VECTORS for i in (1, 2, 3)]
    return _scope(("t",) + XYZ, deps)


def _vec(scope, name):
    return [scope.expr(f"{name}{i}") for i in (1, 2, 3)]


def _d(e, var):
    return total_derivative(e, var)


def curl(w):
    x, y, z = XYZ
    return [_d(w[2], y) - _d(w[1], z), _d(w[0], z) - _d(w[2], x), _d(w[1], x) - _d(w[0], y)]


def cross(a, b):
    return [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]


def laplacian(e, variables=XYZ):
    out = ZERO
    for v in variables:
        out = out + _d(_d(e, v), v)
    return out


def divergence(w):
    return sum((_d(c, v) for c, v in zip(w, XYZ)), ZERO)


def emhd_system() -> PdeSystem:
    """Psi_t = curl(v x Psi), Psi = B - lap B, v = -curl B, div B = 0."""
    s = emhd_scope()
    psi, v, b = _vec(s, "Psi"), _vec(s, "v"), _vec(s, "B")
    nonlinear = curl(cross(v, psi))
    curl_b = curl(b)
    evolution = [_d(psi[i], "t") - nonlinear[i] for i in range(3)]
    vorticity = [psi[i] - b[i] + laplacian(b[i]) for i in range(3)]
    velocity = [v[i] + curl_b[i] for i in range(3)]
    div_b = divergence(b)
    rules = [(v[i], -curl_b[i]) for i in range(3)]
    rules += [(psi[i], b[i] - laplacian(b[i])) for i in range(3)]
    rules += [(_d(b[2], "z"), -_d(b[0], "x") - _d(b[1], "y"))]
    rules += [(_d(psi[i], "t"), nonlinear[i]) for i in range(3)]
    return PdeSystem(s, evolution + vorticity + velocity + [div_b], rules, name="emhd")


def _rotation(axis: str, scope: Scope, vectors) -> Generator:
    i = XYZ.index(axis)
    j, k = (i + 1) % 3, (i + 2) % 3
    xj, xk = scope.expr(XYZ[j]), scope.expr(XYZ[k])
    # (r x d/dr)_i = x_j d/dx_k - x_k d/dx_j, same pattern on each vector field
    xi = {XYZ[k]: xj, XYZ[j]: -xk}
    eta = {}
    for name in vectors:
        comp = _vec(scope, name)
        eta[f"{name}{k + 1}"] = comp[j]
        eta[f"{name}{j + 1}"] = -comp[k]
    return Generator(xi, eta, f"X6{axis}", _variables(scope))


def emhd_generators(scope: Scope | None = None) -> list[Generator]:
    s = scope or emhd_scope()
    var = _variables(s)
    gens = [Generator({n: ONE}, {}, f"X{i}", var) for i, n in enumerate(("t",) + XYZ, start=1)]
    eta = {f"{v}{i}": -s.expr(f"{v}{i}") for v in ("v", "B", "Psi") for i in (1, 2, 3)}
    gens.append(Generator({"t": s.expr("t")}, eta, "X5", var))
    gens += [_rotation(a, s, EMHD_VECTORS) for a in XYZ]
    return gens


# ------------------------------------------------------------ Hasegawa-Mima


def hm_scope() -> Scope:
    return _scope(("t", "x", "y"), ("Phi", "Psi"))


def poisson_bracket(f, g, x="x", y="y"):
    return _d(f, x) * _d(g, y) - _d(g, x) * _d(f, y)


def hm_system() -> PdeSystem:
    """Psi_t + J(Phi, Psi) = Phi_y, Psi = Phi - lap_perp Phi."""
    s = hm_scope()
    phi, psi = s.expr("Phi"), s.expr("Psi")
    evolution = _d(psi, "t") + poisson_bracket(phi, psi) - _d(phi, "y")
    vorticity = psi - phi + laplacian(phi, ("x", "y"))
    rules = [
        (psi, phi - laplacian(phi, ("x", "y"))),
        (_d(psi, "t"), _d(phi, "y") - poisson_bracket(phi, psi)),
    ]
    return PdeSystem(s, [evolution, vorticity], rules, name="hm")


def hm_generators(scope: Scope | None = None) -> dict[str, Generator]:
    s = scope or hm_scope()
    var = _variables(s)
    x, t, y = s.expr("x"), s.expr("t"), s.expr("y")
    return {
        "X1": Generator({"x": x}, {"Phi": s.expr("Phi"), "Psi": s.expr("Psi")}, "X1", var),
        "X2": Generator({"t": t, "y": y}, {}, "X2", var),
        "Xscale": Generator({"x": x}, {}, "Xscale", var),
        "Dt": Generator({"t": ONE}, {}, "Dt", var),
        "Dx": Generator({"x": ONE}, {}, "Dx", var),
        "Dy": Generator({"y": ONE}, {}, "Dy", var),
    }


def hm_side_conditions(scope: Scope | None = None) -> dict[str, list[Expr]]:
    s = scope or hm_scope()
    return {"X1": [s.parse("D(Phi,x,x)")], "X2": [s.parse("D(Phi,y,y)")]}


def reduced_hm_scope() -> Scope:
    return _scope(("t", "y"), ("F", "G"))


def reduced_hm_system() -> PdeSystem:
    """d_t(1/(G+1)) + d_y(F/(G+1)) = 0,  G = F - F_yy."""
    s = reduced_hm_scope()
    f, g = s.expr("F"), s.expr("G")
    h = ONE / (g + 1)
    conservation = _d(h, "t") + _d(f * h, "y")
    helmholtz = g - f + _d(_d(f, "y"), "y")
    rules = [(g, f - _d(_d(f, "y"), "y")), (_d(g, "t"), (g + 1) ** 2 * _d(f * h, "y"))]
    return PdeSystem(s, [conservation, helmholtz], rules, name="hm-reduced")


# ---------------------------------------------------------- moment hierarchy


def moment_scope(n: int) -> Scope:
    if n < 0:
        raise ValueError("truncation order must be non-negative")
    return _scope(("t", "x"), ["E"] + [f"M{k}" for k in range(n + 2)], functions=())


def build_moment_system(n: int) -> PdeSystem:
    """Rows k = 0..n of M_k,t + M_{k+1},x + k E M_{k-1} = 0 with E_x = 1 - M0, E_t = M1."""
    s = moment_scope(n)
    e = s.expr("E")
    m = [s.expr(f"M{k}") for k in range(n + 2)]
    eqs = []
    for k in range(n + 1):
        row = _d(m[k], "t") + _d(m[k + 1], "x")
        if k:
            row = row + k * e * m[k - 1]
        eqs.append(row)
    eqs += [_d(e, "x") - 1 + m[0], _d(e, "t") - m[1]]
    return PdeSystem(s, eqs, name=f"moments-N{n}")


def moment_generators(n: int, scope: Scope | None = None) -> dict[str, Generator]:
    s = scope or moment_scope(n)
    var = _variables(s)
    t, x, e = s.expr("t"), s.expr("x"), s.expr("E")
    m = [s.expr(f"M{k}") for k in range(n + 2)]
    lift = {f"M{k}": k * m[k - 1] for k in range(1, n + 2)}
    gens = {
        "X1": Generator({"t": ONE}, {}, "X1", var),
        "X2": Generator({"x": ONE}, {}, "X2", var),
        "X3": Generator({"x": x}, {"E": e, **{f"M{k}": k * m[k] for k in range(1, n + 2)}}, "X3", var),
        "X4": Generator({"x": cos(t)}, {"E": cos(t), **{k: -sin(t) * v for k, v in lift.items()}}, "X4", var),
        "X5": Generator({"x": sin(t)}, {"E": sin(t), **{k: cos(t) * v for k, v in lift.items()}}, "X5", var),
    }
    fs = s.copy()
    fs.declare_function("F", ["t"])
    fs.declare_function("G", ["t"])
    f, g = fs.expr("F"), fs.expr("G")
    fprime = fs.parse("D(F,t)")
    gens["X_FGN"] = Generator({}, {f"M{n}": f, f"M{n + 1}": g - x * fprime}, "X_FGN", var)
    return gens


# ------------------------------------------------------------ kinetic form


def kinetic_scope() -> Scope:
    return _scope(("t", "x", "v"), ("f", "E", "M0", "M1"))


def kinetic_system() -> PdeSystem:
    """Vlasov equation coupled to E_x = 1 - M0 and E_t = M1; E, M_k independent of v."""
    s = kinetic_scope()
    f, e, m0, m1, v = (s.expr(n) for n in ("f", "E", "M0", "M1", "v"))
    eqs = [
        _d(f, "t") + v * _d(f, "x") - e * _d(f, "v"),
        _d(e, "x") - 1 + m0,
        _d(e, "t") - m1,
        _d(e, "v"),
        _d(m0, "v"),
        _d(m1, "v"),
    ]
    return PdeSystem(s, eqs, name="vlasov-kinetic")


def kinetic_generators(scope: Scope | None = None) -> dict[str, Generator]:
    """Kinetic generators with their induced action on M0, M1."""
    s = scope or kinetic_scope()
    var = _variables(s)
    t, x, v, e, f = (s.expr(n) for n in ("t", "x", "v", "E", "f"))
    m0, m1 = s.expr("M0"), s.expr("M1")
    return {
        "X1": Generator({"t": ONE}, {}, "X1", var),
        "X2": Generator({"x": ONE}, {}, "X2", var),
        "X3": Generator({"x": x, "v": v}, {"E": e, "f": -f, "M1": m1}, "X3", var),
        "X4": Generator({"x": cos(t), "v": -sin(t)}, {"E": cos(t), "M1": -sin(t) * m0}, "X4", var),
        "X5": Generator({"x": sin(t), "v": cos(t)}, {"E": sin(t), "M1": cos(t) * m0}, "X5", var),
    }


# -------------------------------------------------------------- catalogue

CATALOGUE = {
    "emhd": ("X1", "X2", "X3", "X4", "X5", "X6", "X6x", "X6y", "X6z"),
    "moments": ("X1", "X2", "X3", "X4", "X5", "X_FGN"),
    "kinetic": ("X1", "X2", "X3", "X4", "X5"),
    "hm": ("X1", "X2", "Xscale", "Dt", "Dx", "Dy"),
}


def build_paper_generator(label: str, scope: str = "emhd", n: int = 2, axis: str = "z") -> Generator:
    """Generator ``label`` of the model ``scope`` (emhd, moments, kinetic, hm).

    ``n`` is the truncation order for the moment scope; ``X6`` on EMHD is the
    rotation about ``axis``.
    """
    if scope not in CATALOGUE or label not in CATALOGUE[scope]:
        raise UnknownGeneratorError(f"unknown generator {label!r} for scope {scope!r}")
    if scope == "emhd":
        if label == "X6":
            label = f"X6{axis}"
        return {g.label: g for g in emhd_generators()}[label]
    if scope == "moments":
        return moment_generators(n)[label]
    if scope == "kinetic":
        return kinetic_generators()[label]
    return hm_generators()[label]


# ---------------------------------------------------------------- bundle

MAX_BUNDLED_N = 4


def _gen_file(scope: Scope, gens) -> str:
    out = []
    decl = set()
    for g in gens:
        ext = scope_with_functions(scope, g)
        for name, args in ext.functions.items():
            if name not in scope.functions and name not in decl:
                out.append(f"function {name}({', '.join(args)})")
                decl.add(name)
    for g in gens:
        out.append(g.to_dsl().rstrip())
    return "\n".join(out) + "\n"


def bundle_files() -> dict[str, str]:
    """Filename -> DSL text for every bundled system, generator and side file."""
    files: dict[str, str] = {}
    emhd = emhd_system()
    files["emhd.sys"] = emhd.to_dsl()
    gens = {g.label: g for g in emhd_generators(emhd.scope)}
    for i in range(1, 6):
        files[f"emhd-x{i}.gen"] = _gen_file(emhd.scope, [gens[f"X{i}"]])
    files["emhd-x6.gen"] = _gen_file(emhd.scope, [gens[f"X6{a}"] for a in XYZ])

    hm = hm_system()
    files["hm.sys"] = hm.to_dsl()
    hg = hm_generators(hm.scope)
    files["hm-x1.gen"] = _gen_file(hm.scope, [hg["X1"]])
    files["hm-x2.gen"] = _gen_file(hm.scope, [hg["X2"]])
    files["hm-xscale.gen"] = _gen_file(hm.scope, [hg["Xscale"]])
    files["hm-x1.side"] = "side: D(Phi,x,x) = 0\n"
    files["hm-x2.side"] = "side: D(Phi,y,y) = 0\n"
    files["hm-reduced.sys"] = reduced_hm_system().to_dsl()

    for n in range(MAX_BUNDLED_N + 1):
        ms = build_moment_system(n)
        files[f"moments-N{n}.sys"] = ms.to_dsl()
        mg = moment_generators(n, ms.scope)
        for i in range(1, 6):
            files[f"moments-N{n}-x{i}.gen"] = _gen_file(ms.scope, [mg[f"X{i}"]])
        files[f"moments-N{n}-xfgn.gen"] = _gen_file(ms.scope, [mg["X_FGN"]])

    ks = kinetic_system()
    files["vlasov-kinetic.sys"] = ks.to_dsl()
    kg = kinetic_generators(ks.scope)
    for i in range(1, 6):
        files[f"vlasov-kinetic-x{i}.gen"] = _gen_file(ks.scope, [kg[f"X{i}"]])
    return files


def bundle_dir() -> Path:
    return Path(__file__).resolve().parent.parent / "bundled"


def write_bundle(directory: Path | None = None) -> list[Path]:
    directory = Path(directory or bundle_dir())
    directory.mkdir(parents=True, exist_ok=True)
    written = []
    for name, text in bundle_files().items():
        p = directory / name
        p.write_text(text, encoding="utf-8")
        written.append(p)
    return written

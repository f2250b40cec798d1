"""Point generators, prolongation and (conditional) symmetry checks."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from itertools import combinations_with_replacement
from typing import Sequence

from ..symkernel import Deriv, Expr, PdeSystem, RuleSet, Sym, is_zero, max_order, to_dsl
from ..symkernel.calculus import total_derivative
from ..symkernel.dsl import (
    DslSyntaxError,
    Scope,
    iter_lines,
    parse_declaration,
    parse_expression,
)
from ..symkernel.expr import ONE, ZERO, Func, apply_derivation, derivation

SYMMETRY = "symmetry"
NOT_A_SYMMETRY = "not-a-symmetry"


class ProlongationError(ValueError):
    pass


class ScopeMismatchError(ValueError):
    pass


@dataclass
class Generator:
    """``sum xi^i d/dx^i + sum eta^a d/du^a`` with point-only coefficients."""

    xi: dict[str, Expr] = field(default_factory=dict)
    eta: dict[str, Expr] = field(default_factory=dict)
    label: str = ""
    variables: tuple | None = None  # (independents, dependents) when bound to a scope

    def __post_init__(self):
        self.xi = {k: Expr.coerce(v) for k, v in self.xi.items() if not Expr.coerce(v).is_zero()}
        self.eta = {k: Expr.coerce(v) for k, v in self.eta.items() if not Expr.coerce(v).is_zero()}
        for comp in list(self.xi.values()) + list(self.eta.values()):
            for a in comp.free_atoms():
                if isinstance(a, Deriv) and a.order:
                    raise ValueError(f"{self.label}: coefficient {comp} contains a derivative (not a point generator)")
        order = list(self.variables[0]) + list(self.variables[1]) if self.variables else []
        rank = {n: i for i, n in enumerate(order)}
        self.xi = dict(sorted(self.xi.items(), key=lambda kv: (rank.get(kv[0], len(rank)), kv[0])))
        self.eta = dict(sorted(self.eta.items(), key=lambda kv: (rank.get(kv[0], len(rank)), kv[0])))

    def is_zero(self) -> bool:
        return not self.xi and not self.eta

    def _combine(self, other: Generator, a, b, label) -> Generator:
        _check_scope(self, other)
        xi = {k: a * self.xi.get(k, ZERO) + b * other.xi.get(k, ZERO) for k in set(self.xi) | set(other.xi)}
        eta = {k: a * self.eta.get(k, ZERO) + b * other.eta.get(k, ZERO) for k in set(self.eta) | set(other.eta)}
        return Generator(xi, eta, label, self.variables or other.variables)

    def __add__(self, other):
        return self._combine(other, ONE, ONE, f"{self.label}+{other.label}")

    def __sub__(self, other):
        return self._combine(other, ONE, -ONE, f"{self.label}-{other.label}")

    def scaled(self, c) -> Generator:
        c = Expr.coerce(c)
        return Generator({k: c * v for k, v in self.xi.items()}, {k: c * v for k, v in self.eta.items()},
                         self.label, self.variables)

    def action(self):
        """Atom derivation of the generator on base coordinates."""
        xi, eta = self.xi, self.eta

        def base(a):
            if isinstance(a, Sym):
                return xi.get(a.name)
            if isinstance(a, Deriv):
                if a.order:
                    raise ValueError("a point generator acts on base coordinates only")
                return eta.get(a.field)
            return None

        return derivation(base)

    def apply(self, phi: Expr) -> Expr:
        return apply_derivation(Expr.coerce(phi), self.action())

    def to_dsl(self) -> str:
        lines = [f"generator {self.label or 'X'}"]
        lines += [f"xi {k} = {to_dsl(v)}" for k, v in self.xi.items()]
        lines += [f"eta {k} = {to_dsl(v)}" for k, v in self.eta.items()]
        return "\n".join(lines) + "\n"

    def __str__(self):
        parts = [f"({to_dsl(v)})*d/d{k}" for k, v in list(self.xi.items()) + list(self.eta.items())]
        return " + ".join(parts) if parts else "0"


def _check_scope(g1: Generator, g2: Generator):
    if g1.variables and g2.variables and g1.variables != g2.variables:
        raise ScopeMismatchError(f"generators {g1.label} and {g2.label} live on different variable scopes")


@dataclass
class ProlongedGenerator:
    base: Generator
    order: int
    eta_J: dict  # Deriv -> Expr
    independents: list

    def action(self):
        xi, table, order = self.base.xi, self.eta_J, self.order

        def base(a):
            if isinstance(a, Sym):
                return xi.get(a.name)
            if isinstance(a, Deriv):
                if a.order > order:
                    raise ProlongationError(f"coordinate {Expr.atom(a)} exceeds prolongation order {order}")
                v = table.get(a)
                return None if v is None or v.is_zero() else v
            return None

        return derivation(base)

    def apply(self, expr: Expr) -> Expr:
        """pr(X) applied to an expression on the jet space."""
        return apply_derivation(Expr.coerce(expr), self.action())


def _multi_indices(independents, order):
    for n in range(1, order + 1):
        for combo in combinations_with_replacement(independents, n):
            yield combo


def prolong(g: Generator, system: PdeSystem, order: int | None = None) -> ProlongedGenerator:
    """Prolongation by eta_{J,i} = D_i(eta_J) - sum_k D_i(xi^k) u_{J,k}."""
    need = system.order
    if order is None:
        order = need
    if order < need:
        raise ProlongationError(f"prolongation order {order} is below the system order {need}")
    indep = system.independents
    table: dict = {Deriv(u): g.eta.get(u, ZERO) for u in system.dependents}
    dxi = {i: {k: total_derivative(x, i) for k, x in g.xi.items()} for i in indep}
    for combo in _multi_indices(indep, order):
        for u in system.dependents:
            idx: dict = {}
            for v in combo:
                idx[v] = idx.get(v, 0) + 1
            coord = Deriv(u, idx)
            i = combo[-1]
            parent = coord.raised(i, -1)
            val = total_derivative(table[parent], i)
            for k, dk in dxi[i].items():
                if not dk.is_zero():
                    val = val - dk * Expr.atom(parent.raised(k))
            table[coord] = val
    return ProlongedGenerator(g, order, table, list(indep))


@dataclass
class SymmetryReport:
    verdict: str
    residuals: list
    witness: Expr | None = None
    conditions_used: list = field(default_factory=list)
    system: str = ""
    generator: str = ""

    @property
    def passed(self) -> bool:
        return self.verdict == SYMMETRY

    def to_json(self) -> dict:
        doc = {
            "system": self.system,
            "generator": self.generator,
            "verdict": self.verdict,
            "residuals": [to_dsl(r) for r in self.residuals],
            "conditions": [to_dsl(c) for c in self.conditions_used],
        }
        if self.witness is not None:
            doc["witness"] = to_dsl(self.witness)
        return doc

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2)


def _report(residuals, conditions, system, g) -> SymmetryReport:
    witness = None
    for r in residuals:
        zero, w = is_zero(r)
        if not zero:
            witness = w
            break
    verdict = SYMMETRY if witness is None else NOT_A_SYMMETRY
    return SymmetryReport(verdict, residuals, witness, list(conditions), system.name, g.label)


def symmetry_residuals(g: Generator, system: PdeSystem, rules: RuleSet | None = None,
                       extra: Sequence[Expr] = ()) -> list[Expr]:
    rules = rules or system.ruleset
    order = max(system.order, max_order(extra))
    pg = prolong(g, system, order)
    return [rules.reduce(pg.apply(eq)) for eq in list(system.equations) + list(extra)]


def check_symmetry(g: Generator, system: PdeSystem) -> SymmetryReport:
    """Apply pr(g) to every equation and reduce on-shell."""
    return _report(symmetry_residuals(g, system), [], system, g)


def check_conditional_symmetry(g: Generator, system: PdeSystem, side: Sequence[Expr]) -> SymmetryReport:
    """Symmetry check modulo side conditions, which must themselves be invariant."""
    side = [Expr.coerce(s) for s in side]
    if not side:
        return check_symmetry(g, system)
    rules = system.with_side_conditions(side)
    residuals = symmetry_residuals(g, system, rules, side)
    return _report(residuals, side, system, g)


def commutator(g1: Generator, g2: Generator) -> Generator:
    """Lie bracket [g1, g2] of point generators."""
    _check_scope(g1, g2)
    xi = {k: g1.apply(g2.xi.get(k, ZERO)) - g2.apply(g1.xi.get(k, ZERO)) for k in set(g1.xi) | set(g2.xi)}
    eta = {k: g1.apply(g2.eta.get(k, ZERO)) - g2.apply(g1.eta.get(k, ZERO)) for k in set(g1.eta) | set(g2.eta)}
    return Generator(xi, eta, f"[{g1.label},{g2.label}]", g1.variables or g2.variables)


# ------------------------------------------------------------------ files


def parse_generators(text: str, scope: Scope) -> list[Generator]:
    """Generator file: ``generator <label>`` then ``xi``/``eta`` lines.

    Declaration lines (e.g. ``function F(t)``) extend a private copy of the
    scope.  A file may hold several generators.
    """
    scope = scope.copy()
    gens: list[Generator] = []
    current = None
    variables = (tuple(scope.independents), tuple(scope.dependents))
    for line, col, content in iter_lines(text):
        if parse_declaration(content, scope, line):
            continue
        head, _, rest = content.partition(" ")
        if head == "generator":
            current = {"label": rest.strip() or f"X{len(gens) + 1}", "xi": {}, "eta": {}}
            gens.append(current)
            continue
        if head not in ("xi", "eta"):
            raise DslSyntaxError(f"unrecognised line {content!r}", line, col)
        if current is None:
            raise DslSyntaxError("xi/eta line before any 'generator' header", line, col)
        name, eq, body = rest.partition("=")
        name = name.strip()
        if not eq:
            raise DslSyntaxError("expected '='", line, col)
        kind = scope.kinds.get(name)
        want = "independent" if head == "xi" else "dependent"
        if kind != want:
            raise DslSyntaxError(f"{head} line needs a declared {want} variable, got {name!r}", line, col)
        current[head][name] = parse_expression(body, scope, line, col + content.index("=") + 1)
    return [Generator(g["xi"], g["eta"], g["label"], variables) for g in gens]


def scope_with_functions(scope: Scope, g: Generator) -> Scope:
    """Scope extended by the function atoms a generator mentions (for printing)."""
    out = scope.copy()
    for comp in list(g.xi.values()) + list(g.eta.values()):
        for a in comp.free_atoms():
            if isinstance(a, Func) and a.name not in out.functions:
                out.declare_function(a.name, [x.name if isinstance(x, Sym) else x.field for x in a.args])
    return out

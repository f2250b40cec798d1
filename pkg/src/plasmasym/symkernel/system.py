"""PDE systems, ordered rewrite rules and on-shell reduction."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

from .calculus import max_order, total_derivative
from .dsl import (
    DslError,
    DslSyntaxError,
    Scope,
    iter_lines,
    parse_declaration,
    parse_expression,
    split_equation,
    to_dsl,
)
from .expr import Deriv, Expr, p_coeff, p_degree


class RewriteBudgetError(RuntimeError):
    """The rewrite system did not terminate within its step budget."""


class RuleError(ValueError):
    pass


@dataclass(frozen=True)
class Rule:
    lhs: Deriv
    rhs: Expr

    def __str__(self):
        return f"{to_dsl(Expr.atom(self.lhs))} -> {to_dsl(self.rhs)}"


def _divides(low: Deriv, high: Deriv) -> bool:
    if low.field != high.field:
        return False
    hi = high.multi_index
    return all(hi.get(v, 0) >= n for v, n in low.index)


class RuleSet:
    """Ordered rules applied together with all their differential consequences.

    A coordinate ``u_K`` is rewritten by the first rule ``u_J -> r`` with
    ``J <= K``; its normal form is ``reduce(D_{K-J} r)``, computed one
    derivative at a time and memoised.
    """

    def __init__(self, rules: Sequence[Rule], independents: Sequence[str] = (), budget: int = 200_000):
        self.rules = list(rules)
        self.independents = list(independents)
        self.budget = budget
        self.steps = 0
        self._nf: dict = {}
        self._active: set = set()
        self._by_field: dict[str, list[Rule]] = {}
        for r in self.rules:
            self._by_field.setdefault(r.lhs.field, []).append(r)

    def match(self, a: Deriv) -> Rule | None:
        for r in self._by_field.get(a.field, ()):
            if _divides(r.lhs, a):
                return r
        return None

    def _tick(self):
        self.steps += 1
        if self.steps > self.budget:
            raise RewriteBudgetError(f"rewrite budget of {self.budget} steps exhausted")

    def normal_form(self, a: Deriv) -> Expr | None:
        """Fully reduced replacement of ``a``, or None if ``a`` is irreducible."""
        if a in self._nf:
            return self._nf[a]
        rule = self.match(a)
        if rule is None:
            self._nf[a] = None
            return None
        if a in self._active:
            raise RewriteBudgetError(f"rewriting {Expr.atom(a)} does not terminate")
        self._active.add(a)
        try:
            self._tick()
            if a == rule.lhs:
                out = self.reduce(rule.rhs)
            else:
                mi = a.multi_index
                lo = rule.lhs.multi_index
                order = self.independents or sorted(mi)
                var = next(v for v in order if mi.get(v, 0) > lo.get(v, 0))
                lower = a.raised(var, -1)
                base = self.normal_form(lower)
                if base is None:
                    base = Expr.atom(lower)
                out = self.reduce(total_derivative(base, var))
        finally:
            self._active.discard(a)
        self._nf[a] = out
        return out

    def reduce(self, e: Expr) -> Expr:
        e = Expr.coerce(e)
        mapping = {}
        for a in e.atoms():
            if isinstance(a, Deriv):
                nf = self.normal_form(a)
                if nf is not None:
                    mapping[a] = nf
        return e.subs(mapping) if mapping else e

    def reducible(self, e: Expr) -> bool:
        return any(isinstance(a, Deriv) and self.match(a) is not None for a in e.atoms())


def substitute(e: Expr, rules: Sequence, with_differential_consequences: bool = False,
               independents: Sequence[str] = (), budget: int = 200_000) -> Expr:
    """Apply ordered rules ``(lhs, rhs)`` to a fixpoint.

    With ``with_differential_consequences`` every rule ``u_J -> r`` also
    rewrites ``u_{J+K}`` to ``D_K r``.
    """
    rules = [r if isinstance(r, Rule) else Rule(_as_coord(r[0]), Expr.coerce(r[1])) for r in rules]
    if not rules:
        return Expr.coerce(e)
    if with_differential_consequences:
        return RuleSet(rules, independents, budget).reduce(e)
    table = {}
    for r in rules:
        table.setdefault(r.lhs, r.rhs)
    e = Expr.coerce(e)
    for _ in range(budget):
        hits = {a: table[a] for a in e.atoms() if a in table}
        if not hits:
            return e
        e = e.subs(hits)
    raise RewriteBudgetError(f"rewrite budget of {budget} steps exhausted")


def _as_coord(x) -> Deriv:
    if isinstance(x, Deriv):
        return x
    a = Expr.coerce(x).as_atom()
    if not isinstance(a, Deriv):
        raise RuleError(f"rule left side must be a derivative coordinate, got {x}")
    return a


def ranking_key(a: Deriv, independents: Sequence[str], dependents: Sequence[str]):
    """Orderly ranking: total order, then orders in declaration order of the
    independents, then earlier-declared fields first."""
    field_rank = -dependents.index(a.field) if a.field in dependents else 0
    return (a.order, tuple(a.count(v) for v in independents), field_rank)


def solve_for(eq: Expr, coord: Deriv) -> Expr | None:
    """Solve ``eq = 0`` for a coordinate occurring linearly; None otherwise."""
    num = eq.num
    if p_degree(num, coord) != 1:
        return None
    a = Expr(p_coeff(num, coord, 1))
    b = Expr(p_coeff(num, coord, 0))
    return -b / a


def leading_coordinate(eq: Expr, independents, dependents) -> Deriv | None:
    coords = [a for a in Expr(eq.num).atoms() if isinstance(a, Deriv)]
    if not coords:
        return None
    return max(coords, key=lambda a: ranking_key(a, independents, dependents))


def normalize_rules(entries: Iterable[tuple[Deriv | None, Expr]], independents: Sequence[str],
                    dependents: Sequence[str]) -> list[Rule]:
    """Turn ``(preferred lhs or None, expression = 0)`` entries into an ordered,
    inter-reduced rule list.

    Each entry is reduced modulo the rules built so far.  The preferred left
    side is kept when it survives the reduction irreducible and linear;
    otherwise the entry is solved for its leading coordinate in the orderly
    ranking.  Entries that reduce to zero are consequences and are dropped.
    """
    rules: list[Rule] = []
    for pref, eq in entries:
        rs = RuleSet(rules, independents)
        red = rs.reduce(eq)
        if red.is_zero():
            continue
        rhs = None
        lhs = pref
        if pref is not None and rs.match(pref) is None:
            rhs = solve_for(red, pref)
        if rhs is None:
            lhs = leading_coordinate(red, independents, dependents)
            if lhs is None:
                raise RuleError(f"equation {to_dsl(red)} = 0 has no derivative coordinate to solve for")
            rhs = solve_for(red, lhs)
            if rhs is None:
                raise RuleError(f"leading coordinate {Expr.atom(lhs)} is not linear in {to_dsl(red)} = 0")
        rules.append(Rule(lhs, rhs))
    out = []
    for i, r in enumerate(rules):
        others = RuleSet(rules[:i] + rules[i + 1 :], independents)
        rhs = others.reduce(r.rhs)
        own = RuleSet([r], independents)
        if own.reducible(rhs):
            raise RuleError(f"rule {r} rewrites into its own prolongation")
        out.append(Rule(r.lhs, rhs))
    return out


class PdeSystem:
    """Equations ``expr = 0`` over declared variables, with rewrite rules.

    ``rules`` are ``(lhs coordinate, rhs)`` pairs taken as preferred
    solved forms; without them each equation is solved for its leading
    coordinate.  Construction verifies that every equation reduces to zero.
    """

    def __init__(self, scope: Scope, equations: Sequence[Expr], rules: Sequence | None = None,
                 name: str = ""):
        self.scope = scope
        self.name = name
        self.equations = [Expr.coerce(e) for e in equations]
        if rules:
            self.raw_rules = [(_as_coord(l), Expr.coerce(r)) for l, r in rules]
            self._entries = [(l, Expr.atom(l) - r) for l, r in self.raw_rules]
        else:
            self.raw_rules = []
            self._entries = [(None, e) for e in self.equations]
        self.rules = normalize_rules(self._entries, self.independents, self.dependents)
        self.ruleset = RuleSet(self.rules, self.independents)
        for k, eq in enumerate(self.equations):
            red = self.ruleset.reduce(eq)
            if not red.is_zero():
                raise RuleError(f"rewrite rules do not cover equation {k + 1}: residual {to_dsl(red)}")

    @property
    def independents(self) -> list[str]:
        return self.scope.independents

    @property
    def dependents(self) -> list[str]:
        return self.scope.dependents

    @property
    def order(self) -> int:
        return max_order(self.equations)

    def with_side_conditions(self, side: Sequence[Expr]) -> RuleSet:
        """Rules of the system enlarged by side conditions (placed first)."""
        entries = [(None, Expr.coerce(s)) for s in side] + self._entries
        rules = normalize_rules(entries, self.independents, self.dependents)
        return RuleSet(rules, self.independents)

    def reduce(self, e: Expr) -> Expr:
        return self.ruleset.reduce(e)

    def to_dsl(self) -> str:
        lines = [f"# system {self.name}"] if self.name else []
        lines += self.scope.declaration_lines()
        lines += [f"eq: {to_dsl(e)} = 0" for e in self.equations]
        lines += [f"solve: {to_dsl(Expr.atom(l))} = {to_dsl(r)}" for l, r in self.raw_rules]
        return "\n".join(lines) + "\n"


def parse_system(text: str, name: str = "", scope: Scope | None = None) -> PdeSystem:
    """Parse a system file (declarations, ``eq:`` and ``solve:`` lines)."""
    scope = scope.copy() if scope is not None else Scope()
    equations, rules = [], []
    for line, col, content in iter_lines(text):
        if parse_declaration(content, scope, line):
            continue
        if content.startswith("eq:"):
            lhs, c1, rhs, c2 = split_equation(content[3:], line, col + 3)
            equations.append(parse_expression(lhs, scope, line, c1) - parse_expression(rhs, scope, line, c2))
        elif content.startswith("solve:"):
            lhs, c1, rhs, c2 = split_equation(content[6:], line, col + 6)
            target = parse_expression(lhs, scope, line, c1).as_atom()
            if not isinstance(target, Deriv):
                raise DslSyntaxError("solve: left side must be a derivative coordinate", line, c1)
            rules.append((target, parse_expression(rhs, scope, line, c2)))
        else:
            raise DslSyntaxError(f"unrecognised line {content!r}", line, col)
    if not equations:
        raise DslError("system declares no equations")
    return PdeSystem(scope, equations, rules or None, name=name)


def parse_side_conditions(text: str, scope: Scope) -> list[Expr]:
    """Side-condition file: ``side: <expr> = <expr>`` lines."""
    out = []
    for line, col, content in iter_lines(text):
        if not content.startswith("side:"):
            raise DslSyntaxError(f"unrecognised line {content!r}", line, col)
        lhs, c1, rhs, c2 = split_equation(content[5:], line, col + 5)
        out.append(parse_expression(lhs, scope, line, c1) - parse_expression(rhs, scope, line, c2))
    return out

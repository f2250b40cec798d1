"""Text DSL: declarations, expression parser and printer.

Expression grammar::

    expr   := term (('+'|'-') term)*
    term   := factor (('*'|'/') factor)*
    factor := ('+'|'-') factor | atom ['^' int]
    atom   := number | ident | D(ident, ident+) | sin(expr) | cos(expr) | '(' expr ')'

``D(field, x, x)`` is a jet coordinate; ``D(F, t)`` differentiates a declared
arbitrary function with respect to one of its arguments.
"""

from __future__ import annotations

import re
from fractions import Fraction

from .calculus import canonicalize
from .expr import (
    DEPENDENT,
    GROUP_PARAMETER,
    INDEPENDENT,
    PARAMETER,
    SYMBOL_KINDS,
    ZERO,
    Atom,
    Deriv,
    Expr,
    Func,
    Sym,
    Trig,
    cos,
    mono_key,
    sin,
)

RESERVED = {"D", "sin", "cos"}


class DslError(ValueError):
    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        self.line = line
        self.column = column
        where = ""
        if line is not None:
            where = f"line {line}, column {column}: " if column is not None else f"line {line}: "
        super().__init__(where + message)


class DslSyntaxError(DslError):
    pass


class UndeclaredIdentifierError(DslError):
    pass


class ExponentError(DslError):
    pass


class Scope:
    """Declared names: independents, dependents, parameters and functions."""

    def __init__(self):
        self.kinds: dict[str, str] = {}
        self.functions: dict[str, tuple[str, ...]] = {}

    def copy(self) -> Scope:
        s = Scope()
        s.kinds = dict(self.kinds)
        s.functions = dict(self.functions)
        return s

    def declare(self, name: str, kind: str) -> None:
        if kind not in SYMBOL_KINDS:
            raise ValueError(f"unknown kind {kind!r}")
        if name in RESERVED or not re.fullmatch(r"[A-Za-z_][A-Za-z_0-9]*", name):
            raise DslError(f"invalid identifier {name!r}")
        old = self.kinds.get(name) or ("function" if name in self.functions else None)
        if old is not None and old != kind:
            raise DslError(f"{name!r} already declared as {old}")
        self.kinds[name] = kind

    def declare_function(self, name: str, args) -> None:
        args = tuple(args)
        if name in self.kinds:
            raise DslError(f"{name!r} already declared as {self.kinds[name]}")
        if name in self.functions and self.functions[name] != args:
            raise DslError(f"function {name!r} redeclared with different arguments")
        for a in args:
            if a not in self.kinds:
                raise UndeclaredIdentifierError(f"argument {a!r} of {name!r} is undeclared")
        self.functions[name] = args

    def names(self, kind: str) -> list[str]:
        return [n for n, k in self.kinds.items() if k == kind]

    @property
    def independents(self) -> list[str]:
        return self.names(INDEPENDENT)

    @property
    def dependents(self) -> list[str]:
        return self.names(DEPENDENT)

    @property
    def parameters(self) -> list[str]:
        return self.names(PARAMETER) + self.names(GROUP_PARAMETER)

    def atom(self, name: str) -> Atom:
        kind = self.kinds.get(name)
        if kind is None:
            if name in self.functions:
                return self.function(name)
            raise UndeclaredIdentifierError(f"undeclared identifier {name!r}")
        if kind == DEPENDENT:
            return Deriv(name)
        return Sym(name, kind)

    def function(self, name: str) -> Func:
        return Func(name, tuple(self.atom(a) for a in self.functions[name]))

    def expr(self, name: str) -> Expr:
        return Expr.atom(self.atom(name))

    def parse(self, text: str) -> Expr:
        return parse_expression(text, self)

    def declaration_lines(self) -> list[str]:
        lines = []
        for kind in (INDEPENDENT, DEPENDENT, PARAMETER, GROUP_PARAMETER):
            names = self.names(kind)
            if names:
                lines.append(f"{kind} {' '.join(names)}")
        for name, args in self.functions.items():
            lines.append(f"function {name}({', '.join(args)})")
        return lines


# ------------------------------------------------------------------ lexer

_TOKEN = re.compile(
    r"(?P<ws>\s+)|(?P<num>\d+(?:\.\d*)?|\.\d+)|(?P<id>[A-Za-z_][A-Za-z_0-9]*)|(?P<op>\*\*|[-+*/^(),])"
)


def _tokenize(text: str, line: int, col0: int):
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            raise DslSyntaxError(f"unexpected character {text[pos]!r}", line, col0 + pos)
        kind = m.lastgroup
        if kind != "ws":
            val = m.group()
            if val == "**":
                val = "^"
            tokens.append((kind, val, col0 + pos))
        pos = m.end()
    tokens.append(("end", "", col0 + len(text)))
    return tokens


class _Parser:
    def __init__(self, text: str, scope: Scope, line: int, col0: int):
        self.tokens = _tokenize(text, line, col0)
        self.i = 0
        self.scope = scope
        self.line = line

    def peek(self):
        return self.tokens[self.i]

    def take(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def error(self, msg, tok=None, cls=DslSyntaxError):
        tok = tok or self.peek()
        return cls(msg, self.line, tok[2])

    def expect(self, val):
        tok = self.take()
        if tok[1] != val or tok[0] == "num":
            raise self.error(f"expected {val!r}, found {tok[1] or 'end of input'!r}", tok)
        return tok

    def parse(self) -> Expr:
        e = self.expr()
        if self.peek()[0] != "end":
            raise self.error(f"unexpected token {self.peek()[1]!r}")
        return e

    def expr(self) -> Expr:
        e = self.term()
        while self.peek()[1] in ("+", "-") and self.peek()[0] == "op":
            op = self.take()[1]
            t = self.term()
            e = e + t if op == "+" else e - t
        return e

    def term(self) -> Expr:
        e = self.factor()
        while self.peek()[1] in ("*", "/") and self.peek()[0] == "op":
            tok = self.take()
            f = self.factor()
            if tok[1] == "*":
                e = e * f
            else:
                try:
                    e = e / f
                except ZeroDivisionError:
                    raise self.error("division by zero", tok) from None
        return e

    def factor(self) -> Expr:
        tok = self.peek()
        if tok[0] == "op" and tok[1] in ("+", "-"):
            self.take()
            f = self.factor()
            return -f if tok[1] == "-" else f
        base = self.atom()
        if self.peek()[1] == "^" and self.peek()[0] == "op":
            self.take()
            sign = 1
            if self.peek()[1] in ("+", "-") and self.peek()[0] == "op":
                sign = -1 if self.take()[1] == "-" else 1
            etok = self.take()
            if etok[0] != "num" or not etok[1].isdigit():
                raise self.error(f"exponent must be an integer, found {etok[1]!r}", etok, ExponentError)
            try:
                return base ** (sign * int(etok[1]))
            except ZeroDivisionError:
                raise self.error("zero raised to a negative power", etok) from None
        return base

    def atom(self) -> Expr:
        tok = self.take()
        kind, val, _ = tok
        if kind == "num":
            return Expr.const(Fraction(val))
        if kind == "op" and val == "(":
            e = self.expr()
            self.expect(")")
            return e
        if kind != "id":
            raise self.error(f"unexpected token {val or 'end of input'!r}", tok)
        if val in ("sin", "cos"):
            self.expect("(")
            phase = self.expr()
            self.expect(")")
            for a in phase.free_atoms():
                if not isinstance(a, Sym):
                    raise self.error(f"{val} phase may only contain variables and parameters", tok)
            return sin(phase) if val == "sin" else cos(phase)
        if val == "D":
            return self.derivative(tok)
        try:
            return self.scope.expr(val)
        except UndeclaredIdentifierError as exc:
            raise self.error(str(exc), tok, UndeclaredIdentifierError) from None

    def derivative(self, dtok) -> Expr:
        self.expect("(")
        name_tok = self.take()
        if name_tok[0] != "id":
            raise self.error("D() expects a field or function name", name_tok)
        name = name_tok[1]
        wrt = []
        while self.peek()[1] == ",":
            self.take()
            vtok = self.take()
            if vtok[0] != "id":
                raise self.error("D() expects variable names", vtok)
            wrt.append(vtok)
        self.expect(")")
        if not wrt:
            raise self.error("D() needs at least one differentiation variable", dtok)
        scope = self.scope
        if name in scope.functions:
            argnames = scope.functions[name]
            f = scope.function(name)
            orders = list(f.orders)
            for vtok in wrt:
                if vtok[1] not in scope.kinds and vtok[1] not in scope.functions:
                    raise self.error(f"undeclared identifier {vtok[1]!r}", vtok, UndeclaredIdentifierError)
                if vtok[1] not in argnames:
                    return ZERO
                orders[argnames.index(vtok[1])] += 1
            return Expr.atom(Func(f.name, f.args, tuple(orders)))
        kind = scope.kinds.get(name)
        if kind is None:
            raise self.error(f"undeclared identifier {name!r}", name_tok, UndeclaredIdentifierError)
        if kind != DEPENDENT:
            raise self.error(f"D() applies to dependent fields or functions, not {name!r}", name_tok)
        index: dict[str, int] = {}
        for vtok in wrt:
            v = vtok[1]
            if v not in scope.kinds:
                raise self.error(f"undeclared identifier {v!r}", vtok, UndeclaredIdentifierError)
            if scope.kinds[v] != INDEPENDENT:
                raise self.error(f"{v!r} is not an independent variable", vtok)
            index[v] = index.get(v, 0) + 1
        return Expr.atom(Deriv(name, index))


def parse_expression(text: str, scope: Scope, line: int | None = None, column: int = 1) -> Expr:
    """Parse one DSL expression in ``scope`` into canonical form; errors carry line/column."""
    return canonicalize(_Parser(text, scope, line if line is not None else 1, column).parse())


# ---------------------------------------------------------------- printer


def atom_to_dsl(a: Atom) -> str:
    if isinstance(a, Sym):
        return a.name
    if isinstance(a, Deriv):
        if not a.index:
            return a.field
        vs = [v for v, n in a.index for _ in range(n)]
        return f"D({a.field},{','.join(vs)})"
    if isinstance(a, Func):
        if not any(a.orders):
            return a.name
        vs = [atom_to_dsl(x) for x, n in zip(a.args, a.orders) for _ in range(n)]
        return f"D({a.name},{','.join(vs)})"
    if isinstance(a, Trig):
        return f"{a.branch}({to_dsl(a.phase)})"
    raise TypeError(a)


def _coeff_str(c: Fraction) -> str:
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


def poly_to_dsl(num: dict) -> str:
    if not num:
        return "0"
    parts = []
    for m in sorted(num, key=mono_key, reverse=True):
        c = Fraction(num[m])
        sign = "-" if c < 0 else "+"
        c = abs(c)
        factors = [atom_to_dsl(a) + (f"^{e}" if e > 1 else "") for a, e in m]
        if not factors:
            body = _coeff_str(c)
        elif c == 1:
            body = "*".join(factors)
        else:
            body = _coeff_str(c) + "*" + "*".join(factors)
        parts.append((sign, body))
    out = ("-" if parts[0][0] == "-" else "") + parts[0][1]
    for sign, body in parts[1:]:
        out += f" {sign} {body}"
    return out


def to_dsl(e: Expr) -> str:
    num = poly_to_dsl(e.num)
    if not e.den:
        return num
    dens = []
    for f, k in e.den:
        s = poly_to_dsl(f.terms)
        if len(f.terms) > 1:
            s = f"({s})"
        dens.append(s + (f"^{k}" if k > 1 else ""))
    den = dens[0] if len(dens) == 1 and dens[0].startswith("(") and dens[0].endswith(")") else f"({'*'.join(dens)})"
    return f"({num})/{den}"


# ------------------------------------------------------------ file helpers


def iter_lines(text: str):
    """Yield (line number, column offset, content) with comments stripped."""
    for n, raw in enumerate(text.splitlines(), start=1):
        content = raw.split("#", 1)[0]
        stripped = content.strip()
        if stripped:
            yield n, content.index(stripped) + 1, stripped


_DECL = re.compile(r"(independent|dependent|parameter|group-parameter)\s+(.+)")
_FUNC = re.compile(r"function\s+([A-Za-z_][A-Za-z_0-9]*)\s*\(([^)]*)\)")


def parse_declaration(content: str, scope: Scope, line: int) -> bool:
    """Apply a declaration line to ``scope``; False if the line is not one."""
    m = _DECL.fullmatch(content)
    if m:
        for name in m.group(2).split():
            try:
                scope.declare(name, m.group(1))
            except DslError as exc:
                raise DslError(str(exc), line) from None
        return True
    m = _FUNC.fullmatch(content)
    if m:
        args = [a.strip() for a in m.group(2).split(",") if a.strip()]
        try:
            scope.declare_function(m.group(1), args)
        except DslError as exc:
            raise type(exc)(str(exc), line) from None
        return True
    return False


def split_equation(body: str, line: int, col: int) -> tuple[str, int, str, int]:
    if body.count("=") != 1:
        raise DslSyntaxError("expected exactly one '='", line, col)
    lhs, rhs = body.split("=")
    return lhs, col, rhs, col + len(lhs) + 1

"""Canonical rational-function expressions over a set of symbolic atoms.

An :class:`Expr` is ``num / prod(factor ** mult)`` where ``num`` is a sparse
polynomial with exact rational coefficients and the denominator is kept as a
product of monic polynomial factors.  Atoms are independent variables and
parameters (:class:`Sym`), jet coordinates of dependent fields
(:class:`Deriv`), arbitrary-function nodes (:class:`Func`) and sine/cosine
phase atoms (:class:`Trig`).  Sine and cosine of one phase are independent
atoms; no trigonometric identity is ever applied.

Zero testing is exact: an expression is zero iff its numerator polynomial is
empty.  Denominator factors are cancelled against the numerator by exact
multivariate division, so the representation is canonical up to the
factorisation of the denominator.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Callable, Iterable, Mapping

Monomial = tuple  # tuple[tuple[Atom, int], ...], sorted by atom key
PolyDict = dict  # dict[Monomial, Fraction]

INDEPENDENT = "independent"
DEPENDENT = "dependent"
PARAMETER = "parameter"
GROUP_PARAMETER = "group-parameter"
SYMBOL_KINDS = (INDEPENDENT, DEPENDENT, PARAMETER, GROUP_PARAMETER)


class Atom:
    """Base class for polynomial generators; equality and order by ``key``."""

    __slots__ = ("key", "_hash")

    def _set_key(self, key):
        self.key = key
        self._hash = hash(key)

    def __eq__(self, other):
        return self is other or (isinstance(other, Atom) and self.key == other.key)

    def __hash__(self):
        return self._hash

    def __lt__(self, other):
        return self.key < other.key

    def __repr__(self):
        from .dsl import atom_to_dsl

        return f"{type(self).__name__}({atom_to_dsl(self)})"


class Sym(Atom):
    """Independent variable, parameter or group parameter."""

    __slots__ = ("name", "kind")

    def __init__(self, name: str, kind: str = PARAMETER):
        if kind not in SYMBOL_KINDS or kind == DEPENDENT:
            raise ValueError(f"bad symbol kind {kind!r} for {name!r}")
        self.name = name
        self.kind = kind
        self._set_key((0, name))


class Deriv(Atom):
    """Jet coordinate ``u_J`` of a dependent field; the empty index is ``u`` itself."""

    __slots__ = ("field", "index", "order")

    def __init__(self, field: str, index: Mapping[str, int] | Iterable = ()):
        items = index.items() if isinstance(index, Mapping) else index
        idx = tuple(sorted((v, int(n)) for v, n in items if n))
        if any(n < 0 for _, n in idx):
            raise ValueError("negative derivative order")
        self.field = field
        self.index = idx
        self.order = sum(n for _, n in idx)
        self._set_key((1, field, idx))

    @property
    def multi_index(self) -> dict[str, int]:
        return dict(self.index)

    def raised(self, var: str, n: int = 1) -> Deriv:
        mi = self.multi_index
        mi[var] = mi.get(var, 0) + n
        return Deriv(self.field, mi)

    def count(self, var: str) -> int:
        for v, n in self.index:
            if v == var:
                return n
        return 0


class Func(Atom):
    """Arbitrary function node ``F(args)`` with per-argument derivative orders."""

    __slots__ = ("name", "args", "orders")

    def __init__(self, name: str, args: tuple, orders: tuple | None = None):
        args = tuple(args)
        orders = tuple(orders) if orders is not None else (0,) * len(args)
        if len(orders) != len(args):
            raise ValueError("orders/args length mismatch")
        self.name = name
        self.args = args
        self.orders = orders
        self._set_key((2, name, tuple(a.key for a in args), orders))

    @property
    def derivative_order(self) -> int:
        return sum(self.orders)

    def raised(self, position: int) -> Func:
        orders = list(self.orders)
        orders[position] += 1
        return Func(self.name, self.args, tuple(orders))


class Trig(Atom):
    """``sin(phase)`` or ``cos(phase)``; build through :func:`sin` / :func:`cos`."""

    __slots__ = ("branch", "phase")

    def __init__(self, branch: str, phase: Expr):
        if branch not in ("sin", "cos"):
            raise ValueError(branch)
        self.branch = branch
        self.phase = phase
        self._set_key((3, phase.key, branch))

    def partner(self) -> Trig:
        return Trig("cos" if self.branch == "sin" else "sin", self.phase)


# --------------------------------------------------------------------------
# monomials and polynomial dicts


def mono_key(m: Monomial) -> tuple:
    return tuple((a.key, e) for a, e in m)


def mono_mul(m1: Monomial, m2: Monomial) -> Monomial:
    if not m1:
        return m2
    if not m2:
        return m1
    d = dict(m1)
    for a, e in m2:
        d[a] = d.get(a, 0) + e
    return tuple(sorted(d.items()))


def mono_div(m1: Monomial, m2: Monomial) -> Monomial | None:
    """``m1 / m2`` or None when not divisible."""
    if not m2:
        return m1
    d = dict(m1)
    for a, e in m2:
        r = d.get(a, 0) - e
        if r < 0:
            return None
        if r:
            d[a] = r
        else:
            del d[a]
    return tuple(sorted(d.items()))


def mono_degree(m: Monomial, atom: Atom) -> int:
    for a, e in m:
        if a == atom:
            return e
    return 0


def p_add(p: PolyDict, q: PolyDict, scale=1) -> PolyDict:
    out = dict(p)
    for m, c in q.items():
        v = out.get(m, 0) + scale * c
        if v:
            out[m] = v
        else:
            out.pop(m, None)
    return out


def p_iadd(out: PolyDict, q: PolyDict, scale=1) -> None:
    for m, c in q.items():
        v = out.get(m, 0) + scale * c
        if v:
            out[m] = v
        else:
            del out[m]


def p_mul(p: PolyDict, q: PolyDict) -> PolyDict:
    if len(p) > len(q):
        p, q = q, p
    out: PolyDict = {}
    for m1, c1 in p.items():
        for m2, c2 in q.items():
            m = mono_mul(m1, m2)
            v = out.get(m, 0) + c1 * c2
            if v:
                out[m] = v
            else:
                del out[m]
    return out


def p_scale(p: PolyDict, c) -> PolyDict:
    if not c:
        return {}
    return {m: v * c for m, v in p.items()}


def p_pow(p: PolyDict, n: int) -> PolyDict:
    result: PolyDict = {(): Fraction(1)}
    base = p
    while n:
        if n & 1:
            result = p_mul(result, base)
        n >>= 1
        if n:
            base = p_mul(base, base)
    return result


def p_atoms(p: PolyDict) -> set:
    out = set()
    for m in p:
        for a, _ in m:
            out.add(a)
    return out


def p_partial(p: PolyDict, atom: Atom) -> PolyDict:
    """Formal partial derivative treating every other atom as constant."""
    out: PolyDict = {}
    for m, c in p.items():
        for i, (a, e) in enumerate(m):
            if a == atom:
                nm = m[:i] + ((a, e - 1),) + m[i + 1 :] if e > 1 else m[:i] + m[i + 1 :]
                v = out.get(nm, 0) + c * e
                if v:
                    out[nm] = v
                else:
                    del out[nm]
                break
    return out


def p_coeff(p: PolyDict, atom: Atom, degree: int) -> PolyDict:
    out: PolyDict = {}
    for m, c in p.items():
        d = 0
        rest = m
        for i, (a, e) in enumerate(m):
            if a == atom:
                d = e
                rest = m[:i] + m[i + 1 :]
                break
        if d == degree:
            out[rest] = c
    return out


def p_degree(p: PolyDict, atom: Atom) -> int:
    return max((mono_degree(m, atom) for m in p), default=0)


def p_leading(p: PolyDict) -> tuple[Monomial, Fraction]:
    m = max(p, key=mono_key)
    return m, p[m]


def p_exact_div(p: PolyDict, f: PolyDict) -> PolyDict | None:
    """Exact quotient ``p / f`` or None if ``f`` does not divide ``p``."""
    if not f:
        raise ZeroDivisionError("division by zero polynomial")
    if not p:
        return {}
    if len(f) == 1:
        (fm, fc), = f.items()
        out = {}
        for m, c in p.items():
            q = mono_div(m, fm)
            if q is None:
                return None
            out[q] = c / fc
        return out
    z = max(p_atoms(f))
    df = p_degree(f, z)
    lcf = p_coeff(f, z, df)
    quotient: PolyDict = {}
    rem = dict(p)
    while rem:
        dr = p_degree(rem, z)
        if dr < df:
            return None
        c = p_exact_div(p_coeff(rem, z, dr), lcf)
        if c is None:
            return None
        if dr > df:
            c = p_mul(c, {((z, dr - df),): Fraction(1)})
        p_iadd(quotient, c)
        p_iadd(rem, p_mul(c, f), -1)
    return quotient


def p_gcd(p: PolyDict, q: PolyDict) -> PolyDict:
    """Greatest common divisor over the rationals, up to a constant factor.

    Delegated to sympy's sparse polynomial ring; atoms become ring generators.
    """
    from sympy import QQ
    from sympy.polys.rings import ring

    atoms = sorted(p_atoms(p) | p_atoms(q))
    if not atoms or not p or not q:
        return {(): Fraction(1)} if (p or q) else {}
    R, *_ = ring([f"z{i}" for i in range(len(atoms))], QQ)
    pos = {a: i for i, a in enumerate(atoms)}

    def to_ring(poly):
        terms = {}
        for m, c in poly.items():
            exps = [0] * len(atoms)
            for a, e in m:
                exps[pos[a]] = e
            terms[tuple(exps)] = QQ(c.numerator, c.denominator)
        return R.from_dict(terms)

    g = to_ring(p).gcd(to_ring(q))
    out: PolyDict = {}
    for exps, c in g.items():
        m = tuple((atoms[i], e) for i, e in enumerate(exps) if e)
        out[m] = Fraction(int(c.numerator), int(c.denominator))
    return out


class Poly:
    """Hashable polynomial used as a denominator factor."""

    __slots__ = ("terms", "key", "_hash")

    def __init__(self, terms: PolyDict):
        self.terms = terms
        self.key = tuple(sorted((mono_key(m), c) for m, c in terms.items()))
        self._hash = hash(self.key)

    def __eq__(self, other):
        return isinstance(other, Poly) and self.key == other.key

    def __hash__(self):
        return self._hash

    def __lt__(self, other):
        return self.key < other.key


def _factor_content(p: PolyDict) -> tuple[Fraction, list[tuple[Poly, int]]]:
    """Split ``p`` into constant * atom powers * monic remainder."""
    items = list(p.items())
    common: dict = dict(items[0][0])
    for m, _ in items[1:]:
        md = dict(m)
        for a in list(common):
            e = min(common[a], md.get(a, 0))
            if e:
                common[a] = e
            else:
                del common[a]
        if not common:
            break
    factors: list[tuple[Poly, int]] = []
    if common:
        cm = tuple(sorted(common.items()))
        p = {mono_div(m, cm): c for m, c in items}
        for a, e in cm:
            factors.append((Poly({((a, 1),): Fraction(1)}), e))
    if len(p) == 1:
        (_, c), = p.items()
        return c, factors
    lm, lc = p_leading(p)
    factors.append((Poly({m: c / lc for m, c in p.items()}), 1))
    return lc, factors


# --------------------------------------------------------------------------
# rational-function expressions


class Expr:
    """Immutable canonical rational function; build via parsing or operators."""

    __slots__ = ("num", "den", "_key", "_hash")

    def __init__(self, num: PolyDict | None = None, den: tuple = ()):
        self.num = num or {}
        self.den = den if self.num else ()
        self._key = None
        self._hash = None

    # construction ---------------------------------------------------------
    @staticmethod
    def const(value) -> Expr:
        value = Fraction(value)
        return Expr({(): value}) if value else ZERO

    @staticmethod
    def atom(a: Atom) -> Expr:
        return Expr({((a, 1),): Fraction(1)})

    @staticmethod
    def coerce(value) -> Expr:
        if isinstance(value, Expr):
            return value
        if isinstance(value, Atom):
            return Expr.atom(value)
        if isinstance(value, (int, Fraction)):
            return Expr.const(value)
        raise TypeError(f"cannot convert {type(value).__name__} to Expr")

    @staticmethod
    def _build(num: PolyDict, den: dict) -> Expr:
        """Cancel denominator factors into ``num`` and freeze."""
        if not num:
            return ZERO
        kept = []
        for f, mult in den.items():
            terms = f.terms
            if len(terms) == 1:
                (fm, _), = terms.items()
                (a, _), = fm
                low = min(mono_degree(m, a) for m in num)
                k = min(low, mult)
                if k:
                    num = {mono_div(m, ((a, k),)): c for m, c in num.items()}
                    mult -= k
            else:
                while mult:
                    q = p_exact_div(num, terms)
                    if q is None:
                        break
                    num = q
                    mult -= 1
            if mult:
                kept.append((f, mult))
        kept.sort(key=lambda fm: fm[0].key)
        return Expr(num, tuple(kept))

    # structural properties --------------------------------------------------
    @property
    def key(self) -> tuple:
        if self._key is None:
            self._key = (
                tuple(sorted((mono_key(m), c) for m, c in self.num.items())),
                tuple((f.key, k) for f, k in self.den),
            )
        return self._key

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(self.key)
        return self._hash

    def same(self, other: Expr) -> bool:
        """Structural identity of canonical forms."""
        return self.key == Expr.coerce(other).key

    def __eq__(self, other):
        if not isinstance(other, (Expr, Atom, int, Fraction)):
            return NotImplemented
        return (self - Expr.coerce(other)).is_zero()

    def is_zero(self) -> bool:
        return not self.num

    def is_polynomial(self) -> bool:
        return not self.den

    def is_constant(self) -> bool:
        return not self.den and all(not m for m in self.num)

    def constant_value(self) -> Fraction:
        if not self.is_constant():
            raise ValueError("expression is not constant")
        return self.num.get((), Fraction(0))

    def atoms(self) -> set:
        out = p_atoms(self.num)
        for f, _ in self.den:
            out |= p_atoms(f.terms)
        return out

    def free_atoms(self) -> set:
        """Atoms including those nested inside phases and function arguments."""
        out = set()
        for a in self.atoms():
            out.add(a)
            if isinstance(a, Trig):
                out |= a.phase.free_atoms()
            elif isinstance(a, Func):
                out.update(a.args)
        return out

    def denominator(self) -> Expr:
        out: PolyDict = {(): Fraction(1)}
        for f, k in self.den:
            out = p_mul(out, p_pow(f.terms, k))
        return Expr(out)

    def numerator(self) -> Expr:
        return Expr(dict(self.num))

    # arithmetic ---------------------------------------------------------
    def __add__(self, other) -> Expr:
        other = Expr.coerce(other)
        if not other.num:
            return self
        if not self.num:
            return other
        if self.den == other.den:
            return Expr._build(p_add(self.num, other.num), dict(self.den))
        da, db = dict(self.den), dict(other.den)
        lcm = dict(da)
        for f, k in db.items():
            lcm[f] = max(lcm.get(f, 0), k)
        na, nb = self.num, other.num
        for f, k in lcm.items():
            if k > da.get(f, 0):
                na = p_mul(na, p_pow(f.terms, k - da.get(f, 0)))
            if k > db.get(f, 0):
                nb = p_mul(nb, p_pow(f.terms, k - db.get(f, 0)))
        return Expr._build(p_add(na, nb), lcm)

    __radd__ = __add__

    def __neg__(self) -> Expr:
        return Expr({m: -c for m, c in self.num.items()}, self.den)

    def __sub__(self, other) -> Expr:
        return self + (-Expr.coerce(other))

    def __rsub__(self, other) -> Expr:
        return Expr.coerce(other) + (-self)

    def __mul__(self, other) -> Expr:
        other = Expr.coerce(other)
        if not self.num or not other.num:
            return ZERO
        if not self.den and not other.den:
            return Expr(p_mul(self.num, other.num))
        den = dict(self.den)
        for f, k in other.den:
            den[f] = den.get(f, 0) + k
        return Expr._build(p_mul(self.num, other.num), den)

    __rmul__ = __mul__

    def reciprocal(self) -> Expr:
        if not self.num:
            raise ZeroDivisionError("division by zero expression")
        c, factors = _factor_content(self.num)
        num: PolyDict = {(): 1 / c}
        for f, k in self.den:
            num = p_mul(num, p_pow(f.terms, k))
        den: dict = {}
        for f, k in factors:
            den[f] = den.get(f, 0) + k
        return Expr._build(num, den)

    def __truediv__(self, other) -> Expr:
        other = Expr.coerce(other)
        if other.is_constant():
            c = other.constant_value()
            if not c:
                raise ZeroDivisionError("division by zero expression")
            return Expr({m: v / c for m, v in self.num.items()}, self.den)
        return self * other.reciprocal()

    def __rtruediv__(self, other) -> Expr:
        return Expr.coerce(other) * self.reciprocal()

    def __pow__(self, n: int) -> Expr:
        if not isinstance(n, int):
            raise TypeError("only integer exponents are supported")
        if n < 0:
            return self.reciprocal() ** (-n)
        if n == 0:
            return ONE
        if not self.den:
            return Expr(p_pow(self.num, n))
        result = ONE
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    # substitution ------------------------------------------------------
    def subs(self, mapping: Mapping[Atom, Expr]) -> Expr:
        """Replace atoms simultaneously; phases of trig atoms are rewritten too."""
        if not mapping:
            return self
        images: dict = {}
        sym_map = {a: v for a, v in mapping.items() if isinstance(a, Sym)}
        for a in self.atoms():
            if a in mapping:
                images[a] = Expr.coerce(mapping[a])
            elif isinstance(a, Trig) and sym_map:
                phase = a.phase.subs(sym_map)
                if not phase.same(a.phase):
                    images[a] = sin(phase) if a.branch == "sin" else cos(phase)
            elif isinstance(a, Func) and any(x in mapping for x in a.args):
                new_args = []
                for x in a.args:
                    img = Expr.coerce(mapping.get(x, x))
                    single = img.as_atom()
                    if single is None:
                        raise ValueError(
                            f"cannot substitute a compound expression into the argument of {a.name}"
                        )
                    new_args.append(single)
                images[a] = Expr.atom(Func(a.name, tuple(new_args), a.orders))
        if not images:
            return self
        num = _evaluate(self.num, images)
        if not self.den:
            return num
        den = ONE
        for f, k in self.den:
            den = den * (_evaluate(f.terms, images) ** k)
        return num / den

    def as_atom(self) -> Atom | None:
        if not self.den and len(self.num) == 1:
            (m, c), = self.num.items()
            if c == 1 and len(m) == 1 and m[0][1] == 1:
                return m[0][0]
        return None

    def __str__(self):
        from .dsl import to_dsl

        return to_dsl(self)

    def __repr__(self):
        return f"Expr({self})"


def _evaluate(p: PolyDict, images: Mapping[Atom, Expr]) -> Expr:
    poly_only = all(v.is_polynomial() for v in images.values())
    powers: dict = {}

    def power(a, e):
        k = (a, e)
        if k not in powers:
            base = images[a]
            powers[k] = base.num if poly_only else base
            if e > 1:
                powers[k] = p_pow(base.num, e) if poly_only else base**e
        return powers[k]

    if poly_only:
        out: PolyDict = {}
        for m, c in p.items():
            keep = []
            term: PolyDict | None = None
            for a, e in m:
                if a in images:
                    pw = power(a, e)
                    term = pw if term is None else p_mul(term, pw)
                else:
                    keep.append((a, e))
            base = {tuple(keep): c}
            p_iadd(out, base if term is None else p_mul(base, term))
        return Expr(out)
    total = ZERO
    plain: PolyDict = {}
    for m, c in p.items():
        keep = []
        term = None
        for a, e in m:
            if a in images:
                pw = power(a, e)
                term = pw if term is None else term * pw
            else:
                keep.append((a, e))
        if term is None:
            p_iadd(plain, {tuple(keep): c})
        else:
            total = total + Expr({tuple(keep): c}) * term
    return total + Expr(plain)


ZERO = Expr()
ONE = Expr({(): Fraction(1)})


def _phase_sign(phase: Expr) -> int:
    _, c = p_leading(phase.num)
    return -1 if c < 0 else 1


def sin(phase) -> Expr:
    phase = Expr.coerce(phase)
    if phase.is_zero():
        return ZERO
    if _phase_sign(phase) < 0:
        return -Expr.atom(Trig("sin", -phase))
    return Expr.atom(Trig("sin", phase))


def cos(phase) -> Expr:
    phase = Expr.coerce(phase)
    if phase.is_zero():
        return ONE
    if _phase_sign(phase) < 0:
        phase = -phase
    return Expr.atom(Trig("cos", phase))


# --------------------------------------------------------------------------
# derivations

AtomDerivative = Callable[[Atom], "Expr | None"]


def derivation(base: AtomDerivative) -> AtomDerivative:
    """Extend ``base`` (defined on Sym/Deriv atoms) by the chain rule through
    function and trig atoms; results are memoised per derivation."""
    cache: dict = {}

    def datom(a: Atom):
        if a in cache:
            return cache[a]
        if isinstance(a, Func):
            out = ZERO
            for i, arg in enumerate(a.args):
                d = datom(arg)
                if d is not None and not d.is_zero():
                    out = out + Expr.atom(a.raised(i)) * d
            res = None if out.is_zero() else out
        elif isinstance(a, Trig):
            dphase = apply_derivation(a.phase, datom)
            if dphase.is_zero():
                res = None
            else:
                other = Expr.atom(a.partner())
                res = other * dphase if a.branch == "sin" else -(other * dphase)
        else:
            res = base(a)
        cache[a] = res
        return res

    return datom


def apply_derivation(e: Expr, datom: AtomDerivative) -> Expr:
    """Apply a derivation given by its action on atoms (Leibniz + quotient rule)."""
    num_d = _poly_derivation(e.num, datom)
    if not e.den:
        return num_d
    result = num_d * Expr({(): Fraction(1)}, e.den)
    log_d = ZERO
    for f, k in e.den:
        df = _poly_derivation(f.terms, datom)
        if not df.is_zero():
            log_d = log_d + Expr.const(k) * df / Expr(f.terms)
    if log_d.is_zero():
        return result
    return result - e * log_d


def _poly_derivation(p: PolyDict, datom: AtomDerivative) -> Expr:
    images = {}
    for a in p_atoms(p):
        d = datom(a)
        if d is not None and not d.is_zero():
            images[a] = d
    if not images:
        return ZERO
    if all(v.is_polynomial() for v in images.values()):
        out: PolyDict = {}
        for a, d in images.items():
            part = p_partial(p, a)
            if part:
                p_iadd(out, p_mul(part, d.num))
        return Expr(out)
    total = ZERO
    for a, d in images.items():
        part = p_partial(p, a)
        if part:
            total = total + Expr(part) * d
    return total

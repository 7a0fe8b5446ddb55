"""Exact arithmetic in a finite-dimensional Q-vector space of reals.

Every number handled by the library is a rational combination of ``1`` and
finitely many declared irrational symbols (typically ``alpha = sqrt(2) - 1``).
Equality is coefficient-wise. Ordering is decided by evaluating both sides on
certified rational enclosures of the symbols, refining the enclosures until the
two interval evaluations separate.  Soundness of ``==`` and termination of the
ordering both rest on the user's assertion that ``{1, s_1, ..., s_m}`` is
linearly independent over Q.

Symbols are refined through continued-fraction convergents.  Refinement level
``k`` is a deterministic function of the symbol, so repeated comparisons give
identical results.
"""

from __future__ import annotations

import contextlib
import contextvars
import enum
import math
import threading
from fractions import Fraction
from functools import lru_cache
from numbers import Rational

from gmpy2 import mpq, mpz

__all__ = [
    "ExactReal",
    "Ordering",
    "Symbol",
    "SymbolBasis",
    "UndecidedComparison",
    "as_real",
    "cmp",
    "in_q_span",
    "mod_interval",
    "parse_rational",
    "format_rational",
    "quadratic_symbol",
    "refinement_budget",
    "get_refinement_budget",
]

DEFAULT_BUDGET = 64

_budget = contextvars.ContextVar("ietlab_refinement_budget", default=DEFAULT_BUDGET)


class UndecidedComparison(ArithmeticError):
    """Raised when the refinement budget runs out before a sign is certified."""


class Ordering(enum.IntEnum):
    LT = -1
    EQ = 0
    GT = 1


def get_refinement_budget():
    return _budget.get()


@contextlib.contextmanager
def refinement_budget(n):
    """Temporarily set the maximal number of enclosure refinements."""
    if n < 0:
        raise ValueError("refinement budget must be non-negative")
    token = _budget.set(int(n))
    try:
        yield
    finally:
        _budget.reset(token)


def set_refinement_budget(n):
    if n < 0:
        raise ValueError("refinement budget must be non-negative")
    _budget.set(int(n))


def parse_rational(s):
    """Parse ``"p/q"``, ``"p"`` or a number into a Fraction."""
    if isinstance(s, Fraction):
        return s
    if isinstance(s, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(s, int):
        return Fraction(s)
    if isinstance(s, str):
        return Fraction(s.strip())
    if isinstance(s, Rational):
        return Fraction(int(s.numerator), int(s.denominator))
    raise TypeError(f"cannot read a rational from {s!r}")


_MPQ = type(mpq(0))
_RATIONAL = (int, Fraction, _MPQ, type(mpz(0)))


def _q(x):
    # internal coefficient type; gmpy2 rationals are much faster than Fraction
    if type(x) is _MPQ:
        return x
    x = parse_rational(x)
    return mpq(int(x.numerator), int(x.denominator))


def format_rational(q):
    q = parse_rational(q)
    if q.denominator == 1:
        return str(q.numerator)
    return f"{q.numerator}/{q.denominator}"


def _bits(level):
    # dyadic precision used for refinement level ``level``
    return 32 * (level + 1)


class Symbol:
    """A named irrational with a certified enclosure and a refinement rule.

    ``terms`` are continued-fraction partial quotients ``[a0; a1, a2, ...]``.
    When ``periodic_from`` is given, ``terms[periodic_from:]`` repeats forever
    (quadratic irrationals).  Without a refiner the symbol can only be
    compared at level 0, using the declared enclosure ``[lo, hi]``.
    """

    __slots__ = ("name", "lo", "hi", "terms", "periodic_from", "_key", "_hash",
                 "_convergents", "_dyadic", "_lock")

    def __init__(self, name, lo, hi, terms=(), periodic_from=None):
        if not isinstance(name, str) or not name:
            raise ValueError("symbol name must be a non-empty string")
        lo, hi = parse_rational(lo), parse_rational(hi)
        if not lo < hi:
            raise ValueError(f"symbol {name}: enclosure needs lo < hi")
        terms = tuple(int(t) for t in terms)
        if any(t <= 0 for t in terms[1:]):
            raise ValueError(f"symbol {name}: partial quotients after the first must be positive")
        if periodic_from is not None:
            periodic_from = int(periodic_from)
            if not 0 <= periodic_from < len(terms):
                raise ValueError(f"symbol {name}: periodic_from out of range")
        self.name = name
        self.lo = lo
        self.hi = hi
        self.terms = terms
        self.periodic_from = periodic_from
        self._key = (name, lo, hi, terms, periodic_from)
        self._hash = hash(self._key)
        self._convergents = []
        self._dyadic = {}
        self._lock = threading.Lock()
        if terms:
            # the refiner must agree with the declared enclosure
            clo, chi = self._cf_enclosure(2)
            if chi <= lo or clo >= hi:
                raise ValueError(f"symbol {name}: continued fraction lies outside [{lo}, {hi}]")

    def __repr__(self):
        return f"Symbol({self.name!r})"

    def __eq__(self, other):
        return isinstance(other, Symbol) and self._key == other._key

    def __hash__(self):
        return self._hash

    def __lt__(self, other):
        return self.name < other.name

    @property
    def value(self):
        return ExactReal(0, {self: 1})

    # -- refinement ------------------------------------------------------

    def _term(self, i):
        if i < len(self.terms):
            return self.terms[i]
        if self.periodic_from is None:
            return None
        period = self.terms[self.periodic_from:]
        return period[(i - self.periodic_from) % len(period)]

    def _convergent(self, i):
        conv = self._convergents
        while len(conv) <= i:
            j = len(conv)
            a = self._term(j)
            if a is None:
                return None
            if j == 0:
                conv.append((a, 1))
            elif j == 1:
                h0, k0 = conv[0]
                conv.append((a * h0 + 1, a))
            else:
                h1, k1 = conv[-1]
                h2, k2 = conv[-2]
                conv.append((a * h1 + h2, a * k1 + k2))
        return conv[i]

    def _cf_enclosure(self, bits):
        """Consecutive convergents bracketing the value with width < 2**-bits."""
        target = 1 << bits
        i = 0
        while True:
            c0 = self._convergent(i)
            c1 = self._convergent(i + 1)
            if c0 is None or c1 is None:
                return None
            if c0[1] * c1[1] > target:
                a = Fraction(*c0)
                b = Fraction(*c1)
                return (a, b) if a < b else (b, a)
            i += 1

    def enclosure(self, level):
        """Rational enclosure at refinement ``level`` (level 0 is the declared one)."""
        if level == 0:
            return self.lo, self.hi
        enc = self._cf_enclosure(_bits(level))
        if enc is None:
            return None
        return max(enc[0], self.lo), min(enc[1], self.hi)

    def dyadic(self, level):
        """Outward-rounded enclosure ``(lo, hi)`` as integers over ``2**_bits(level)``."""
        got = self._dyadic.get(level)
        if got is not None:
            return got
        with self._lock:
            got = self._dyadic.get(level)
            if got is not None:
                return got
            enc = self.enclosure(level)
            if enc is None:
                got = False
            else:
                scale = 1 << _bits(level)
                lo = math.floor(enc[0] * scale)
                hi = math.ceil(enc[1] * scale)
                got = (lo, hi)
            self._dyadic[level] = got
            return got

    # -- serialization ---------------------------------------------------

    def to_json(self):
        out = {"name": self.name, "lo": format_rational(self.lo), "hi": format_rational(self.hi)}
        if self.terms:
            ref = {"kind": "continued_fraction", "terms": list(self.terms)}
            if self.periodic_from is not None:
                ref["periodic_from"] = self.periodic_from
            out["refiner"] = ref
        return out

    @classmethod
    def from_json(cls, data):
        ref = data.get("refiner") or {}
        if ref and ref.get("kind") != "continued_fraction":
            raise ValueError(f"unsupported refiner kind {ref.get('kind')!r}")
        return cls(data["name"], data["lo"], data["hi"], ref.get("terms", ()),
                   ref.get("periodic_from"))


def quadratic_symbol(name, n):
    """The symbol ``sqrt(n) - floor(sqrt(n))`` with its periodic continued fraction."""
    a0 = math.isqrt(n)
    if a0 * a0 == n:
        raise ValueError(f"{n} is a perfect square")
    # standard algorithm for the continued fraction of sqrt(n)
    m, d, a = 0, 1, a0
    period = []
    while True:
        m = d * a - m
        d = (n - m * m) // d
        a = (a0 + m) // d
        period.append(a)
        if a == 2 * a0:
            break
    terms = [0] + period
    # enclosure from the first two convergents around the fractional part
    frac_lo = Fraction(math.isqrt(n * 10**12) - a0 * 10**6, 10**6)
    lo, hi = frac_lo - Fraction(1, 10**6), frac_lo + Fraction(2, 10**6)
    return Symbol(name, max(lo, Fraction(0)), min(hi, Fraction(1)), terms, periodic_from=1)


class SymbolBasis:
    """An ordered list of symbols plus the user's independence assertion."""

    def __init__(self, symbols=(), independent=True):
        symbols = tuple(symbols)
        names = [s.name for s in symbols]
        if len(set(names)) != len(names):
            raise ValueError("symbol names must be unique")
        self.symbols = symbols
        self.independent = bool(independent)
        self._by_name = {s.name: s for s in symbols}

    def __repr__(self):
        return f"SymbolBasis({[s.name for s in self.symbols]}, independent={self.independent})"

    def __getitem__(self, name):
        return self._by_name[name]

    def __contains__(self, name):
        return name in self._by_name

    def __iter__(self):
        return iter(self.symbols)

    def real(self, unit=0, **coeffs):
        return ExactReal(unit, {self._by_name[k]: v for k, v in coeffs.items()})

    def cmp(self, x, y):
        return cmp(x, y)

    def to_json(self):
        return {"independent": self.independent, "symbols": [s.to_json() for s in self.symbols]}

    @classmethod
    def from_json(cls, data):
        return cls([Symbol.from_json(s) for s in data.get("symbols", [])],
                   data.get("independent", True))

    def real_from_json(self, data):
        """Read ``{"unit": "p/q", "syms": {...}}``, a rational string, or a number."""
        if isinstance(data, dict):
            syms = {}
            for name, c in (data.get("syms") or {}).items():
                if name not in self._by_name:
                    raise KeyError(f"unknown symbol {name!r}")
                syms[self._by_name[name]] = parse_rational(c)
            return ExactReal(parse_rational(data.get("unit", 0)), syms)
        return ExactReal(parse_rational(data))


class ExactReal:
    """``unit + sum(coeff * symbol)`` with rational coefficients.

    Instances are immutable and hashable.  ``syms`` is a tuple of
    ``(Symbol, Fraction)`` pairs sorted by symbol name with no zero entry.
    """

    __slots__ = ("unit", "syms", "_hash", "_scaled")

    def __init__(self, unit=0, syms=None):
        self.unit = _q(unit)
        if syms:
            items = syms.items() if isinstance(syms, dict) else syms
            clean = {}
            for s, c in items:
                if not isinstance(s, Symbol):
                    raise TypeError("symbol coefficients must be keyed by Symbol")
                c = _q(c)
                clean[s] = clean.get(s, 0) + c
            self.syms = tuple(sorted(((s, c) for s, c in clean.items() if c), key=lambda p: p[0].name))
        else:
            self.syms = ()
        self._hash = None
        self._scaled = None

    @classmethod
    def _make(cls, unit, syms):
        obj = object.__new__(cls)
        obj.unit = unit
        obj.syms = syms
        obj._hash = None
        obj._scaled = None
        return obj

    # -- basic protocol --------------------------------------------------

    def __repr__(self):
        return f"ExactReal({self})"

    def __str__(self):
        parts = []
        if self.unit or not self.syms:
            parts.append(format_rational(self.unit))
        for s, c in self.syms:
            if c == 1:
                parts.append(s.name)
            elif c == -1:
                parts.append(f"-{s.name}")
            else:
                parts.append(f"{format_rational(c)}*{s.name}")
        return " + ".join(parts).replace("+ -", "- ")

    def __hash__(self):
        h = self._hash
        if h is None:
            h = self._hash = hash((self.unit, self.syms)) if self.syms else hash(self.unit)
        return h

    def __eq__(self, other):
        if type(other) is ExactReal:
            return self.unit == other.unit and self.syms == other.syms
        if isinstance(other, _RATIONAL):
            return not self.syms and self.unit == other
        return NotImplemented

    def __bool__(self):
        return bool(self.unit) or bool(self.syms)

    @property
    def is_rational(self):
        return not self.syms

    def coefficient(self, symbol):
        name = symbol if isinstance(symbol, str) else symbol.name
        for s, c in self.syms:
            if s.name == name:
                return c
        return _MPQ(0)

    @property
    def symbols(self):
        return tuple(s for s, _ in self.syms)

    # -- ring operations -------------------------------------------------

    def __add__(self, other):
        if type(other) is not ExactReal:
            if isinstance(other, _RATIONAL):
                return ExactReal._make(self.unit + other, self.syms)
            return NotImplemented
        a, b = self.syms, other.syms
        if not b:
            syms = a
        elif not a:
            syms = b
        else:
            syms = _merge_syms(a, b, 1)
        return ExactReal._make(self.unit + other.unit, syms)

    __radd__ = __add__

    def __neg__(self):
        return ExactReal._make(-self.unit, tuple((s, -c) for s, c in self.syms))

    def __sub__(self, other):
        if type(other) is not ExactReal:
            if isinstance(other, _RATIONAL):
                return ExactReal._make(self.unit - other, self.syms)
            return NotImplemented
        a, b = self.syms, other.syms
        if not b:
            syms = a
        elif not a:
            syms = tuple((s, -c) for s, c in b)
        else:
            syms = _merge_syms(a, b, -1)
        return ExactReal._make(self.unit - other.unit, syms)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, q):
        if type(q) is ExactReal:
            if q.syms and self.syms:
                raise ArithmeticError("product of two irrational ExactReals leaves the Q-span")
            if self.syms:
                q = q.unit
            else:
                return q * self.unit
        if not isinstance(q, _RATIONAL):
            return NotImplemented
        if not q:
            return ZERO
        q = _q(q)
        return ExactReal._make(self.unit * q, tuple((s, c * q) for s, c in self.syms))

    __rmul__ = __mul__

    def __truediv__(self, q):
        if type(q) is ExactReal:
            if q.syms:
                raise ArithmeticError("division by an irrational ExactReal")
            q = q.unit
        return self * (1 / parse_rational(q))

    # -- ordering --------------------------------------------------------

    def sign(self):
        return _sign(self)

    def __lt__(self, other):
        return _sign(self - other) < 0

    def __le__(self, other):
        return _sign(self - other) <= 0

    def __gt__(self, other):
        return _sign(self - other) > 0

    def __ge__(self, other):
        return _sign(self - other) >= 0

    # -- approximations and I/O -----------------------------------------

    def enclosure(self, level=1):
        """Rational interval containing the value, from the symbols' level-``level`` enclosures."""
        lo = hi = self.unit
        for s, c in self.syms:
            enc = s.enclosure(level) or s.enclosure(0)
            if c > 0:
                lo += c * enc[0]
                hi += c * enc[1]
            else:
                lo += c * enc[1]
                hi += c * enc[0]
        return lo, hi

    def approx(self, level=2):
        """A rational approximation (midpoint of an enclosure); never used for decisions."""
        if not self.syms:
            return self.unit
        lo, hi = self.enclosure(level)
        return (lo + hi) / 2

    def __float__(self):
        return float(self.approx())

    def to_json(self, decimal=False):
        out = {"unit": format_rational(self.unit)}
        if self.syms:
            out["syms"] = {s.name: format_rational(c) for s, c in self.syms}
        if decimal:
            out["decimal"] = f"{float(self):.12g}"
        return out


def _merge_syms(a, b, sign):
    out = []
    i = j = 0
    na, nb = len(a), len(b)
    while i < na and j < nb:
        sa, ca = a[i]
        sb, cb = b[j]
        if sa is sb or sa == sb:
            c = ca + cb if sign > 0 else ca - cb
            if c:
                out.append((sa, c))
            i += 1
            j += 1
        elif sa.name < sb.name:
            out.append(a[i])
            i += 1
        else:
            out.append((sb, cb if sign > 0 else -cb))
            j += 1
    out.extend(a[i:])
    if j < nb:
        out.extend(b[j:] if sign > 0 else [(s, -c) for s, c in b[j:]])
    return tuple(out)


ZERO = ExactReal._make(mpq(0), ())
ONE = ExactReal._make(mpq(1), ())


def as_real(x):
    """Coerce ints, Fractions, strings and ExactReals to ExactReal."""
    if type(x) is ExactReal:
        return x
    if isinstance(x, Symbol):
        return x.value
    return ExactReal._make(_q(x), ())


def _scaled(x):
    """Integer form ``(U, ((symbol, C), ...))`` of ``x`` times the lcm of its denominators."""
    got = x._scaled
    if got is None:
        den = x.unit.denominator
        for _, c in x.syms:
            den = den * c.denominator // math.gcd(den, c.denominator)
        got = (int(x.unit.numerator * (den // x.unit.denominator)),
               tuple((s, int(c.numerator * (den // c.denominator))) for s, c in x.syms))
        x._scaled = got
    return got


@lru_cache(maxsize=1 << 18)
def _certified_sign(x):
    U, terms = _scaled(x)
    budget = _budget.get()
    for level in range(budget + 1):
        bits = _bits(level)
        lo = hi = U << bits
        ok = True
        for s, C in terms:
            enc = s.dyadic(level)
            if not enc:
                ok = False
                break
            if C > 0:
                lo += C * enc[0]
                hi += C * enc[1]
            else:
                lo += C * enc[1]
                hi += C * enc[0]
        if not ok:
            break
        if lo > 0:
            return 1
        if hi < 0:
            return -1
    raise UndecidedComparison(
        f"could not certify the sign of {x} within {budget} refinements")


def _sign(x):
    if not x.syms:
        u = x.unit
        return (u > 0) - (u < 0)
    return _certified_sign(x)


def cmp(x, y):
    """Exact three-way comparison of two ExactReals."""
    x, y = as_real(x), as_real(y)
    if x == y:
        return Ordering.EQ
    return Ordering(_sign(x - y))


def floor_div(x, length):
    """Integer ``n`` with ``n * length <= x < (n + 1) * length``."""
    x, length = as_real(x), as_real(length)
    if _sign(length) <= 0:
        raise ValueError("length must be positive")
    n = int(math.floor(x.approx() / length.approx()))
    while _sign(x - length * n) < 0:
        n -= 1
    while _sign(x - length * (n + 1)) >= 0:
        n += 1
    return n


def mod_interval(x, length):
    """Reduce ``x`` into ``[0, length)`` by an integer multiple of ``length``."""
    x, length = as_real(x), as_real(length)
    n = floor_div(x, length)
    return x - length * n if n else x


def in_q_span(x, gens):
    """Rational ``(q_0, ..., q_r)`` with ``x = sum q_i gens_i``, or None.

    Solved exactly, one equation per basis element (1 and each symbol).
    Free variables are set to zero, so the answer is the solution supported
    on the leftmost independent generators.
    """
    x = as_real(x)
    gens = [as_real(g) for g in gens]
    rows = [None]
    seen = set()
    for v in [x, *gens]:
        for s, _ in v.syms:
            if s not in seen:
                seen.add(s)
                rows.append(s)

    def coord(v, r):
        return v.unit if r is None else v.coefficient(r)

    ncols = len(gens)
    mat = [[coord(g, r) for g in gens] + [coord(x, r)] for r in rows]
    pivots = []
    row = 0
    for col in range(ncols):
        piv = next((i for i in range(row, len(mat)) if mat[i][col]), None)
        if piv is None:
            continue
        mat[row], mat[piv] = mat[piv], mat[row]
        p = mat[row][col]
        mat[row] = [v / p for v in mat[row]]
        for i in range(len(mat)):
            if i != row and mat[i][col]:
                f = mat[i][col]
                mat[i] = [a - f * b for a, b in zip(mat[i], mat[row])]
        pivots.append(col)
        row += 1
        if row == len(mat):
            break
    if any(mat[i][ncols] for i in range(row, len(mat))):
        return None
    sol = [Fraction(0)] * ncols
    for i, col in enumerate(pivots):
        v = mat[i][ncols]
        sol[col] = Fraction(int(v.numerator), int(v.denominator))
    return tuple(sol)

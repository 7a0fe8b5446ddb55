"""Independent reference implementations used by the tests.

Nothing here imports the package's algorithms; values are evaluated with
50-digit decimals, groups are handled abstractly.
"""

from decimal import Decimal, getcontext
from itertools import product

getcontext().prec = 60

SQRT2_M1 = Decimal(2).sqrt() - 1
SQRT3_M1 = Decimal(3).sqrt() - 1


def dec(x, values):
    """Decimal value of an ExactReal given ``{symbol name: Decimal}``."""
    out = frac_dec(x.unit)
    for s, c in x.syms:
        out += frac_dec(c) * values[s.name]
    return out


def frac_dec(q):
    return Decimal(int(q.numerator)) / Decimal(int(q.denominator))


class NumericIet:
    """A float-free pointwise model of an Iet built from its cells."""

    def __init__(self, t, values):
        self.lengths = {c.label: dec(c.length, values) for c in t.codomain.components}
        self.circle = {c.label: c.is_circle for c in t.codomain.components}
        self.cells = [(sc, dec(a, values), dec(b, values), dc, dec(s, values))
                      for sc, a, b, dc, s in t.cells]

    def __call__(self, c, x):
        for sc, a, b, dc, s in self.cells:
            if sc == c and a <= x < b:
                return dc, s + (x - a)
        raise AssertionError(f"point {c}:{x} not covered")


def rotate(x, t):
    return (x + t) % 1


def arcs_intersect(arcs1, arcs2):
    """Half-open arcs ``(start, end)`` on R/Z given as Decimals; wrap allowed."""
    def pieces(arcs):
        out = []
        for a, b in arcs:
            a %= 1
            length = b - a if b > a else b - a + 1
            if a + length <= 1:
                out.append((a, a + length))
            else:
                out.extend([(a, Decimal(1)), (Decimal(0), a + length - 1)])
        return out
    for a, b in pieces(arcs1):
        for c, d in pieces(arcs2):
            if max(a, c) < min(b, d):
                return True
    return False


# --- abstract groups ----------------------------------------------------------


def wreath_mul(x, y, m):
    """``Z/m wr Z`` elements as ``(frozenset of (pos, val)), shift)``."""
    lamp = dict(x[0])
    for p, v in y[0]:
        q = p + x[1]
        lamp[q] = (lamp.get(q, 0) + v) % m
    return (frozenset((p, v) for p, v in lamp.items() if v), x[1] + y[1])


def wreath_ball_sizes(m, radius):
    e = (frozenset(), 0)
    gens = [(frozenset({(0, 1)}), 0), (frozenset({(0, m - 1)}), 0),
            (frozenset(), 1), (frozenset(), -1)]
    if m == 2:
        gens = gens[:1] + gens[2:]
    seen = {e}
    frontier = [e]
    sizes = [1]
    for _ in range(radius):
        nxt = []
        for g in frontier:
            for s in gens:
                h = wreath_mul(g, s, m)
                if h not in seen:
                    seen.add(h)
                    nxt.append(h)
        sizes.append(len(seen))
        frontier = nxt
    return sizes


def bfs(start, step, limit=None):
    seen = {start}
    frontier = [start]
    while frontier:
        nxt = []
        for x in frontier:
            for y in step(x):
                if y not in seen:
                    seen.add(y)
                    nxt.append(y)
        frontier = nxt
        if limit and len(seen) > limit:
            break
    return seen


def perm_compose(p, q):
    return tuple(p[q[i]] for i in range(len(q)))


def s3():
    return [tuple(p) for p in __import__("itertools").permutations(range(3))]


def product_orbit_size(n, fiber):
    """Orbit of a fiber tuple under n independent copies of S3 (coordinate-wise)."""
    return len(set(product(*[{p[fiber[i]] for p in s3()} for i in range(n)])))

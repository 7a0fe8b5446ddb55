"""Finitely generated groups of IETs: balls, orbits, regular orbits, Imanishi.

The decomposition follows the classical recipe: cut the domain along the
regular orbits of those generator discontinuities whose regular orbit is
finite, group the components of the cut domain into classes connected by
the generators, then decide each class.  A class on which some generator is
discontinuous is irreducible.  A class on which every generator is
continuous is acted on by isometries permuting its components; its orbits
are finite exactly when the rotation parts of the component stabilizers are
rational, which is decided exactly.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction

from .domain import CIRCLE, Point, Subdomain
from .exact import ZERO, in_q_span
from .iet import (IetError, apply, compose, conjugate, cut_domain, disc_set, identity, image,
                  inverse, restrict)

__all__ = [
    "FinGenGroup",
    "BallResult",
    "OrbitResult",
    "COMPLETE",
    "CAPPED",
    "ball",
    "orbit",
    "regular_orbit",
    "d_f_set",
    "Decomposition",
    "imanishi_decompose",
    "finite_orbit_triviality",
    "relative_stability",
    "birkhoff_frequency",
    "abstract_ball",
]

COMPLETE = "COMPLETE"
CAPPED = "CAPPED"

DEFAULT_CAP = 10_000


class FinGenGroup:
    """A group given by named generators, closed under inverses on construction.

    Identity generators and duplicates (in canonical form) are dropped.  The
    inverse of ``g`` is added as ``"g^-1"`` unless it already appears.
    """

    def __init__(self, generators, symmetric=True, allow_trivial=False):
        if isinstance(generators, dict):
            items = list(generators.items())
        else:
            items = [(f"g{i}", g) for i, g in enumerate(generators)]
        if not items:
            raise ValueError("need at least one generator")
        dom = items[0][1].domain
        gens = {}
        for name, g in items:
            if g.domain != dom or g.codomain != dom:
                raise IetError(f"generator {name!r} lives on another domain")
            if g.is_identity or any(g == h for h in gens.values()):
                continue
            gens[name] = g
        if not gens and not allow_trivial:
            raise ValueError("all generators are the identity")
        self.named = dict(gens)
        if symmetric:
            for name, g in list(gens.items()):
                gi = inverse(g)
                if not any(gi == h for h in gens.values()):
                    gens[name + "^-1"] = gi
        self.domain = dom
        self.generators = gens

    def __repr__(self):
        return f"FinGenGroup({list(self.generators)})"

    def __iter__(self):
        return iter(self.generators.values())

    def __len__(self):
        return len(self.generators)

    def evaluate(self, word):
        """Product of generator names, rightmost applied first."""
        out = identity(self.domain)
        for name in word:
            out = compose(out, self.generators[name])
        return out


@dataclass
class BallResult:
    elements: dict          # Iet -> shortest word (tuple of generator names)
    sizes: list             # sizes[r] = |B_r|
    complete: bool = True

    def __len__(self):
        return len(self.elements)


def ball(G, radius, max_elements=None):
    """All products of at most ``radius`` generators, deduplicated exactly."""
    if radius < 0:
        raise ValueError("radius must be non-negative")
    e = identity(G.domain)
    elements = {e: ()}
    sizes = [1]
    frontier = [e]
    gens = list(G.generators.items())
    for _ in range(radius):
        nxt = []
        for g in frontier:
            word = elements[g]
            for name, s in gens:
                h = compose(g, s)
                if h not in elements:
                    elements[h] = word + (name,)
                    nxt.append(h)
                    if max_elements is not None and len(elements) >= max_elements:
                        sizes.append(len(elements))
                        return BallResult(elements, sizes, complete=False)
        sizes.append(len(elements))
        frontier = nxt
    return BallResult(elements, sizes)


@dataclass
class OrbitResult:
    points: dict            # Point -> word length needed to reach it
    growth: list            # [(r, #(B_r . x))]
    complete: bool = True


def orbit(G, x, radius, max_points=None):
    """``B_radius . x`` computed by breadth-first search on points."""
    if radius < 0:
        raise ValueError("radius must be non-negative")
    G.domain.check_point(x)
    seen = {x: 0}
    growth = [(0, 1)]
    frontier = [x]
    gens = list(G.generators.values())
    for r in range(1, radius + 1):
        nxt = []
        for y in frontier:
            for s in gens:
                z = apply(s, y)
                if z not in seen:
                    seen[z] = r
                    nxt.append(z)
        growth.append((r, len(seen)))
        frontier = nxt
        if max_points is not None and len(seen) > max_points:
            return OrbitResult(seen, growth, complete=False)
    return OrbitResult(seen, growth)


def _gens(S):
    if isinstance(S, FinGenGroup):
        return list(S.generators.values())
    if isinstance(S, dict):
        return list(S.values())
    return list(S)


def regular_orbit(S, x, cap=DEFAULT_CAP):
    """Points reachable from ``x`` by generator steps that are continuous where applied.

    Returns ``(points, status)``: ``COMPLETE`` when the closure has at most
    ``cap`` points, ``CAPPED`` otherwise.  A boundary point is its own
    regular orbit.
    """
    if cap < 1:
        raise ValueError("cap must be positive")
    gens = _gens(S)
    dom = gens[0].domain
    if dom.is_boundary(x):
        return frozenset([x]), COMPLETE
    discs = [set(disc_set(s)) for s in gens]
    seen = {x}
    queue = deque([x])
    while queue:
        y = queue.popleft()
        for s, bad in zip(gens, discs):
            if y in bad:
                continue
            z = apply(s, y)
            if z not in seen:
                seen.add(z)
                if len(seen) > cap:
                    return frozenset(seen), CAPPED
                queue.append(z)
    return frozenset(seen), COMPLETE


@dataclass
class DfResult:
    finite: dict            # discontinuity point -> its (finite) regular orbit
    unresolved: list        # discontinuity points whose exploration hit the cap

    @property
    def points(self):
        return set(self.finite)


def d_f_set(S, cap=DEFAULT_CAP):
    """Discontinuity points of the generators whose regular orbit is finite."""
    gens = _gens(S)
    pts = []
    seen = set()
    for s in gens:
        for p in disc_set(s):
            if p not in seen:
                seen.add(p)
                pts.append(p)
    finite = {}
    unresolved = []
    for p in pts:
        reg, status = regular_orbit(gens, p, cap)
        if status == COMPLETE:
            finite[p] = reg
        else:
            unresolved.append(p)
    return DfResult(finite, unresolved)


@dataclass
class ClassInfo:
    components: tuple       # component labels of the cut domain
    verdict: str            # IRREDUCIBLE | FINITE | UNDECIDED
    cardinality: int = None
    reason: str = ""
    corroborated: bool = None


@dataclass
class Decomposition:
    irreducible: list = field(default_factory=list)
    finite_part: list = field(default_factory=list)     # (Subdomain, orbit cardinality)
    residual_undecided: list = field(default_factory=list)
    classes: list = field(default_factory=list)         # ClassInfo on the cut domain
    cut_points: tuple = ()
    unresolved: tuple = ()
    cut_domain: object = None

    @property
    def decided(self):
        return not self.residual_undecided

    @property
    def corroborated(self):
        return all(c.corroborated is not False for c in self.classes)

    def to_json(self, decimal=True):
        return {
            "irreducible": [s.to_json(decimal) for s in self.irreducible],
            "finite_part": [{"subdomain": s.to_json(decimal), "orbit_cardinality": k}
                            for s, k in self.finite_part],
            "residual_undecided": [s.to_json(decimal) for s in self.residual_undecided],
            "classes": [{"components": list(c.components), "verdict": c.verdict,
                         "cardinality": c.cardinality, "reason": c.reason,
                         "corroborated": c.corroborated} for c in self.classes],
            "cut_points": [p.to_json(decimal) for p in self.cut_points],
            "unresolved_discontinuities": [p.to_json(decimal) for p in self.unresolved],
        }


class _UnionFind:
    def __init__(self, items):
        self.parent = {x: x for x in items}

    def find(self, x):
        while self.parent[x] != x:
            self.parent[x] = self.parent[self.parent[x]]
            x = self.parent[x]
        return x

    def union(self, a, b):
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.parent[rb] = ra


def imanishi_decompose(G, cap=DEFAULT_CAP, density_points=None, capped_as_infinite=False):
    """Split the domain into irreducible components and a finite-orbit part.

    Discontinuity points whose regular orbit exceeds ``cap`` make their class
    ``residual_undecided`` unless ``capped_as_infinite`` is set, in which
    case they are taken to be infinite (the dichotomy's hypothesis).
    Irreducible verdicts are corroborated by an orbit density check with at
    most ``density_points`` points (default ``cap``); finite verdicts by
    computing sample orbits.
    """
    if not isinstance(G, FinGenGroup):
        G = FinGenGroup(G)
    gens = list(G.generators.values())
    D = G.domain
    df = d_f_set(gens, cap)
    cuts = set()
    for reg in df.finite.values():
        cuts.update(p for p in reg if not D.is_boundary(p))
    cut_pts = tuple(sorted(cuts, key=lambda p: (D.index(p.c), p.offset)))
    D2, phi = cut_domain(D, cut_pts)
    phi_inv = inverse(phi)
    gens2 = [conjugate(phi, s) for s in gens]
    undecided_pts = [apply(phi, p) for p in df.unresolved] if not capped_as_infinite else []

    uf = _UnionFind(D2.labels)
    for s in gens2:
        for sc, _, _, dc, _ in s.cells:
            uf.union(sc, dc)
    classes = {}
    for lab in D2.labels:
        classes.setdefault(uf.find(lab), []).append(lab)

    disc_by_comp = {}
    for s in gens2:
        for p in disc_set(s):
            disc_by_comp.setdefault(p.c, []).append(p)

    result = Decomposition(cut_points=cut_pts, unresolved=tuple(df.unresolved), cut_domain=D2)
    density_points = cap if density_points is None else density_points
    for comps in classes.values():
        comps = tuple(comps)
        compset = set(comps)
        sub2 = Subdomain.whole(D2, comps)
        back = image(phi_inv, sub2)
        if any(p.c in compset for p in undecided_pts):
            result.classes.append(ClassInfo(comps, "UNDECIDED",
                                            reason="regular orbit of a discontinuity hit the cap"))
            result.residual_undecided.append(back)
            continue
        if any(c in disc_by_comp for c in comps):
            info = ClassInfo(comps, "IRREDUCIBLE", reason="generator discontinuous inside the class")
        else:
            info = _continuous_class(D2, gens2, comps)
        if info.verdict == "IRREDUCIBLE":
            info.corroborated = _density_check(D2, gens2, comps, density_points)
            result.irreducible.append(back)
        else:
            info.corroborated = _finite_check(D2, gens2, comps, info.cardinality)
            result.finite_part.append((back, info.cardinality))
        result.classes.append(info)
    return result


def _continuous_class(D2, gens, comps):
    """Decide a class on which every generator is continuous."""
    kinds = {D2.component(c).kind for c in comps}
    lengths = {D2.length(c) for c in comps}
    if len(kinds) != 1 or len(lengths) != 1:
        raise IetError("continuous class mixes component kinds or lengths")
    L = lengths.pop()
    # each generator maps each component isometrically onto a component
    moves = []  # (c, target, rotation)
    for s in gens:
        idx = s.index()
        for c in comps:
            _, cells = idx[c]
            tgt = cells[0][3]
            if any(cell[3] != tgt for cell in cells):
                raise IetError("continuous generator splits a component")
            moves.append((c, tgt, cells[0][4]))
    if kinds.pop() != CIRCLE:
        return ClassInfo(comps, "FINITE", cardinality=len(comps),
                         reason="generators permute interval components")
    rot = {comps[0]: ZERO}
    queue = deque([comps[0]])
    adj = {}
    for c, t, r in moves:
        adj.setdefault(c, []).append((t, r))
    while queue:
        c = queue.popleft()
        for t, r in adj.get(c, ()):
            if t not in rot:
                rot[t] = rot[c] + r
                queue.append(t)
    order = 1
    for c, t, r in moves:
        angle = rot[c] + r - rot[t]
        q = in_q_span(angle, [L])
        if q is None:
            return ClassInfo(comps, "IRREDUCIBLE",
                             reason="a component stabilizer contains an irrational rotation")
        den = Fraction(q[0]).denominator
        order = order * den // math.gcd(order, den)
    return ClassInfo(comps, "FINITE", cardinality=len(comps) * order,
                     reason="isometric action with rational rotation parts")


def _orbit_points(gens, x, limit):
    seen = {x}
    queue = deque([x])
    while queue and len(seen) <= limit:
        y = queue.popleft()
        for s in gens:
            z = apply(s, y)
            if z not in seen:
                seen.add(z)
                queue.append(z)
    return seen


def _finite_check(D2, gens, comps, cardinality):
    for c in comps:
        L = D2.length(c)
        for frac in (Fraction(1, 3), Fraction(5, 7)):
            pts = _orbit_points(gens, Point(c, L * frac), cardinality + 1)
            if len(pts) != cardinality:
                return False
    return True


def _density_check(D2, gens, comps, limit):
    total = ZERO
    for c in comps:
        total = total + D2.length(c)
    eps = float(total) / 100
    start = Point(comps[0], D2.length(comps[0]) / 2)
    seen = {start}
    queue = deque([start])
    checked = 0
    while queue and len(seen) <= limit:
        y = queue.popleft()
        for s in gens:
            z = apply(s, y)
            if z not in seen:
                seen.add(z)
                queue.append(z)
        if len(seen) >= 2 * checked + 64:
            checked = len(seen)
            if _eps_dense(D2, comps, seen, eps):
                return True
    return _eps_dense(D2, comps, seen, eps)


def _eps_dense(D2, comps, pts, eps):
    by = {c: [] for c in comps}
    for p in pts:
        if p.c in by:
            by[p.c].append(float(p.offset))
    for c in comps:
        xs = sorted(by[c])
        L = float(D2.length(c))
        if not xs:
            return False
        gaps = [b - a for a, b in zip(xs, xs[1:])]
        if D2.is_circle(c):
            gaps.append(xs[0] + L - xs[-1])
        else:
            gaps.extend([2 * xs[0], 2 * (L - xs[-1])])
        if max(gaps) > 2 * eps:
            return False
    return True


def finite_orbit_triviality(G, cap=DEFAULT_CAP, decomposition=None):
    """True iff every finite orbit is a single point; None when undecided."""
    dec = decomposition or imanishi_decompose(G, cap)
    if dec.residual_undecided:
        return None
    return all(k == 1 for _, k in dec.finite_part)


def relative_stability(G, H_gens, cap=DEFAULT_CAP):
    """Check each irreducible component of ``G`` against the subgroup ``<H_gens>``.

    For every irreducible component ``J`` of ``G`` the restriction of ``H``
    to ``J`` is decomposed; the verdict is ``PRESERVED`` when it stays a
    single irreducible component, ``SPLIT`` otherwise and ``UNKNOWN`` when
    the sub-decomposition is undecided.  This is a check against one given
    subgroup, not against all finite-index subgroups.
    """
    if not isinstance(G, FinGenGroup):
        G = FinGenGroup(G)
    H_gens = _gens(H_gens)
    dec = imanishi_decompose(G, cap)
    comps = []
    for J in dec.irreducible:
        restricted = [restrict(h, J)[0] for h in H_gens]
        restricted = [r for r in restricted if not r.is_identity]
        if not restricted:
            comps.append({"component": J, "verdict": "SPLIT", "pieces": None,
                          "reason": "subgroup acts trivially"})
            continue
        sub = imanishi_decompose(FinGenGroup(restricted), cap)
        if sub.residual_undecided:
            verdict = "UNKNOWN"
        elif len(sub.irreducible) == 1 and not sub.finite_part:
            verdict = "PRESERVED"
        else:
            verdict = "SPLIT"
        comps.append({"component": J, "verdict": verdict,
                      "pieces": len(sub.irreducible) + len(sub.finite_part),
                      "reason": ""})
    trivial = finite_orbit_triviality(G, cap, dec)
    verdicts = [c["verdict"] for c in comps]
    if "UNKNOWN" in verdicts or trivial is None:
        overall = "UNKNOWN"
    elif all(v == "PRESERVED" for v in verdicts) and trivial:
        overall = "OK"
    else:
        overall = "UNSTABLE"
    return {"verdict": overall, "finite_orbits_trivial": trivial, "components": comps,
            "decomposition": dec}


def birkhoff_frequency(T, x, E, n):
    """``#{0 <= i < n : T^i(x) in E} / n`` as an exact rational."""
    if n < 1:
        raise ValueError("n must be at least 1")
    T.domain.check_point(x)
    count = 0
    y = x
    for _ in range(n):
        if y in E:
            count += 1
        y = apply(T, y)
    return Fraction(count, n)


def abstract_ball(identity_elem, generators, mul, radius):
    """Ball sizes of an abstractly given group (elements must be hashable).

    ``generators`` maps names to elements and ``mul(a, b)`` is the product.
    Returns ``(elements -> word, sizes)``.
    """
    elements = {identity_elem: ()}
    sizes = [1]
    frontier = [identity_elem]
    for _ in range(radius):
        nxt = []
        for g in frontier:
            w = elements[g]
            for name, s in generators.items():
                h = mul(g, s)
                if h not in elements:
                    elements[h] = w + (name,)
                    nxt.append(h)
        sizes.append(len(elements))
        frontier = nxt
    return elements, sizes

"""Finite groups of IETs: stabilizer partitions and the product-orbit bound.

Finite subgroups are passed as explicit element lists.  Their closure is
checked, not trusted.  Everything about stabilizers is decided pointwise,
because on each piece of the common refinement of the cells every element
acts by a single translation.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import permutations as _permutations

import numpy as np

from .domain import Point, Subdomain
from .exact import ZERO
from .iet import apply, compose, identity, inverse

__all__ = [
    "FiniteGroup",
    "NotASubgroup",
    "as_subgroup",
    "stab_partition",
    "nonnormal_locus",
    "nonabelian_quotient_locus",
    "product_orbit_bound",
    "ProductOrbitReport",
    "permutation_lamps",
]


class NotASubgroup(ValueError):
    pass


class FiniteGroup:
    """A finite group given by its multiplication table on ``0..n-1``.

    ``table[i][j]`` is ``i * j``.  An optional ``action`` gives, for each
    element, a permutation (tuple) of a finite set; it must be a
    homomorphism, ``action[i*j] = action[i] o action[j]``.
    """

    def __init__(self, table, action=None):
        n = len(table)
        if n == 0 or any(len(row) != n for row in table):
            raise ValueError("group table must be a non-empty square")
        table = [list(map(int, row)) for row in table]
        if any(not 0 <= v < n for row in table for v in row):
            raise ValueError("group table entries out of range")
        ident = next((e for e in range(n)
                      if all(table[e][x] == x and table[x][e] == x for x in range(n))), None)
        if ident is None:
            raise ValueError("group table has no identity")
        for i in range(n):
            for j in range(n):
                for k in range(n):
                    if table[table[i][j]][k] != table[i][table[j][k]]:
                        raise ValueError("group table is not associative")
        inv = []
        for i in range(n):
            row = table[i]
            try:
                inv.append(row.index(ident))
            except ValueError:
                raise ValueError(f"element {i} has no inverse") from None
            if table[inv[-1]][i] != ident:
                raise ValueError(f"element {i} has no two-sided inverse")
        self.table = table
        self.order = n
        self.identity = ident
        self._inv = inv
        self.action = None
        if action is not None:
            action = [tuple(p) for p in action]
            if len(action) != n:
                raise ValueError("action needs one permutation per element")
            for i in range(n):
                for j in range(n):
                    comp = tuple(action[i][action[j][p]] for p in range(len(action[j])))
                    if comp != action[table[i][j]]:
                        raise ValueError("action is not a homomorphism")
            self.action = action

    def mul(self, i, j):
        return self.table[i][j]

    def inv(self, i):
        return self._inv[i]

    def conj(self, g, s):
        return self.table[self.table[g][s]][self._inv[g]]

    def comm(self, g, h):
        t = self.table
        return t[t[t[g][h]][self._inv[g]]][self._inv[h]]

    @property
    def is_abelian(self):
        t = self.table
        return all(t[i][j] == t[j][i] for i in range(self.order) for j in range(i))

    def is_normal(self, sub):
        sub = set(sub)
        return all(self.conj(g, s) in sub for g in range(self.order) for s in sub)

    def quotient_is_abelian(self, normal_sub):
        sub = set(normal_sub)
        return all(self.comm(g, h) in sub for g in range(self.order) for h in range(self.order))

    @classmethod
    def from_permutations(cls, gens):
        """Close a set of permutations (tuples) under composition."""
        gens = [tuple(g) for g in gens]
        if not gens:
            raise ValueError("need at least one permutation")
        m = len(gens[0])
        ident = tuple(range(m))
        elems = [ident]
        seen = {ident: 0}
        frontier = [ident]
        while frontier:
            nxt = []
            for p in frontier:
                for g in gens:
                    q = tuple(g[p[i]] for i in range(m))
                    if q not in seen:
                        seen[q] = len(elems)
                        elems.append(q)
                        nxt.append(q)
            frontier = nxt
        table = [[seen[tuple(a[b[i]] for i in range(m))] for b in elems] for a in elems]
        return cls(table, elems)

    @classmethod
    def cyclic(cls, n):
        return cls.from_permutations([tuple((i + 1) % n for i in range(n))]) if n > 1 \
            else cls([[0]], [(0,)])

    @classmethod
    def symmetric(cls, n):
        if n == 1:
            return cls([[0]], [(0,)])
        gens = [tuple([1, 0] + list(range(2, n))), tuple(list(range(1, n)) + [0])]
        return cls.from_permutations(gens)

    @classmethod
    def regular(cls, group):
        """The same group acting on itself by left multiplication."""
        action = [tuple(group.table[g][x] for x in range(group.order)) for g in range(group.order)]
        return cls(group.table, action)


def as_subgroup(elements):
    """Index an explicit list of Iets and verify it is a subgroup.

    Returns ``(elements, table)`` where ``table[i][j]`` indexes ``e_i o e_j``.
    """
    elements = list(elements)
    if not elements:
        raise NotASubgroup("empty element list")
    dom = elements[0].domain
    index = {}
    for i, e in enumerate(elements):
        if e.domain != dom or e.codomain != dom:
            raise NotASubgroup("elements live on different domains")
        if e in index:
            raise NotASubgroup(f"element {i} is listed twice")
        index[e] = i
    if identity(dom) not in index:
        raise NotASubgroup("identity missing")
    table = []
    for e in elements:
        row = []
        for f in elements:
            k = index.get(compose(e, f))
            if k is None:
                raise NotASubgroup("not closed under composition")
            row.append(k)
        table.append(row)
    for e in elements:
        if inverse(e) not in index:
            raise NotASubgroup("not closed under inverses")
    return elements, FiniteGroup(table)


def _breakpoints(elements):
    dom = elements[0].domain
    cuts = {c.label: {ZERO} for c in dom.components}
    for e in elements:
        for sc, a, _, _, _ in e.cells:
            cuts[sc].add(a)
    return {lab: sorted(pts) for lab, pts in cuts.items()}


def stab_partition(elements):
    """Pieces of the domain on which the point stabilizer is constant.

    Returns a list of ``(Subdomain, stabilizer)`` with ``stabilizer`` a tuple
    of indices into ``elements``, one entry per distinct stabilizer, in order
    of first appearance along the domain.
    """
    elements, _ = as_subgroup(elements)
    return _stab_pieces(elements)


def _stab_pieces(elements):
    dom = elements[0].domain
    groups = {}
    order = []
    cuts = _breakpoints(elements)
    for comp in dom.components:
        pts = cuts[comp.label] + [comp.length]
        for a, b in zip(pts, pts[1:]):
            p = Point(comp.label, a)
            stab = tuple(i for i, e in enumerate(elements) if apply(e, p) == p)
            if stab not in groups:
                groups[stab] = []
                order.append(stab)
            groups[stab].append((comp.label, a, b))
    return [(Subdomain.from_arcs(dom, groups[s]), s) for s in order]


def nonnormal_locus(elements):
    """Union of the pieces where the stabilizer is not normal."""
    elements, grp = as_subgroup(elements)
    out = Subdomain.empty(elements[0].domain)
    for sub, stab in _stab_pieces(elements):
        if not grp.is_normal(stab):
            out = out | sub
    return out


def nonabelian_quotient_locus(elements):
    """Union of the pieces where ``F / Stab(x)`` is non-abelian (or Stab not normal)."""
    elements, grp = as_subgroup(elements)
    out = Subdomain.empty(elements[0].domain)
    for sub, stab in _stab_pieces(elements):
        if not grp.is_normal(stab) or not grp.quotient_is_abelian(stab):
            out = out | sub
    return out


@dataclass
class ProductOrbitReport:
    orbit_size: int
    lower_bound: int
    factors: list = field(default_factory=list)   # per factor: dict of facts
    stabilizer_normal: bool = False

    @property
    def holds(self):
        return self.orbit_size >= self.lower_bound

    def to_json(self):
        return {"orbit_size": self.orbit_size, "lower_bound": self.lower_bound,
                "stabilizer_normal_in_product": self.stabilizer_normal,
                "factors": self.factors, "holds": self.holds}


def product_orbit_bound(factors, x):
    """Exact orbit of ``x`` under a product of commuting finite subgroups.

    ``factors`` is a list of element lists.  Pairwise commutation across
    factors is verified element by element.  The predicted lower bound is
    ``2**k`` where ``k`` counts the factors whose stabilizer at ``x`` is not
    normal, or (when the full stabilizer is normal in the product) the
    factors with a non-abelian quotient ``F_i / Stab_{F_i}(x)``.
    """
    checked = [as_subgroup(f) for f in factors]
    factors = [els for els, _ in checked]
    # generators commuting pairwise is enough for the subgroups to commute
    small = [[els[i] for i in _generating_set(grp)] for els, grp in checked]
    for i in range(len(factors)):
        for j in range(i + 1, len(factors)):
            for g in small[i]:
                for h in small[j]:
                    if compose(g, h) != compose(h, g):
                        raise ValueError(f"factors {i} and {j} do not commute")
    gens = [g for f in factors for g in f if not g.is_identity]
    orbit = [x]
    where = {x: 0}
    k = 0
    while k < len(orbit):
        y = orbit[k]
        for g in gens:
            z = apply(g, y)
            if z not in where:
                where[z] = len(orbit)
                orbit.append(z)
        k += 1

    facts = []
    k_nonnormal = 0
    k_nonabelian = 0
    for f in factors:
        stab = frozenset(i for i, g in enumerate(f) if apply(g, x) == x)
        normal = all(frozenset(i for i, g in enumerate(f) if apply(g, apply(h, x)) == apply(h, x)) == stab
                     for h in f)
        nonabelian = normal and any(apply(g, apply(h, x)) != apply(h, apply(g, x))
                                    for g in f for h in f)
        k_nonnormal += not normal
        k_nonabelian += nonabelian
        facts.append({"order": len(f), "stabilizer_order": len(stab),
                      "stabilizer_normal": normal, "quotient_nonabelian": nonabelian,
                      "triggered": (not normal) or nonabelian})

    stab_normal = _stabilizer_is_normal(gens, orbit, where)
    k = max(k_nonnormal, k_nonabelian if stab_normal else 0)
    report = ProductOrbitReport(len(orbit), 2 ** k, facts, stab_normal)
    if not report.holds:
        raise AssertionError(f"orbit of size {len(orbit)} below the lower bound {2 ** k}")
    return report


def _generating_set(grp):
    """Greedy list of element indices generating ``grp``."""
    gens = []
    span = {grp.identity}
    for g in range(grp.order):
        if g in span:
            continue
        gens.append(g)
        frontier = list(span)
        while frontier:
            nxt = []
            for x in frontier:
                for s in gens:
                    y = grp.mul(x, s)
                    if y not in span:
                        span.add(y)
                        nxt.append(y)
            frontier = nxt
    return gens


def _stabilizer_is_normal(gens, orbit, where):
    """Whether the stabilizer of ``orbit[0]`` acts trivially on the whole orbit.

    Uses Schreier generators ``u_{gy}^-1 g u_y`` of the stabilizer, with
    ``u_y`` a BFS transversal, all as permutations of the orbit.
    """
    n = len(orbit)
    if not gens:
        return True
    perms = [np.fromiter((where[apply(g, y)] for y in orbit), dtype=np.int64, count=n)
             for g in gens]
    ident = np.arange(n)
    trans = {0: ident}
    queue = [0]
    while queue:
        nxt = []
        for y in queue:
            for p in perms:
                z = int(p[y])
                if z not in trans:
                    trans[z] = p[trans[y]]
                    nxt.append(z)
        queue = nxt
    inv = {}
    for y, u in trans.items():
        w = np.empty(n, dtype=np.int64)
        w[u] = ident
        inv[y] = w
    for y, u in trans.items():
        for p in perms:
            z = int(p[y])
            s = inv[z][p[u]]
            if not np.array_equal(s, ident):
                return False
    return True


def permutation_lamps(group, base, support, base_label=None):
    """Elements ``(p, x) -> (g p, x)`` for ``x`` in ``support``, one per group element.

    ``group`` is a :class:`FiniteGroup` with an action on ``range(m)``.
    """
    from .iet import fibered, product_domain

    if group.action is None:
        raise ValueError("group needs a permutation action")
    m = len(group.action[0])
    dom, label_of = product_domain(range(m), base)
    out = []
    for g in range(group.order):
        perm = {p: group.action[g][p] for p in range(m)}
        out.append(fibered(range(m), base, steps=[(support, perm)], domain=dom, label_of=label_of))
    return out


def all_permutations(n):
    return [tuple(p) for p in _permutations(range(n))]

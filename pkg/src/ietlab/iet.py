"""Interval exchange transformations with exact cells.

An :class:`Iet` is a list of cells ``(src_c, a, b, dst_c, s)`` meaning
``x in [a, b) of src_c  ->  s + (x - a) in dst_c``.  Source cells tile the
domain, image cells tile the codomain, nothing wraps, and adjacent cells
that continue the same translation are merged.  That canonical form makes
equality of maps a plain comparison of cell tuples.

Most group elements have ``domain == codomain``; the more general form is
used for interval exchange bijections between two domains (cutting,
restriction).
"""

from __future__ import annotations

from bisect import bisect_right
from fractions import Fraction

from .domain import CIRCLE, INTERVAL, Domain, Point, Subdomain
from .exact import ZERO, as_real

__all__ = [
    "Iet",
    "IetError",
    "identity",
    "rotation",
    "synchronized_rotation",
    "permute_components",
    "from_permutation",
    "fibered",
    "product_domain",
    "compose",
    "inverse",
    "apply",
    "disc_set",
    "d",
    "is_continuous_at",
    "norm_estimate",
    "commutator",
    "power",
    "cut_domain",
    "rechart",
    "conjugate",
    "is_invariant",
    "restrict",
    "image",
    "induce_finite_extension",
    "subdomain_chart",
]


class IetError(ValueError):
    """Cells that do not describe a bijective piecewise translation."""


class Iet:
    __slots__ = ("domain", "codomain", "cells", "_index", "_hash", "_disc")

    def __init__(self, domain, cells, codomain=None, *, _canonical=False):
        self.domain = domain
        self.codomain = domain if codomain is None else codomain
        if _canonical:
            self.cells = cells
        else:
            self.cells = _canonicalize(self.domain, self.codomain, cells)
            self.check()
        self._index = None
        self._hash = None
        self._disc = None

    # -- protocol --------------------------------------------------------

    def __repr__(self):
        return f"Iet({len(self.cells)} cells on {len(self.domain)} components)"

    def __eq__(self, other):
        if self is other:
            return True
        if not isinstance(other, Iet):
            return NotImplemented
        return (self.cells == other.cells and self.domain == other.domain
                and self.codomain == other.codomain)

    def __hash__(self):
        h = self._hash
        if h is None:
            h = self._hash = hash(self.cells)
        return h

    def __mul__(self, other):
        return compose(self, other)

    def __call__(self, p):
        return apply(self, p)

    def __pow__(self, n):
        return power(self, n)

    def __invert__(self):
        return inverse(self)

    @property
    def is_identity(self):
        if self.domain != self.codomain:
            return False
        return all(sc == dc and not a and not s for sc, a, _, dc, s in self.cells) and \
            len(self.cells) == len(self.domain)

    def index(self):
        """Per-component ``(starts, cells)`` lists for bisection."""
        idx = self._index
        if idx is None:
            idx = {}
            for cell in self.cells:
                entry = idx.get(cell[0])
                if entry is None:
                    entry = idx[cell[0]] = ([], [])
                entry[0].append(cell[1])
                entry[1].append(cell)
            self._index = idx
        return idx

    def check(self):
        """Verify the partition invariants; raise IetError otherwise."""
        _check_tiling(self.domain, [(c[0], c[1], c[2]) for c in self.cells], "source")
        images = [(c[3], c[4], c[4] + (c[2] - c[1])) for c in self.cells]
        for dc, s, e in images:
            if dc not in self.codomain:
                raise IetError(f"unknown target component {dc!r}")
            if s.sign() < 0 or e > self.codomain.length(dc):
                raise IetError(f"image [{s}, {e}) leaves component {dc!r}")
        _check_tiling(self.codomain, images, "image")
        return True

    def to_json(self, decimal=False):
        return {"cells": [{"src_c": sc, "src_start": a.to_json(decimal), "src_end": b.to_json(decimal),
                           "dst_c": dc, "dst_start": s.to_json(decimal)}
                          for sc, a, b, dc, s in self.cells]}


def _check_tiling(domain, pieces, what):
    by = {}
    for c, a, b in pieces:
        if c not in domain:
            raise IetError(f"{what} cell on unknown component {c!r}")
        if not a < b:
            raise IetError(f"empty or reversed {what} cell on {c!r}")
        by.setdefault(c, []).append((a, b))
    for comp in domain.components:
        ivs = sorted(by.get(comp.label, []), key=lambda ab: ab[0])
        pos = ZERO
        for a, b in ivs:
            if a != pos:
                raise IetError(f"{what} cells leave a gap or overlap at {comp.label}:{pos}")
            pos = b
        if pos != comp.length:
            raise IetError(f"{what} cells do not cover component {comp.label!r}")


def _merge(cells):
    """Merge consecutive cells that continue the same translation."""
    out = []
    for cell in cells:
        if out:
            sc, a, b, dc, s = out[-1]
            if cell[0] == sc and cell[3] == dc and cell[1] == b and cell[4] == s + (b - a):
                out[-1] = (sc, a, cell[2], dc, s)
                continue
        out.append(cell)
    return tuple(out)


def _canonicalize(domain, codomain, cells):
    pieces = []
    for sc, a, b, dc, s in cells:
        a, b, s = as_real(a), as_real(b), as_real(s)
        if not a < b:
            raise IetError(f"empty cell [{a}, {b}) on {sc!r}")
        if dc not in codomain:
            raise IetError(f"unknown target component {dc!r}")
        if codomain.is_circle(dc):
            L = codomain.length(dc)
            s = codomain.wrap(dc, s)
            e = s + (b - a)
            if e > L:
                cut = a + (L - s)
                pieces.append((sc, a, cut, dc, s))
                pieces.append((sc, cut, b, dc, ZERO))
                continue
        pieces.append((sc, a, b, dc, s))
    for p in pieces:
        if p[0] not in domain:
            raise IetError(f"unknown source component {p[0]!r}")
    pieces.sort(key=lambda c: (domain.index(c[0]), c[1]))
    return _merge(pieces)


# --- builders -----------------------------------------------------------


def identity(domain):
    return Iet(domain, tuple((c.label, ZERO, c.length, c.label, ZERO) for c in domain.components),
               _canonical=True)


def synchronized_rotation(domain, angle, labels=None):
    """Rotate every listed circle (default: all circles) by ``angle``."""
    angle = as_real(angle)
    labels = set(c.label for c in domain.components if c.is_circle) if labels is None else set(labels)
    cells = []
    for c in domain.components:
        if c.label in labels:
            if not c.is_circle:
                raise IetError(f"cannot rotate interval component {c.label!r}")
            cells.append((c.label, ZERO, c.length, c.label, angle))
        else:
            cells.append((c.label, ZERO, c.length, c.label, ZERO))
    return Iet(domain, cells)


def rotation(domain, label, angle):
    """Rotation by ``angle`` of circle ``label``, identity elsewhere."""
    return synchronized_rotation(domain, angle, [label])


def permute_components(domain, perm):
    """Send component ``c`` isometrically onto ``perm[c]`` (lengths must agree)."""
    cells = []
    for c in domain.components:
        d = perm.get(c.label, c.label)
        if domain.length(d) != c.length:
            raise IetError(f"components {c.label!r} and {d!r} differ in length")
        cells.append((c.label, ZERO, c.length, d, ZERO))
    return Iet(domain, cells)


def from_permutation(lengths, perm, label="I", kind=INTERVAL):
    """Classical IET on one component: pieces of ``lengths`` reordered by ``perm``.

    ``perm[i]`` is the position of piece ``i`` in the image.
    """
    lengths = [as_real(x) for x in lengths]
    if sorted(perm) != list(range(len(lengths))):
        raise IetError("perm must be a permutation of range(len(lengths))")
    total = ZERO
    for x in lengths:
        total = total + x
    domain = Domain([(label, kind, total)])
    order = sorted(range(len(lengths)), key=lambda i: perm[i])
    dst = {}
    pos = ZERO
    for i in order:
        dst[i] = pos
        pos = pos + lengths[i]
    cells = []
    pos = ZERO
    for i, x in enumerate(lengths):
        cells.append((label, pos, pos + x, label, dst[i]))
        pos = pos + x
    return Iet(domain, cells)


def product_domain(fibers, base):
    """The domain ``fibers x base`` with labels ``"<fiber>/<base label>"``.

    Returns ``(domain, label_of)`` where ``label_of[(fiber, base_label)]`` is
    the product component label.
    """
    comps = []
    label_of = {}
    for f in fibers:
        for c in base.components:
            lab = f"{_fiber_str(f)}/{c.label}"
            label_of[(f, c.label)] = lab
            comps.append((lab, c.kind, c.length))
    return Domain(comps), label_of


def _fiber_str(f):
    if isinstance(f, tuple):
        return ",".join(str(x) for x in f)
    return str(f)


def fibered(fibers, base, base_map=None, steps=(), domain=None, label_of=None):
    """The map ``(p, x) -> (perm_x(p), g(x))`` on ``fibers x base``.

    ``base_map`` is an Iet ``g`` on ``base`` (identity by default).  ``steps``
    is a list of ``(Subdomain of base, perm)`` with pairwise disjoint
    supports, ``perm`` a dict on fibers; off the supports the fiber is kept.
    """
    if domain is None or label_of is None:
        domain, label_of = product_domain(fibers, base)
    g = identity(base) if base_map is None else base_map
    fibers = list(fibers)
    pieces = []  # (base comp, a, b, perm or None)
    for comp in base.components:
        cuts = [(ZERO, comp.length, None)]
        for sub, perm in steps:
            nxt = []
            ivs = sub.intervals(comp.label)
            for a, b, cur in cuts:
                if cur is not None or not ivs:
                    nxt.append((a, b, cur))
                    continue
                pos = a
                for ia, ib in ivs:
                    lo = ia if ia > pos else pos
                    hi = ib if ib < b else b
                    if lo < hi:
                        if pos < lo:
                            nxt.append((pos, lo, None))
                        nxt.append((lo, hi, perm))
                        pos = hi
                if pos < b:
                    nxt.append((pos, b, None))
            cuts = nxt
        pieces.extend((comp.label, a, b, perm) for a, b, perm in cuts)
    cells = []
    gidx = g.index()
    for c, a, b, perm in pieces:
        starts, gcells = gidx[c]
        i = bisect_right(starts, a) - 1
        while i < len(gcells):
            _, ga, gb, gd, gs = gcells[i]
            lo = a if a > ga else ga
            hi = b if b < gb else gb
            if lo < hi:
                for f in fibers:
                    tgt = perm.get(f, f) if perm else f
                    cells.append((label_of[(f, c)], lo, hi, label_of[(tgt, gd)], gs + (lo - ga)))
            if gb >= b:
                break
            i += 1
    return Iet(domain, cells)


# --- group operations ---------------------------------------------------


def compose(t1, t2):
    """The map ``t1 o t2`` (apply ``t2`` first)."""
    if t2.codomain != t1.domain:
        raise IetError("composition of maps with mismatched domains")
    idx = t1.index()
    out = []
    append = out.append
    for sc, a, b, dc, s in t2.cells:
        e = s + (b - a)
        starts, cells1 = idx[dc]
        i = bisect_right(starts, s) - 1
        lo = s
        while True:
            _, a1, b1, d1, s1 = cells1[i]
            last = b1 >= e
            hi = e if last else b1
            src_lo = a if lo is s else a + (lo - s)
            src_hi = b if last else a + (hi - s)
            append((sc, src_lo, src_hi, d1, s1 + (lo - a1) if lo is not a1 else s1))
            if last:
                break
            lo = b1
            i += 1
    return Iet(t2.domain, _merge(out), t1.codomain, _canonical=True)


def inverse(t):
    dom = t.codomain
    cells = [(dc, s, s + (b - a), sc, a) for sc, a, b, dc, s in t.cells]
    cells.sort(key=lambda c: (dom.index(c[0]), c[1]))
    return Iet(dom, _merge(cells), t.domain, _canonical=True)


def power(t, n):
    if t.domain != t.codomain:
        raise IetError("powers need domain == codomain")
    if n < 0:
        t, n = inverse(t), -n
    result = identity(t.domain)
    base = t
    while n:
        if n & 1:
            result = compose(base, result)
        n >>= 1
        if n:
            base = compose(base, base)
    return result


def commutator(g, h):
    """``[g, h] = g h g^-1 h^-1``."""
    return compose(compose(g, h), compose(inverse(g), inverse(h)))


def apply(t, p):
    starts, cells = t.index()[p.c]
    i = bisect_right(starts, p.offset) - 1
    _, a, _, dc, s = cells[i]
    return Point(dc, s + (p.offset - a))


def _locate(t, p):
    starts, cells = t.index()[p.c]
    return bisect_right(starts, p.offset) - 1, cells


def _joins(codomain, left, right):
    """True when ``left`` ends exactly where ``right`` starts in the codomain."""
    if left[3] != right[3]:
        return False
    end = left[4] + (left[2] - left[1])
    if end == right[4]:
        return True
    return codomain.is_circle(left[3]) and not right[4] and end == codomain.length(left[3])


def disc_set(t):
    """Interior points where ``t`` is not continuous (sorted as in the domain)."""
    if t._disc is not None:
        return t._disc
    out = []
    idx = t.index()
    for comp in t.domain.components:
        _, cells = idx[comp.label]
        if comp.kind == CIRCLE:
            if not _joins(t.codomain, cells[-1], cells[0]):
                out.append(Point(comp.label, ZERO))
        for left, right in zip(cells, cells[1:]):
            if not _joins(t.codomain, left, right):
                out.append(Point(comp.label, right[1]))
    t._disc = tuple(out)
    return t._disc


def d(t):
    return len(disc_set(t))


def is_continuous_at(t, p):
    i, cells = _locate(t, p)
    cell = cells[i]
    if cell[1] != p.offset:
        return True
    if i > 0:
        return _joins(t.codomain, cells[i - 1], cell)
    if t.domain.is_circle(p.c):
        return _joins(t.codomain, cells[-1], cell)
    return True  # boundary point of an interval component


def norm_estimate(t, n_max):
    """``[(n, d(t^n)/n) for n = 1..n_max]`` and the last ratio as the estimate.

    Returns ``(series, estimate)``; entries whose power could not be formed
    because a comparison stayed undecided carry ``None``.
    """
    from .exact import UndecidedComparison

    if n_max < 1:
        raise ValueError("n_max must be at least 1")
    series = []
    cur = t
    for n in range(1, n_max + 1):
        if cur is None:
            series.append((n, None))
            continue
        series.append((n, Fraction(d(cur), n)))
        try:
            cur = compose(t, cur)
        except UndecidedComparison:
            cur = None
    last = next((r for _, r in reversed(series) if r is not None), None)
    return series, last


# --- subdomains under maps ----------------------------------------------


def image(t, sub):
    """``t(sub)`` as a Subdomain of the codomain."""
    idx = t.index()
    arcs = []
    for c, a, b in sub.arcs:
        starts, cells = idx[c]
        i = bisect_right(starts, a) - 1
        while i < len(cells):
            _, ca, cb, dc, s = cells[i]
            lo = a if a > ca else ca
            hi = b if b < cb else cb
            if lo < hi:
                arcs.append((dc, s + (lo - ca), s + (hi - ca)))
            if cb >= b:
                break
            i += 1
    return Subdomain.from_arcs(t.codomain, arcs)


def is_invariant(t, sub):
    return image(t, sub) == sub


def rechart(domain, pieces):
    """Reassemble ``domain`` into a new domain.

    ``pieces`` is a list of ``(label, kind, segments)``; the segments
    ``(component, start, end)`` are non-wrapping arcs laid end to end to form
    the new component.  Together they must tile ``domain``.  Returns the new
    domain and the interval exchange bijection ``domain -> new domain``.
    """
    comps = []
    cells = []
    for label, kind, segments in pieces:
        pos = ZERO
        for c, a, b in segments:
            a, b = as_real(a), as_real(b)
            cells.append((c, a, b, label, pos))
            pos = pos + (b - a)
        comps.append((label, kind, pos))
    new = Domain(comps)
    return new, Iet(domain, cells, new)


def conjugate(phi, g):
    """``phi o g o phi^-1`` for a bijection ``phi`` out of ``g``'s domain."""
    return compose(compose(phi, g), inverse(phi))


def cut_domain(domain, cuts):
    """Cut ``domain`` along ``cuts`` (Points).

    An interval ``[0, L)`` cut at ``c1 < ... < ck`` becomes pieces
    ``[0, c1), [c1, c2), ...``; a circle cut at ``c1 < ... < ck`` becomes the
    intervals ``[c1, c2), ..., [ck, c1 + L)``.  The first piece keeps the
    label, later ones get ``~1``, ``~2``, ... appended.  Returns
    ``(new_domain, phi)`` with ``phi`` the bijection ``domain -> new_domain``.
    """
    by = {}
    for p in cuts:
        domain.check_point(p)
        if domain.is_boundary(p):
            raise ValueError(f"cut point {p} lies on the boundary of the domain")
        by.setdefault(p.c, set()).add(p.offset)
    pieces = []
    for comp in domain.components:
        pts = sorted(by.get(comp.label, ()))
        L = comp.length
        if not pts:
            pieces.append((comp.label, comp.kind, [(comp.label, ZERO, L)]))
            continue
        if comp.kind == INTERVAL:
            bounds = [ZERO] + pts + [L]
            for k, (a, b) in enumerate(zip(bounds, bounds[1:])):
                lab = comp.label if k == 0 else f"{comp.label}~{k}"
                pieces.append((lab, INTERVAL, [(comp.label, a, b)]))
        else:
            for k, a in enumerate(pts):
                lab = comp.label if k == 0 else f"{comp.label}~{k}"
                if k + 1 < len(pts):
                    segs = [(comp.label, a, pts[k + 1])]
                else:
                    segs = [(comp.label, a, L)] if a else []
                    if pts[0]:
                        segs.append((comp.label, ZERO, pts[0]))
                pieces.append((lab, INTERVAL, segs))
    return rechart(domain, pieces)


def _subdomain_pieces(sub, prefix=""):
    """Rechart pieces covering ``sub`` (whole circles stay circles)."""
    dom = sub.domain
    pieces = []
    for comp in dom.components:
        ivs = list(sub.intervals(comp.label))
        if not ivs:
            continue
        if len(ivs) == 1 and not ivs[0][0] and ivs[0][1] == comp.length:
            pieces.append((prefix + comp.label, comp.kind, [(comp.label, ZERO, comp.length)]))
            continue
        segs_list = [[(comp.label, a, b)] for a, b in ivs]
        if comp.kind == CIRCLE and len(ivs) > 1 and not ivs[0][0] and ivs[-1][1] == comp.length:
            # an arc through 0 is a single interval starting at its left end
            segs_list = [segs_list[-1] + segs_list[0]] + segs_list[1:-1]
        for k, segs in enumerate(segs_list):
            lab = prefix + (comp.label if k == 0 else f"{comp.label}~{k}")
            pieces.append((lab, INTERVAL, segs))
    return pieces


def restrict(t, sub):
    """The restriction of ``t`` to an invariant subdomain, as an Iet on it.

    The subdomain becomes a domain: fully covered circles stay circles,
    every other maximal arc becomes an interval component.  Returns
    ``(restricted, chart)`` where ``chart`` maps points of ``sub`` (as
    points of the original domain) into the new domain via :func:`apply`.
    """
    if t.domain != t.codomain:
        raise IetError("restriction needs domain == codomain")
    if not is_invariant(t, sub):
        raise IetError("restriction to a non-invariant subdomain")
    new_dom, phi = subdomain_chart(sub)
    big = conjugate(phi, t)
    cells = tuple(c for c in big.cells if c[0] in new_dom)
    return Iet(new_dom, cells, _canonical=True), phi


def subdomain_chart(sub):
    """``(D_sub, phi)``: ``phi`` is a bijection from the whole domain onto
    ``D_sub`` plus auxiliary components for the complement."""
    inside = _subdomain_pieces(sub)
    outside = _subdomain_pieces(sub.complement(), prefix="\x00rest:")
    full, phi = rechart(sub.domain, inside + outside)
    new_dom = Domain([full.component(lab) for lab, _, _ in inside])
    return new_dom, phi


# --- finite extensions --------------------------------------------------


def induce_finite_extension(h_gens, table, decorations=None, q_generators=None):
    """Generators of ``H^Q x| Q`` acting on ``Q x D``.

    ``h_gens`` are Iets on a common domain ``D`` and ``table[i][j]`` is the
    product ``q_i q_j`` of the finite group ``Q = {0, ..., m-1}``.  A tuple
    ``(h_q)`` acts by ``(q, x) -> (q, h_q x)`` and ``q`` acts by left
    multiplication on the first coordinate.  The result lists, for each
    generator ``h`` and each ``q``, the tuple that is ``h`` at ``q`` and the
    identity elsewhere, followed by left multiplications by ``q_generators``
    (default: every non-identity element).  ``decorations`` optionally maps
    ``q`` to a list of Iets ``[f_0, ..., f_{m-1}]``: the extra generator
    ``(q', x) -> (q q', f_{q'} x)``.
    """
    from .finite import FiniteGroup

    Q = FiniteGroup(table)
    if not h_gens:
        raise ValueError("need at least one generator of H")
    D = h_gens[0].domain
    if any(h.domain != D or h.codomain != D for h in h_gens):
        raise IetError("generators of H must share one domain")
    dom, label_of = product_domain(range(Q.order), D)
    out = []
    for h in h_gens:
        for q in range(Q.order):
            out.append(_wreath_element(dom, label_of, Q, D, Q.identity, {q: h}))
    qs = [q for q in range(Q.order) if q != Q.identity] if q_generators is None else q_generators
    for q in qs:
        out.append(_wreath_element(dom, label_of, Q, D, q, {}))
    for q, fs in (decorations or {}).items():
        out.append(_wreath_element(dom, label_of, Q, D, q, dict(enumerate(fs))))
    return out


def _wreath_element(dom, label_of, Q, D, q, coords):
    cells = []
    for qq in range(Q.order):
        f = coords.get(qq)
        f = identity(D) if f is None else f
        tgt = Q.mul(q, qq)
        for sc, a, b, dc, s in f.cells:
            cells.append((label_of[(qq, sc)], a, b, label_of[(tgt, dc)], s))
    return Iet(dom, cells)

"""Phase spaces: finite unions of circles and half-open intervals.

A :class:`Domain` is an ordered list of components, each a circle or an
interval ``[0, length)``.  Points are ``(component label, offset)`` pairs and
a :class:`Subdomain` is a finite union of half-open arcs kept in a canonical
form (sorted, disjoint, non-wrapping, adjacent arcs merged), so equality of
subdomains is equality of arc lists.
"""

from __future__ import annotations

from bisect import bisect_right
from dataclasses import dataclass

from .exact import ZERO, ExactReal, as_real, floor_div

__all__ = ["CIRCLE", "INTERVAL", "Component", "Domain", "Point", "Subdomain"]

CIRCLE = "circle"
INTERVAL = "interval"


@dataclass(frozen=True)
class Component:
    label: str
    kind: str
    length: ExactReal

    @property
    def is_circle(self):
        return self.kind == CIRCLE


class Domain:
    """Disjoint union of oriented circles and intervals closed on the left."""

    __slots__ = ("components", "_index", "_hash")

    def __init__(self, components):
        comps = []
        for c in components:
            if isinstance(c, Component):
                comps.append(c)
            else:
                label, kind, length = c
                comps.append(Component(str(label), kind, as_real(length)))
        if not comps:
            raise ValueError("a domain needs at least one component")
        index = {}
        for i, c in enumerate(comps):
            if c.kind not in (CIRCLE, INTERVAL):
                raise ValueError(f"unknown component kind {c.kind!r}")
            if c.label in index:
                raise ValueError(f"duplicate component label {c.label!r}")
            if c.length.sign() <= 0:
                raise ValueError(f"component {c.label!r} must have positive length")
            index[c.label] = i
        self.components = tuple(comps)
        self._index = index
        self._hash = hash(self.components)

    @classmethod
    def circles(cls, labels, length=1):
        return cls([(lab, CIRCLE, length) for lab in labels])

    @classmethod
    def interval(cls, length=1, label="I"):
        return cls([(label, INTERVAL, length)])

    def __repr__(self):
        inner = ", ".join(f"{c.label}:{c.kind}[{c.length}]" for c in self.components)
        return f"Domain({inner})"

    def __eq__(self, other):
        return self is other or (isinstance(other, Domain) and self.components == other.components)

    def __hash__(self):
        return self._hash

    def __iter__(self):
        return iter(self.components)

    def __len__(self):
        return len(self.components)

    def __contains__(self, label):
        return label in self._index

    @property
    def labels(self):
        return tuple(c.label for c in self.components)

    def index(self, label):
        return self._index[label]

    def component(self, label):
        return self.components[self._index[label]]

    def length(self, label):
        return self.components[self._index[label]].length

    def is_circle(self, label):
        return self.components[self._index[label]].kind == CIRCLE

    def measure(self):
        total = ZERO
        for c in self.components:
            total = total + c.length
        return total

    def point(self, label, offset):
        p = Point(label, as_real(offset))
        self.check_point(p)
        return p

    def check_point(self, p):
        if p.c not in self._index:
            raise KeyError(f"unknown component {p.c!r}")
        if p.offset.sign() < 0 or p.offset >= self.length(p.c):
            raise ValueError(f"offset {p.offset} outside component {p.c!r}")

    def is_boundary(self, p):
        """True for left endpoints of interval components (the boundary of the domain)."""
        return not self.is_circle(p.c) and not p.offset

    def wrap(self, label, offset):
        """Reduce ``offset`` modulo the length of circle ``label``."""
        L = self.length(label)
        n = floor_div(offset, L)
        return offset - L * n if n else offset

    def to_json(self):
        return {"components": [{"label": c.label, "kind": c.kind, "length": c.length.to_json()}
                               for c in self.components]}


@dataclass(frozen=True, order=False)
class Point:
    c: str
    offset: ExactReal

    def __repr__(self):
        return f"Point({self.c}, {self.offset})"

    def to_json(self, decimal=False):
        return {"c": self.c, "offset": self.offset.to_json(decimal)}


# --- interval-list helpers (sorted lists of disjoint (start, end) pairs) ----


def _normalize(intervals):
    """Sort and merge overlapping or touching half-open intervals; drop empties."""
    items = [(a, b) for a, b in intervals if a < b]
    if not items:
        return []
    items.sort(key=lambda ab: ab[0])
    out = [items[0]]
    for a, b in items[1:]:
        pa, pb = out[-1]
        if a <= pb:
            if b > pb:
                out[-1] = (pa, b)
        else:
            out.append((a, b))
    return out


def _intersect(xs, ys):
    out = []
    i = j = 0
    while i < len(xs) and j < len(ys):
        a = xs[i][0] if xs[i][0] >= ys[j][0] else ys[j][0]
        b = xs[i][1] if xs[i][1] <= ys[j][1] else ys[j][1]
        if a < b:
            out.append((a, b))
        if xs[i][1] <= ys[j][1]:
            i += 1
        else:
            j += 1
    return out


def _difference(xs, ys):
    out = []
    j = 0
    for a, b in xs:
        cur = a
        while j < len(ys) and ys[j][1] <= cur:
            j += 1
        k = j
        while k < len(ys) and ys[k][0] < b:
            ya, yb = ys[k]
            if ya > cur:
                out.append((cur, ya))
            if yb > cur:
                cur = yb
            if cur >= b:
                break
            k += 1
        if cur < b:
            out.append((cur, b))
    return out


class Subdomain:
    """Finite union of half-open arcs ``[start, end)`` of a domain, canonical form."""

    __slots__ = ("domain", "arcs", "_by_comp", "_hash")

    def __init__(self, domain, by_comp):
        # by_comp: label -> normalized list of (start, end); use the factories
        self.domain = domain
        self._by_comp = {lab: tuple(iv) for lab, iv in by_comp.items() if iv}
        arcs = []
        for c in domain.components:
            for a, b in self._by_comp.get(c.label, ()):
                arcs.append((c.label, a, b))
        self.arcs = tuple(arcs)
        self._hash = None

    # -- factories -------------------------------------------------------

    @classmethod
    def from_arcs(cls, domain, arcs):
        """Union of arcs ``(component, start, end)``.

        On circles an arc may wrap: ``end <= start`` or ``end - start`` larger
        than the remaining length both go around through 0.  An arc of length
        at least the circumference is the whole circle.
        """
        raw = {}
        for c, a, b in arcs:
            a, b = as_real(a), as_real(b)
            L = domain.length(c)
            if domain.is_circle(c):
                length = b - a
                if length.sign() <= 0:
                    length = length + L
                    if length.sign() <= 0:
                        continue
                if length >= L:
                    raw.setdefault(c, []).append((ZERO, L))
                    continue
                a0 = domain.wrap(c, a)
                end = a0 + length
                if end > L:
                    raw.setdefault(c, []).extend([(a0, L), (ZERO, end - L)])
                else:
                    raw.setdefault(c, []).append((a0, end))
            else:
                if a.sign() < 0 or b > L:
                    raise ValueError(f"arc [{a}, {b}) leaves interval component {c!r}")
                raw.setdefault(c, []).append((a, b))
        return cls(domain, {c: _normalize(iv) for c, iv in raw.items()})

    @classmethod
    def empty(cls, domain):
        return cls(domain, {})

    @classmethod
    def whole(cls, domain, labels=None):
        labels = domain.labels if labels is None else labels
        return cls(domain, {c: [(ZERO, domain.length(c))] for c in labels})

    # -- protocol --------------------------------------------------------

    def __repr__(self):
        inner = ", ".join(f"{c}:[{a}, {b})" for c, a, b in self.arcs)
        return f"Subdomain({inner})"

    def __eq__(self, other):
        return isinstance(other, Subdomain) and self.domain == other.domain and self.arcs == other.arcs

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(self.arcs)
        return self._hash

    def __bool__(self):
        return bool(self.arcs)

    def __iter__(self):
        return iter(self.arcs)

    def intervals(self, label):
        return self._by_comp.get(label, ())

    @property
    def labels(self):
        return tuple(c for c in self.domain.labels if c in self._by_comp)

    def measure(self):
        total = ZERO
        for _, a, b in self.arcs:
            total = total + (b - a)
        return total

    def __contains__(self, p):
        ivs = self._by_comp.get(p.c)
        if not ivs:
            return False
        i = bisect_right([a for a, _ in ivs], p.offset) - 1
        return i >= 0 and p.offset < ivs[i][1]

    # -- set algebra -----------------------------------------------------

    def _check(self, other):
        if self.domain != other.domain:
            raise ValueError("subdomains live in different domains")

    def __or__(self, other):
        self._check(other)
        out = {}
        for c in self.domain.labels:
            merged = list(self.intervals(c)) + list(other.intervals(c))
            if merged:
                out[c] = _normalize(merged)
        return Subdomain(self.domain, out)

    def __and__(self, other):
        self._check(other)
        out = {}
        for c in self.domain.labels:
            xs, ys = self.intervals(c), other.intervals(c)
            if xs and ys:
                out[c] = _intersect(xs, ys)
        return Subdomain(self.domain, out)

    def __sub__(self, other):
        self._check(other)
        out = {}
        for c in self.domain.labels:
            xs = self.intervals(c)
            if xs:
                out[c] = _difference(xs, other.intervals(c))
        return Subdomain(self.domain, out)

    def __xor__(self, other):
        return (self - other) | (other - self)

    def complement(self):
        return Subdomain.whole(self.domain) - self

    def issubset(self, other):
        return not (self - other)

    def isdisjoint(self, other):
        return not (self & other)

    def to_json(self, decimal=False):
        return {"arcs": [{"c": c, "start": a.to_json(decimal), "end": b.to_json(decimal)}
                         for c, a, b in self.arcs]}

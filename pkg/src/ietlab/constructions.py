"""Explicit groups: lamplighters A wr Z^k, lamplighter-like groups and H_J.

Conventions.  The base circle is called ``"C"``.  A finite abelian group
``A = Z/m_1 + ... + Z/m_r`` is indexed by tuples, so the product domain
``A x C`` has components ``"a_1,...,a_r/C"``.  For ``H_J`` the domain is
``D' = Z/2 x Z/3 x C`` with components ``"b/a/C"`` and ``J`` lives on the
circle ``"0/C"`` of ``D = Z/3 x C``.

A lamplighter element is a pair ``(lamp, shift)`` multiplied by
``(f, s)(f', s') = (f + f'(. - s), s + s')``; it is realized as
``S_f R^s`` where ``S_f`` lights lamp ``f(v)`` on the arc ``J + v.theta``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product as _product

from .domain import Domain, Subdomain
from .exact import ONE, ZERO, as_real, in_q_span, mod_interval
from .finite import FiniteGroup
from .groups import FinGenGroup
from .iet import (IetError, commutator, compose, fibered, identity, image, inverse,
                  power, product_domain, synchronized_rotation)

__all__ = [
    "LampSpec",
    "WreathNormalForm",
    "Lamplighter",
    "build_lamplighter",
    "verify_wreath_embedding",
    "build_ll_like",
    "HjGroup",
    "HjElement",
    "build_hj",
    "hj_normal_form",
    "hj_multiply",
    "commutation_set",
    "difference_set_measure",
    "distinguish_invariant",
    "wreath_obstruction_witness",
    "arc",
]

HALF = Fraction(1, 2)
BASE = Domain.circles(["C"])


def arc(start, end, label="C", domain=None):
    """A single arc ``[start, end)`` of a circle as a Subdomain."""
    dom = BASE if domain is None else domain
    return Subdomain.from_arcs(dom, [(label, start, end)])


def _shift_arcs(arcs, t):
    return [(c, a + t, b + t) for c, a, b in arcs]


# --- lamplighters ---------------------------------------------------------


@dataclass
class LampSpec:
    orders: tuple = (3,)
    angles: tuple = ()
    J: Subdomain = None
    allow_dependent: bool = False

    def __post_init__(self):
        self.orders = tuple(int(m) for m in self.orders)
        if not self.orders or any(m < 2 for m in self.orders):
            raise ValueError("cyclic factor orders must be at least 2")
        self.angles = tuple(as_real(a) for a in self.angles)
        if not self.angles:
            raise ValueError("need at least one rotation angle")
        if self.J is None:
            self.J = arc(0, HALF)
        if self.J.domain != BASE:
            raise ValueError("J must be a subdomain of the base circle 'C'")

    @property
    def k(self):
        return len(self.angles)

    def fibers(self):
        return list(_product(*(range(m) for m in self.orders)))

    def independence_problem(self):
        """None when ``1, angles`` look rationally independent, else a message."""
        for i, a in enumerate(self.angles):
            if a.is_rational:
                return f"angle {i} is rational"
            if in_q_span(a, [ONE, *self.angles[:i]]) is not None:
                return f"angle {i} lies in the rational span of 1 and the previous angles"
        return None


@dataclass(frozen=True)
class WreathNormalForm:
    lamp: tuple = ()        # sorted ((position in Z^k), (value in A)) with value != 0
    shift: tuple = ()

    @classmethod
    def make(cls, lamp, shift, orders):
        clean = {}
        for pos, val in dict(lamp).items():
            val = tuple(v % m for v, m in zip(val, orders))
            if any(val):
                clean[tuple(pos)] = val
        return cls(tuple(sorted(clean.items())), tuple(shift))

    @property
    def is_trivial(self):
        return not self.lamp and not any(self.shift)

    def to_json(self):
        return {"lamp": [{"position": list(p), "value": list(v)} for p, v in self.lamp],
                "shift": list(self.shift)}


def wreath_multiply(x, y, orders):
    lamp = dict(x.lamp)
    for pos, val in y.lamp:
        p = tuple(a + b for a, b in zip(pos, x.shift))
        old = lamp.get(p, (0,) * len(orders))
        lamp[p] = tuple(u + v for u, v in zip(old, val))
    shift = tuple(a + b for a, b in zip(x.shift, y.shift))
    return WreathNormalForm.make(lamp, shift, orders)


class Lamplighter:
    """Realization of ``A wr Z^k`` on ``A x C``; see :func:`build_lamplighter`."""

    def __init__(self, spec):
        self.spec = spec
        self.fibers = spec.fibers()
        self.domain, self.label_of = product_domain(self.fibers, BASE)
        gens = {}
        r = len(spec.orders)
        for i in range(r):
            e = tuple(int(j == i) for j in range(r))
            gens["sigma" if r == 1 else f"sigma{i}"] = self.lamp(e, spec.J)
        for j, a in enumerate(spec.angles):
            gens["R" if spec.k == 1 else f"R{j}"] = synchronized_rotation(self.domain, a)
        self.group = FinGenGroup(gens)
        self.abstract = {}
        zero = (0,) * spec.k
        for i in range(r):
            e = tuple(int(j == i) for j in range(r))
            name = "sigma" if r == 1 else f"sigma{i}"
            self.abstract[name] = WreathNormalForm.make({zero: e}, zero, spec.orders)
            self.abstract[name + "^-1"] = WreathNormalForm.make(
                {zero: tuple(-v for v in e)}, zero, spec.orders)
        for j in range(spec.k):
            e = tuple(int(i == j) for i in range(spec.k))
            name = "R" if spec.k == 1 else f"R{j}"
            self.abstract[name] = WreathNormalForm((), e)
            self.abstract[name + "^-1"] = WreathNormalForm((), tuple(-v for v in e))
        self.abstract = {n: self.abstract[n] for n in self.group.generators if n in self.abstract}

    def lamp(self, value, support):
        """``sigma_{value, support}``: add ``value`` in the fiber over ``support``."""
        orders = self.spec.orders
        perm = {f: tuple((x + v) % m for x, v, m in zip(f, value, orders)) for f in self.fibers}
        return fibered(self.fibers, BASE, steps=[(support, perm)],
                       domain=self.domain, label_of=self.label_of)

    def translate(self, pos):
        t = ZERO
        for n, a in zip(pos, self.spec.angles):
            t = t + a * n
        return t

    def __call__(self, nf):
        """Realize a normal form as ``prod sigma_{a_v, J + v.theta} o R^shift``."""
        out = identity(self.domain)
        J = self.spec.J
        for pos, val in nf.lamp:
            support = Subdomain.from_arcs(BASE, _shift_arcs(J.arcs, self.translate(pos)))
            out = compose(out, self.lamp(val, support))
        if any(nf.shift):
            out = compose(out, synchronized_rotation(self.domain, self.translate(nf.shift)))
        return out

    def multiply(self, x, y):
        return wreath_multiply(x, y, self.spec.orders)

    @property
    def identity_form(self):
        return WreathNormalForm((), (0,) * self.spec.k)


def build_lamplighter(spec):
    """Generators of ``A wr Z^k`` in IET(A x C) and the normal-form evaluator.

    Returns ``(group, evaluator)``; ``evaluator`` is a :class:`Lamplighter`
    (callable on :class:`WreathNormalForm`).  Rationally dependent angles are
    refused unless ``spec.allow_dependent`` is set.
    """
    problem = spec.independence_problem()
    if problem and not spec.allow_dependent:
        raise ValueError(f"angles not independent: {problem}")
    ll = Lamplighter(spec)
    return ll.group, ll


@dataclass
class EmbeddingReport:
    ok: bool
    depth: int
    checked: int
    sizes: list = field(default_factory=list)
    witness: tuple = None           # word realizing a nontrivial element as the identity
    witness_form: WreathNormalForm = None
    complete: bool = True

    def to_json(self):
        return {"verdict": "OK" if self.ok else "WITNESS", "depth": self.depth,
                "checked": self.checked, "ball_sizes": self.sizes, "complete": self.complete,
                "witness_word": list(self.witness) if self.witness else None,
                "witness_form": self.witness_form.to_json() if self.witness_form else None}


def verify_wreath_embedding(spec, depth, max_elements=None, check_evaluator=True):
    """Walk the depth-ball of ``A wr Z^k`` and compare with the realized Iets.

    Each abstract element is realized along its BFS word; it must be the
    identity exactly when the normal form is trivial, and distinct normal
    forms must give distinct Iets (a collision ``g = h`` yields the witness
    word ``g^-1 h``).  With ``check_evaluator`` the realized element is also
    compared with the evaluator's product formula.
    """
    if depth < 1:
        raise ValueError("depth must be at least 1")
    group, ll = build_lamplighter(spec)
    gens = group.generators
    abstract = ll.abstract
    e = ll.identity_form
    words = {e: ()}
    realized = {identity(ll.domain): e}
    frontier = [(e, identity(ll.domain))]
    sizes = [1]
    checked = 1
    inv_name = {}
    for name in gens:
        inv_name[name] = name[:-3] if name.endswith("^-1") else name + "^-1"
    for _ in range(depth):
        nxt = []
        for nf, g in frontier:
            for name, s in gens.items():
                nf2 = ll.multiply(nf, abstract[name])
                if nf2 in words:
                    continue
                w = words[nf] + (name,)
                words[nf2] = w
                g2 = compose(g, s)
                checked += 1
                if check_evaluator and ll(nf2) != g2:
                    raise AssertionError(f"evaluator disagrees with the word {w}")
                other = realized.get(g2)
                if other is not None:
                    wit = tuple(inv_name[n] for n in reversed(words[other])) + w
                    form = ll.multiply(_inverse_form(other, spec.orders), nf2)
                    return EmbeddingReport(False, depth, checked, sizes + [len(words)], wit, form)
                realized[g2] = nf2
                nxt.append((nf2, g2))
                if max_elements is not None and len(words) >= max_elements:
                    return EmbeddingReport(True, depth, checked, sizes + [len(words)],
                                           complete=False)
        sizes.append(len(words))
        frontier = nxt
    return EmbeddingReport(True, depth, checked, sizes)


def _inverse_form(x, orders):
    shift = tuple(-s for s in x.shift)
    lamp = {}
    for pos, val in x.lamp:
        lamp[tuple(p + s for p, s in zip(pos, shift))] = tuple(-v for v in val)
    return WreathNormalForm.make(lamp, shift, orders)


def build_ll_like(G, orders, J, all_values=True):
    """``F_J x| G`` on ``A x D``: diagonal lifts of G's generators plus the lamps on ``A x J``.

    ``orders`` describes ``A``.  With ``all_values`` one lamp ``sigma_b`` is
    added per nonzero ``b`` in ``A``, otherwise only for the basis vectors.
    """
    if not isinstance(G, FinGenGroup):
        G = FinGenGroup(G)
    D = G.domain
    if J.domain != D:
        raise ValueError("J must be a subdomain of the group's domain")
    orders = tuple(int(m) for m in orders)
    fibers = list(_product(*(range(m) for m in orders)))
    dom, label_of = product_domain(fibers, D)
    gens = {}
    for name, g in G.named.items():
        gens[name] = fibered(fibers, D, base_map=g, domain=dom, label_of=label_of)
    if all_values:
        values = [f for f in fibers if any(f)]
    else:
        values = [tuple(int(j == i) for j in range(len(orders))) for i in range(len(orders))]
    for b in values:
        perm = {f: tuple((x + v) % m for x, v, m in zip(f, b, orders)) for f in fibers}
        name = "sigma[" + ",".join(map(str, b)) + "]"
        gens[name] = fibered(fibers, D, steps=[(J, perm)], domain=dom, label_of=label_of)
    return FinGenGroup(gens, allow_trivial=True)


# --- H_J --------------------------------------------------------------------


@dataclass(frozen=True)
class HjElement:
    n: int
    f: tuple                # sorted ((i, value in Z/3)) with value != 0
    tau: Subdomain          # subdomain of D = Z/3 x C where the Z/2 part is 1

    def to_json(self, decimal=True):
        return {"n": self.n, "f": [{"index": i, "value": v} for i, v in self.f],
                "tau": self.tau.to_json(decimal)}


class HjGroup:
    """``H_J = <sigma, R, tau_J>`` on ``Z/2 x Z/3 x C`` with its evaluator."""

    def __init__(self, J, alpha):
        self.alpha = as_real(alpha)
        self.lamplighter = Lamplighter(LampSpec((3,), (self.alpha,), arc(0, HALF),
                                                allow_dependent=True))
        ll = self.lamplighter
        self.base = ll.domain                                   # D = Z/3 x C
        self.fibers = [(0,), (1,)]
        self.domain, self.label_of = product_domain(self.fibers, self.base)
        if isinstance(J, Subdomain) and J.domain == BASE:
            J = Subdomain.from_arcs(self.base, [("0/C", a, b) for _, a, b in J.arcs])
        if J.domain != self.base:
            raise ValueError("J must be a subdomain of Z/3 x C")
        if any(c != "0/C" for c in J.labels):
            raise ValueError("J must lie on the circle {0} x C")
        self.J = J
        self.I = arc(0, HALF)
        self.sigma_G = ll.group.generators["sigma"]
        self.R_G = ll.group.generators["R"]
        self.sigma = self.lift(self.sigma_G)
        self.R = self.lift(self.R_G)
        self.tau_J = self.tau(J)
        self.group = FinGenGroup({"sigma": self.sigma, "R": self.R, "tau": self.tau_J})

    def lift(self, g):
        return fibered(self.fibers, self.base, base_map=g, domain=self.domain,
                       label_of=self.label_of)

    def tau(self, K):
        """``tau_K = b 1_K``: flip the Z/2 coordinate over ``K``."""
        if K.domain == BASE:
            K = Subdomain.from_arcs(self.base, [("0/C", a, b) for _, a, b in K.arcs])
        return fibered(self.fibers, self.base, steps=[(K, {(0,): (1,), (1,): (0,)})],
                       domain=self.domain, label_of=self.label_of)

    def lamp_arc(self, i):
        return Subdomain.from_arcs(BASE, _shift_arcs(self.I.arcs, self.alpha * i))

    def S(self, f):
        """``S_f`` on ``D`` for ``f = {i: value}``."""
        nf = WreathNormalForm.make({(i,): (v,) for i, v in dict(f).items()}, (0,), (3,))
        return self.lamplighter(nf)

    def g_part(self, n, f):
        """``R^n S_f`` on ``D``."""
        return compose(power(self.R_G, n), self.S(f))

    def __call__(self, el):
        """Realize ``R^n S_f tau`` on ``D'``."""
        return compose(self.lift(self.g_part(el.n, el.f)), self.tau(el.tau))

    def element(self, n=0, f=(), tau=None):
        f = tuple(sorted((int(i), int(v) % 3) for i, v in dict(f).items() if int(v) % 3))
        tau = Subdomain.empty(self.base) if tau is None else tau
        return HjElement(int(n), f, tau)


def build_hj(J, alpha):
    """``H_J`` with generators ``sigma``, ``R``, ``tau`` (and inverses)."""
    hj = HjGroup(J, alpha)
    return hj.group, hj


def _integer_coeffs(t, alpha):
    q = in_q_span(t, [ONE, alpha])
    if q is None or any(c.denominator != 1 for c in q):
        return None
    return int(q[0]), int(q[1])


def hj_normal_form(hj, h):
    """Decompose ``h`` as ``R^n S_f tau``; raise IetError if that is impossible."""
    if h.domain != hj.domain or h.codomain != hj.domain:
        raise IetError("element does not act on Z/2 x Z/3 x C")
    n = None
    for sc, a, _, dc, s in h.cells:
        got = _integer_coeffs(s - a, hj.alpha)
        if got is None or (n is not None and got[1] != n):
            raise IetError("base translation is not a single power of R")
        n = got[1]
    # F(x): change of the Z/3 coordinate, read on the fiber (b, a) = (0, 0)
    jumps = {}
    vals = []
    for sc, a, b, dc, s in h.cells:
        if sc == "0/0/C":
            vals.append((a, b, int(dc.split("/")[1])))
    for (a0, _, v0), (a1, _, v1) in zip([vals[-1]] + vals[:-1], vals):
        if v0 != v1:
            jumps[a1] = (v1 - v0) % 3
    f = {}
    for p, jump in jumps.items():
        got = _integer_coeffs(p, hj.alpha)
        if got is not None:
            f[got[1]] = jump
            continue
        if _integer_coeffs(p - HALF, hj.alpha) is None:
            raise IetError(f"lamp function jumps at {p}, off the orbit of the lamp endpoints")
    # T: where the Z/2 coordinate flips
    arcs = []
    for sc, a, b, dc, s in h.cells:
        bb, aa, _ = sc.split("/")
        if bb == "0" and dc.split("/")[0] == "1":
            arcs.append((f"{aa}/C", a, b))
    el = hj.element(n, f, Subdomain.from_arcs(hj.base, arcs))
    if hj(el) != h:
        raise IetError("element is not of the form R^n S_f tau")
    return el


def hj_multiply(hj, x, y):
    """Product in ``F_J x| G`` computed from the normal forms alone."""
    f = {}
    for i, v in x.f:
        f[i - y.n] = (f.get(i - y.n, 0) + v) % 3
    for i, v in y.f:
        f[i] = (f.get(i, 0) + v) % 3
    g2_inv = inverse(hj.g_part(y.n, y.f))
    tau = image(g2_inv, x.tau) ^ y.tau
    return hj.element(x.n + y.n, f, tau)


# --- commutation sets and difference sets ----------------------------------


def _circle_arcs(sub):
    """Arcs of a subdomain of a single circle, as ``(start, end)`` pairs."""
    labels = set(sub.labels)
    if len(labels) > 1:
        raise ValueError("subdomain must lie on one circle")
    return [(a, b) for _, a, b in sub.arcs]


def _in_open_arc(t, lo, length):
    """Whether ``t`` (mod 1) lies in the open arc ``(lo, lo + length)``."""
    if length >= 1:
        return mod_interval(t - lo, ONE) != ZERO
    u = mod_interval(t - lo, ONE)
    return ZERO < u < length


def overlap_predicate(t, K, I):
    """``(K + t) n I`` nonempty, i.e. ``t`` in the open difference set ``I - K``."""
    for ka, kb in _circle_arcs(K):
        for ia, ib in _circle_arcs(I):
            if _in_open_arc(t, ia - kb, (ib - ia) + (kb - ka)):
                return True
    return False


@dataclass
class CommutationResult:
    N: int
    iet: list                # n with [sigma, R^n tau_J R^-n] != 1
    predicate: list          # n with n.alpha in I - J
    mismatches: list

    @property
    def frequency(self):
        return Fraction(len(self.iet), self.N)

    @property
    def agree(self):
        return not self.mismatches

    def rows(self):
        iet, pred = set(self.iet), set(self.predicate)
        return [(n, int(n in iet), int(n in pred)) for n in range(self.N)]


def commutation_set(hj, N, paths=("iet", "predicate")):
    """``{0 <= n < N : [sigma, R^n tau_J R^-n] != 1}`` by IET algebra and by arithmetic.

    The commutator path conjugates ``tau_J`` by ``R`` once per step and tests
    the commutator's canonical form; the arithmetic path tests
    ``n.alpha in I - J``.
    """
    if N < 1:
        raise ValueError("N must be at least 1")
    iet_set, pred_set = [], []
    J0 = Subdomain.from_arcs(BASE, [("C", a, b) for _, a, b in hj.J.arcs])
    if "iet" in paths:
        sigma, R, R_inv = hj.sigma, hj.R, inverse(hj.R)
        sigma_inv = inverse(sigma)
        c = hj.tau_J
        for n in range(N):
            # [sigma, c] with c an involution
            if not compose(compose(sigma, c), compose(sigma_inv, c)).is_identity:
                iet_set.append(n)
            c = compose(compose(R, c), R_inv)
    if "predicate" in paths:
        t = ZERO
        for n in range(N):
            if overlap_predicate(t, J0, hj.I):
                pred_set.append(n)
            t = mod_interval(t + hj.alpha, ONE)
    if "iet" in paths and "predicate" in paths:
        mism = sorted(set(iet_set) ^ set(pred_set))
    else:
        mism = []
        if "iet" not in paths:
            iet_set = pred_set
    return CommutationResult(N, iet_set, pred_set, mism)


def difference_set_measure(J, I):
    """Exact measure of ``J - I = {j - i mod 1}`` for subdomains of one circle."""
    J_arcs, I_arcs = _circle_arcs(J), _circle_arcs(I)
    if not J_arcs or not I_arcs:
        return ZERO
    arcs = []
    for ja, jb in J_arcs:
        for ia, ib in I_arcs:
            lo = ja - ib
            length = (jb - ja) + (ib - ia)
            if length >= 1:
                return ONE
            arcs.append(("C", lo, lo + length))
    return Subdomain.from_arcs(BASE, arcs).measure()


def _on_base(J):
    if J.domain == BASE:
        return J
    return Subdomain.from_arcs(BASE, [("C", a, b) for _, a, b in J.arcs])


def distinguish_invariant(J1, J2, alpha, N=0, hj_paths=("predicate",)):
    """Evidence for ``H_J1`` and ``H_J2`` being non-isomorphic.

    Reports ``|J_i| + 1/2`` (and the commutation frequency over ``N`` steps
    when ``N > 0``) and whether ``|J1|`` lies in the rational span of
    ``1, alpha, a2, b2``.  A negative span answer is consistent with
    non-isomorphism; a positive one proves nothing.
    """
    J1, J2 = _on_base(J1), _on_base(J2)
    alpha = as_real(alpha)
    I = arc(0, HALF)
    if len(J2.arcs) != 1:
        raise ValueError("J2 must be a single arc")
    _, a2, b2 = J2.arcs[0]
    out = {"precondition_ok": True, "notes": [], "sets": []}
    for name, J in (("J1", J1), ("J2", J2)):
        m = J.measure()
        if not m < HALF:
            out["precondition_ok"] = False
            out["notes"].append(f"|{name}| is not below 1/2")
        entry = {"name": name, "measure": m, "candidate": m + HALF,
                 "difference_measure": difference_set_measure(J, I)}
        if N:
            res = commutation_set(HjGroup(J, alpha), N, hj_paths)
            entry["frequency"] = res.frequency
        out["sets"].append(entry)
    q = in_q_span(J1.measure(), [ONE, alpha, a2, b2])
    out["span_coefficients"] = q
    out["in_span"] = q is not None
    out["verdict"] = "CONSISTENT_WITH_NONISOMORPHIC" if q is None else "NO_CONCLUSION"
    return out


# --- non-abelian lamps -------------------------------------------------------


def wreath_obstruction_witness(F, angle, I, depth):
    """Search for a failed wreath relation in the naive ``F wr Z`` construction.

    ``F`` is a :class:`FiniteGroup` with a permutation action on its fibers
    (or a list of generating permutations).  Lamps ``g`` act on the fibers
    over ``I`` and ``R`` rotates every circle by ``angle``.  For
    ``1 <= n <= depth`` the lamps ``R^n g R^-n`` and ``h`` should commute in
    the wreath product; the first pair that does not is returned.
    """
    if not isinstance(F, FiniteGroup):
        F = FiniteGroup.from_permutations(F)
    if F.action is None:
        raise ValueError("F needs a permutation action")
    I = _on_base(I) if isinstance(I, Subdomain) else arc(0, I)
    m = len(F.action[0])
    fibers = list(range(m))
    dom, label_of = product_domain(fibers, BASE)
    lamps = {}
    for g in range(F.order):
        if g == F.identity:
            continue
        perm = {p: F.action[g][p] for p in fibers}
        lamps[g] = fibered(fibers, BASE, steps=[(I, perm)], domain=dom, label_of=label_of)
    R = synchronized_rotation(dom, angle)
    R_inv = inverse(R)
    Rb = synchronized_rotation(BASE, angle)
    diagnostics = []
    shifted = dict(lamps)
    In = I
    for n in range(1, depth + 1):
        shifted = {g: compose(compose(R, c), R_inv) for g, c in shifted.items()}
        In = image(Rb, In)
        overlap = (In & I).measure()
        bad = [(g, h) for g in lamps for h in lamps
               if not commutator(shifted[g], lamps[h]).is_identity]
        diagnostics.append({"n": n, "overlap": overlap, "noncommuting_pairs": len(bad)})
        if bad:
            g, h = bad[0]
            return {"verdict": "WITNESS", "n": n, "g": g, "h": h,
                    "g_perm": list(F.action[g]), "h_perm": list(F.action[h]),
                    "diagnostics": diagnostics}
    return {"verdict": "NONE", "n": None, "diagnostics": diagnostics}

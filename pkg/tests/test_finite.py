from fractions import Fraction
from itertools import product

import pytest

from conftest import ALPHA, HALF
from oracles import perm_compose, product_orbit_size, s3
from ietlab.constructions import BASE, LampSpec, Lamplighter, arc
from ietlab.domain import Point, Subdomain
from ietlab.exact import ExactReal
from ietlab.finite import (FiniteGroup, NotASubgroup, as_subgroup, nonabelian_quotient_locus,
                           nonnormal_locus, permutation_lamps, product_orbit_bound,
                           stab_partition)
from ietlab.iet import apply, compose, fibered, identity, product_domain

I = arc(0, HALF)


def s3_lamps(support=I):
    return permutation_lamps(FiniteGroup.symmetric(3), BASE, support)


def s3_copies(n, support=I):
    """``n`` commuting copies of S3, copy ``i`` permuting coordinate ``i`` over ``support``."""
    fibers = list(product(range(3), repeat=n))
    dom, label_of = product_domain(fibers, BASE)
    factors = []
    for i in range(n):
        els = []
        for p in s3():
            perm = {f: f[:i] + (p[f[i]],) + f[i + 1:] for f in fibers}
            els.append(fibered(fibers, BASE, steps=[(support, perm)], domain=dom, label_of=label_of))
        factors.append(els)
    return dom, label_of, factors


def test_finite_group_tables():
    S = FiniteGroup.symmetric(3)
    assert S.order == 6 and not S.is_abelian
    assert sorted(S.action) == sorted(s3())
    for a in range(6):
        for b in range(6):
            assert S.action[S.mul(a, b)] == perm_compose(S.action[a], S.action[b])
    assert FiniteGroup.cyclic(4).is_abelian
    with pytest.raises(ValueError):
        FiniteGroup([[0, 1], [1]])


def test_as_subgroup_rejects_non_groups():
    lamps = s3_lamps()
    with pytest.raises(NotASubgroup):
        as_subgroup(lamps[:3])
    with pytest.raises(NotASubgroup):
        as_subgroup([])
    els, grp = as_subgroup(lamps)
    assert grp.order == 6


def test_stab_partition_trivial_group():
    e = identity(BASE)
    (sub, stab), = stab_partition([e])
    assert sub == Subdomain.whole(BASE) and stab == (0,)


def test_stab_partition_cyclic_lamp():
    ll = Lamplighter(LampSpec((3,), (ALPHA,)))
    s = ll.group.generators["sigma"]
    els = [identity(ll.domain), s, compose(s, s)]
    parts = dict((stab, sub) for sub, stab in stab_partition(els))
    AJ = Subdomain.from_arcs(ll.domain, [(f"{i}/C", 0, HALF) for i in range(3)])
    assert parts == {(0,): AJ, (0, 1, 2): AJ.complement()}


def test_stab_partition_s3_and_constancy():
    lamps = s3_lamps()
    pieces = stab_partition(lamps)
    S = FiniteGroup.symmetric(3)
    on_c1 = [stab for sub, stab in pieces if Point("1/C", ExactReal(Fraction(1, 4))) in sub]
    assert len(on_c1) == 1 and len(on_c1[0]) == 2
    (g,) = [i for i in on_c1[0] if S.action[i] != (0, 1, 2)]
    assert S.action[g] == (2, 1, 0)
    # stabilizer constant on each piece: re-check at start, midpoint and just inside the end
    for sub, stab in pieces:
        for c, a, b in sub.arcs:
            for x in (a, (a + b) / 2, b - (b - a) / 1000):
                p = Point(c, x)
                assert tuple(i for i, e in enumerate(lamps) if apply(e, p) == p) == stab


def test_loci_abelian_empty():
    ll = Lamplighter(LampSpec((3,), (ALPHA,)))
    s = ll.group.generators["sigma"]
    els = [identity(ll.domain), s, compose(s, s)]
    assert not nonnormal_locus(els)
    assert not nonabelian_quotient_locus(els)


def test_loci_s3_on_three_circles():
    lamps = s3_lamps()
    loc = nonnormal_locus(lamps)
    assert loc.measure() == 3 * I.measure()
    assert loc == Subdomain.from_arcs(lamps[0].domain, [(f"{i}/C", 0, HALF) for i in range(3)])


def test_loci_regular_s3():
    reg = FiniteGroup.regular(FiniteGroup.symmetric(3))
    lamps = permutation_lamps(reg, BASE, I)
    assert not nonnormal_locus(lamps)
    loc = nonabelian_quotient_locus(lamps)
    assert loc.measure() == 6 * I.measure()


def test_product_bound_abelian_control():
    ll = Lamplighter(LampSpec((3,), (ALPHA,)))
    s = ll.group.generators["sigma"]
    rep = product_orbit_bound([[identity(ll.domain), s, compose(s, s)]],
                              Point("0/C", ExactReal(Fraction(1, 4))))
    assert rep.lower_bound == 1 and rep.orbit_size == 3


@pytest.mark.parametrize("n", [1, 2, 3])
def test_product_bound_s3_copies(n):
    dom, label_of, factors = s3_copies(n)
    x = Point(label_of[((0,) * n, "C")], ExactReal(Fraction(1, 4)))
    rep = product_orbit_bound(factors, x)
    assert rep.orbit_size == product_orbit_size(n, (0,) * n) == 3 ** n
    assert rep.lower_bound == 2 ** n
    assert all(f["triggered"] for f in rep.factors)


def test_product_bound_outside_supports():
    J1, J2 = arc(0, Fraction(1, 4)), arc(Fraction(1, 4), HALF)
    dom, label_of, f1 = s3_copies(1, J1)
    f2 = permutation_lamps(FiniteGroup.symmetric(3), BASE, J2)
    x = Point("0/C", ExactReal(Fraction(3, 4)))
    rep = product_orbit_bound([f1[0], f2], x)
    assert rep.orbit_size == 1 and rep.lower_bound == 1


def test_product_bound_rejects_noncommuting():
    lamps = s3_lamps()
    other = permutation_lamps(FiniteGroup.symmetric(3), BASE, arc(Fraction(1, 4), Fraction(3, 4)))
    with pytest.raises(ValueError):
        product_orbit_bound([lamps, other], Point("0/C", ExactReal(Fraction(1, 3))))

from fractions import Fraction
from itertools import product

import pytest
from hypothesis import given, strategies as st

from conftest import ALPHA, BETA, HALF
from oracles import SQRT2_M1, arcs_intersect, frac_dec
from ietlab.constructions import (BASE, LampSpec, WreathNormalForm, arc,
                                  build_hj, build_lamplighter, build_ll_like, commutation_set,
                                  difference_set_measure, distinguish_invariant, hj_multiply,
                                  hj_normal_form, overlap_predicate, verify_wreath_embedding,
                                  wreath_obstruction_witness)
from ietlab.domain import Subdomain
from ietlab.exact import ExactReal
from ietlab.finite import FiniteGroup
from ietlab.groups import FinGenGroup, ball
from ietlab.iet import (IetError, commutator, compose, identity, image, inverse, power,
                        rotation, synchronized_rotation)

SPEC = LampSpec((3,), (ALPHA,))
J_HJ = arc(Fraction(1, 10), Fraction(3, 10))


@pytest.fixture(scope="module")
def ll():
    return build_lamplighter(SPEC)[1]


@pytest.fixture(scope="module")
def hj():
    return build_hj(J_HJ, ALPHA)[1]


# --- lamplighters ---------------------------------------------------------------


def test_lamplighter_examples(ll):
    assert ll(ll.identity_form).is_identity
    s = ll.group.generators["sigma"]
    R = ll.group.generators["R"]
    assert ll(WreathNormalForm.make({(0,): (1,)}, (0,), (3,))) == s
    assert power(s, 3).is_identity and not power(s, 2).is_identity
    assert commutator(s, compose(compose(R, s), inverse(R))).is_identity


def test_dependent_angles_refused():
    with pytest.raises(ValueError):
        build_lamplighter(LampSpec((3,), (Fraction(1, 4),)))
    with pytest.raises(ValueError):
        build_lamplighter(LampSpec((3,), (ALPHA, 2 * ALPHA + 1)))
    build_lamplighter(LampSpec((3,), (ALPHA, BETA)))


def test_lamp_commutation_grid(ll):
    starts = [Fraction(k, 5) for k in range(4)] + [ALPHA]
    arcs = [arc(a, a + Fraction(2, 5)) for a in starts]
    pairs = list(product(arcs, repeat=2))[:20]
    for J, J2 in pairs:
        for a, b in product((1, 2), repeat=2):
            assert commutator(ll.lamp((a,), J), ll.lamp((b,), J2)).is_identity


def test_verify_embedding_small_depths():
    rep = verify_wreath_embedding(SPEC, 1)
    assert rep.ok and rep.sizes == [1, 5]
    rep = verify_wreath_embedding(LampSpec((2,), (ALPHA,)), 5)
    assert rep.ok
    rep = verify_wreath_embedding(LampSpec((3,), (Fraction(1, 4),), allow_dependent=True), 6)
    assert not rep.ok and not rep.witness_form.is_trivial
    g, ll = build_lamplighter(LampSpec((3,), (Fraction(1, 4),), allow_dependent=True))
    assert g.evaluate(rep.witness).is_identity


def test_two_dimensional_lamplighter():
    rep = verify_wreath_embedding(LampSpec((2,), (ALPHA, BETA)), 3)
    assert rep.ok and rep.sizes[1] == 6


forms = st.builds(
    lambda lamp, shift: WreathNormalForm.make({(p,): (v,) for p, v in lamp.items()}, (shift,), (3,)),
    st.dictionaries(st.integers(-3, 3), st.integers(1, 2), max_size=3), st.integers(-3, 3))


@given(forms, forms)
def test_evaluator_is_a_homomorphism(ll, x, y):
    assert ll(ll.multiply(x, y)) == compose(ll(x), ll(y))
    assert ll(x).is_identity == x.is_trivial


def test_ll_like_matches_lamplighter(ll):
    G = FinGenGroup({"R": rotation(BASE, "C", ALPHA)})
    L = build_ll_like(G, (3,), arc(0, HALF), all_values=False)
    assert L.generators["R"] == ll.group.generators["R"]
    assert L.generators["sigma[1]"] == ll.group.generators["sigma"]
    # the empty support gives back G
    L0 = build_ll_like(G, (3,), Subdomain.empty(BASE))
    assert set(L0.named) == {"R"}
    # a trivial acting group gives A
    Lt = build_ll_like(FinGenGroup({"e": identity(BASE)}, allow_trivial=True), (3,), arc(0, HALF))
    assert len(ball(Lt, 3)) == 3


# --- H_J ------------------------------------------------------------------------


def test_hj_basics(hj):
    assert power(hj.tau_J, 2).is_identity
    assert hj_normal_form(hj, hj.tau_J) == hj.element(0, {}, hj.J)
    conj = compose(compose(hj.R, hj.tau_J), inverse(hj.R))
    Rb = hj.lamplighter.group.generators["R"]
    assert hj_normal_form(hj, conj) == hj.element(0, {}, image(Rb, hj.J))
    sr = compose(hj.sigma, hj.R)
    nf = hj_normal_form(hj, sr)
    assert nf == hj.element(1, {-1: 1}, None) and hj(nf) == sr
    with pytest.raises(ValueError):
        build_hj(Subdomain.from_arcs(hj.base, [("1/C", 0, Fraction(1, 10))]), ALPHA)


def test_hj_normal_form_rejects_nonmembers(hj):
    bad = synchronized_rotation(hj.domain, Fraction(1, 7))
    with pytest.raises(IetError):
        hj_normal_form(hj, bad)


@pytest.mark.slow
def test_hj_round_trip_depth6(hj):
    b = ball(hj.group, 6)
    for h in b.elements:
        hj_normal_form(hj, h)       # raises unless the evaluator reproduces h


def test_hj_semidirect_law(hj):
    b = ball(hj.group, 3)
    forms = {h: hj_normal_form(hj, h) for h in b.elements}
    items = list(forms.items())
    for h1, x in items[::3]:
        for h2, y in items[::5]:
            assert hj_multiply(hj, x, y) == hj_normal_form(hj, compose(h1, h2))


@given(st.lists(st.fractions(0, 1, max_denominator=20), min_size=4, max_size=4))
def test_tau_factor_drops_from_commutator(hj, qs):
    a, b, c, d = sorted(qs)
    t1 = hj.tau(arc(a, b) if a < b else Subdomain.empty(BASE))
    t2 = hj.tau(arc(c, d) if c < d else Subdomain.empty(BASE))
    for h in (hj.sigma, hj.R, compose(hj.sigma, hj.R)):
        assert commutator(compose(h, t1), t2) == commutator(h, t2)


def test_lamp_tau_commute_iff_disjoint(hj):
    pts = [Fraction(k, 8) for k in range(8)]
    for a in pts:
        for length in (Fraction(1, 8), Fraction(3, 8)):
            K = arc(a, a + length)
            trivial = commutator(hj.sigma, hj.tau(K)).is_identity
            assert trivial == (not (K & hj.I))


def test_commutation_examples():
    _, h = build_hj(arc(Fraction(1, 10), Fraction(2, 10)), ALPHA)
    assert 0 in commutation_set(h, 1).iet
    _, h = build_hj(arc(Fraction(6, 10), Fraction(7, 10)), ALPHA)
    assert 0 not in commutation_set(h, 1).iet


def test_commutation_paths_agree_with_decimal_oracle(hj):
    res = commutation_set(hj, 300)
    assert res.agree
    J = [(frac_dec(Fraction(1, 10)), frac_dec(Fraction(3, 10)))]
    I = [(frac_dec(Fraction(0)), frac_dec(HALF))]
    oracle = [n for n in range(300)
              if arcs_intersect([((a + n * SQRT2_M1) % 1, (b + n * SQRT2_M1) % 1) for a, b in J], I)]
    assert res.iet == oracle


def test_overlap_predicate_sign():
    J, I = arc(Fraction(1, 10), Fraction(3, 10)), arc(0, HALF)
    # J + t meets I for t in the open arc (-3/10, 4/10)
    assert overlap_predicate(ExactReal(Fraction(39, 100)), J, I)
    assert not overlap_predicate(ExactReal(Fraction(2, 5)), J, I)
    assert overlap_predicate(ExactReal(Fraction(71, 100)), J, I)
    assert not overlap_predicate(ExactReal(Fraction(7, 10)), J, I)


def test_difference_set_examples():
    I = arc(0, HALF)
    assert difference_set_measure(Subdomain.empty(BASE), I) == 0
    assert difference_set_measure(arc(0, Fraction(1, 5)), I) == Fraction(7, 10)
    assert difference_set_measure(I, I) == 1
    # two arcs: measure of a union
    J = Subdomain.from_arcs(BASE, [("C", 0, Fraction(1, 10)), ("C", Fraction(7, 10), Fraction(8, 10))])
    # J - I = [1/2, 11/10) u [1/5, 4/5) covers all but [1/10, 1/5)
    assert difference_set_measure(J, I) == Fraction(9, 10)


def test_distinguish_examples():
    J2 = arc(0, Fraction(1, 5))
    rep = distinguish_invariant(J2, J2, ALPHA)
    assert rep["in_span"]
    rep = distinguish_invariant(arc(0, BETA / 4), J2, ALPHA)
    assert not rep["in_span"] and rep["verdict"] == "CONSISTENT_WITH_NONISOMORPHIC"
    rep = distinguish_invariant(arc(0, Fraction(1, 5) + ALPHA / 10), J2, ALPHA)
    assert rep["span_coefficients"] == (Fraction(1, 5), Fraction(1, 10), 0, 0)
    rep = distinguish_invariant(arc(0, Fraction(3, 5)), J2, ALPHA)
    assert not rep["precondition_ok"]


def test_obstruction_examples():
    S3 = [(1, 0, 2), (1, 2, 0)]
    rep = wreath_obstruction_witness(S3, ALPHA, arc(0, HALF), 3)
    assert rep["verdict"] == "WITNESS" and rep["n"] == 1
    assert wreath_obstruction_witness([(1, 2, 0)], ALPHA, arc(0, HALF), 4)["verdict"] == "NONE"
    # I shorter than the gap to alpha but long enough to overlap after two steps
    I = arc(0, Fraction(3, 10))
    rep = wreath_obstruction_witness(FiniteGroup.symmetric(3), ALPHA, I, 3)
    assert rep["verdict"] == "WITNESS" and rep["n"] == 2
    assert rep["diagnostics"][0]["overlap"] == 0

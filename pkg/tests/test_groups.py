from decimal import ROUND_FLOOR, Decimal
from fractions import Fraction

import pytest

from conftest import ALPHA, HALF, ROOT
from oracles import SQRT2_M1, dec, wreath_ball_sizes
from ietlab.constructions import LampSpec, build_lamplighter
from ietlab.domain import Domain, Point, Subdomain
from ietlab.exact import ExactReal, mod_interval
from ietlab.groups import (CAPPED, COMPLETE, FinGenGroup, abstract_ball, ball,
                           birkhoff_frequency, d_f_set, finite_orbit_triviality,
                           imanishi_decompose, orbit, regular_orbit, relative_stability)
from ietlab.iet import (conjugate, cut_domain, from_permutation, identity, is_invariant,
                        permute_components, rotation)
from ietlab.serialize import load_scene

C = Domain.circles(["C"])
TWO = Domain.circles(["0", "1"])
R0 = rotation(TWO, "0", ALPHA)
R1 = rotation(TWO, "1", ALPHA)
TAU = permute_components(TWO, {"0": "1", "1": "0"})


def pt(c, q):
    return Point(c, ExactReal(q))


def test_fingen_group_closure():
    G = FinGenGroup({"a": R0, "b": R0, "e": identity(TWO), "t": TAU})
    assert set(G.generators) == {"a", "a^-1", "t"}     # duplicates, identity, involution
    with pytest.raises(ValueError):
        FinGenGroup({"e": identity(TWO)})
    assert G.evaluate(["a", "a^-1"]).is_identity


def test_ball_examples():
    G = FinGenGroup({"g": rotation(C, "C", ALPHA)})
    assert ball(G, 0).sizes == [1]
    assert ball(G, 7).sizes == [2 * r + 1 for r in range(8)]
    part = ball(G, 7, max_elements=5)
    assert not part.complete and len(part) == 5


def test_lamplighter_ball_matches_abstract_oracle():
    G, _ = build_lamplighter(LampSpec((3,), (ALPHA,)))
    sizes = ball(G, 4).sizes
    assert sizes[2] == 15
    assert sizes == wreath_ball_sizes(3, 4)


def test_abstract_ball_helper():
    gens = {"+": 1, "-": -1}
    _, sizes = abstract_ball(0, gens, lambda a, b: a + b, 5)
    assert sizes == [1, 3, 5, 7, 9, 11]


def test_orbit_examples():
    G = FinGenGroup({"g": rotation(C, "C", ALPHA)})
    x = pt("C", 0)
    assert set(orbit(G, x, 0).points) == {x}
    assert [n for _, n in orbit(G, x, 9).growth] == [2 * r + 1 for r in range(10)]


def test_lamplighter_orbit_growth_bound():
    G, _ = build_lamplighter(LampSpec((3,), (ALPHA,)))
    for q in (0, Fraction(1, 4), Fraction(2, 3)):
        growth = orbit(G, pt("0/C", q), 8).growth
        counts = [n for _, n in growth]
        assert counts == sorted(counts)
        assert all(n <= 3 * (2 * r + 1) for r, n in growth)


def test_regular_orbit_boundary_and_rotation():
    T = from_permutation([HALF, HALF], [1, 0])
    x = pt("I", 0)
    assert regular_orbit([T], x, 5) == (frozenset([x]), COMPLETE)
    pts, status = regular_orbit([rotation(C, "C", ALPHA)], pt("C", 0), 50)
    assert status == CAPPED and len(pts) == 51
    with pytest.raises(ValueError):
        regular_orbit([T], pt("I", HALF), 0)


def test_regular_orbit_cut_rotation_irrational():
    # rotation by alpha cut at 0; its single discontinuity sits at 1 - alpha
    T = from_permutation([1 - ALPHA, ALPHA], [1, 0])
    G = FinGenGroup({"T": T})
    x = Point("I", 1 - ALPHA)
    pts, status = regular_orbit(G, x, 20)
    assert status == CAPPED
    # hand exploration: only backward steps are regular, giving 1 - (k+1) alpha mod 1
    vals = [1 - (k + 1) * SQRT2_M1 for k in range(21)]
    expected = {round(v - v.to_integral_value(ROUND_FLOOR), 40) for v in vals}
    got = {round(dec(p.offset, {"alpha": SQRT2_M1}), 40) for p in pts}
    assert got == expected


def test_regular_orbit_cut_rotation_rational_and_cutting():
    T = from_permutation([Fraction(3, 4), Fraction(1, 4)], [1, 0])
    G = FinGenGroup({"T": T})
    pts, status = regular_orbit(G, pt("I", Fraction(3, 4)), 100)
    assert status == COMPLETE
    assert {p.offset for p in pts} == {ExactReal(Fraction(k, 4)) for k in (1, 2, 3)}
    df = d_f_set(G)
    assert len(df.points) == 2 and not df.unresolved
    cuts = set().union(*df.finite.values())
    D2, phi = cut_domain(T.domain, sorted(cuts, key=lambda p: p.offset))
    G2 = FinGenGroup({"T": conjugate(phi, T)})
    assert not d_f_set(G2).points


def test_d_f_set_rotations_and_two_circles():
    assert not d_f_set([rotation(C, "C", ALPHA), rotation(C, "C", 1 - ALPHA)]).points
    df = d_f_set(FinGenGroup({"tau": TAU, "R0": R0}), cap=1000)
    assert not df.points and not df.unresolved


def test_imanishi_examples():
    dec = imanishi_decompose(FinGenGroup({"tau": TAU}))
    assert dec.finite_part == [(Subdomain.whole(TWO), 2)] and not dec.irreducible
    dec = imanishi_decompose(FinGenGroup({"tau": TAU, "R0": R0}))
    assert dec.irreducible == [Subdomain.whole(TWO)] and not dec.residual_undecided
    assert dec.corroborated
    dec = imanishi_decompose(FinGenGroup({"R0": R0, "R1": R1}))
    assert sorted(dec.irreducible, key=repr) == sorted(
        [Subdomain.whole(TWO, ["0"]), Subdomain.whole(TWO, ["1"])], key=repr)
    # rational rotation: finite orbits of cardinality 4
    dec = imanishi_decompose(FinGenGroup({"r": rotation(C, "C", Fraction(1, 4))}))
    assert dec.finite_part == [(Subdomain.whole(C), 4)]


def test_imanishi_with_discontinuities():
    # a cut rational rotation on an interval: finite orbits after cutting
    T = from_permutation([Fraction(3, 4), Fraction(1, 4)], [1, 0])
    dec = imanishi_decompose(FinGenGroup({"T": T}))
    assert not dec.irreducible and dec.finite_part
    assert all(k == 4 for _, k in dec.finite_part)
    # cut irrational rotation: one irreducible component
    T = from_permutation([1 - ALPHA, ALPHA], [1, 0])
    dec = imanishi_decompose(FinGenGroup({"T": T}), cap=500)
    assert dec.residual_undecided
    dec = imanishi_decompose(FinGenGroup({"T": T}), cap=500, capped_as_infinite=True)
    assert len(dec.irreducible) == 1


@pytest.mark.parametrize("gens", [
    {"tau": TAU, "R0": R0},
    {"R0": R0, "R1": R1},
    {"tau": TAU},
    {"R0": R0, "T": permute_components(TWO, {"0": "1", "1": "0"})},
])
def test_imanishi_invariants(gens):
    G = FinGenGroup(gens)
    dec = imanishi_decompose(G)
    parts = dec.irreducible + [s for s, _ in dec.finite_part] + dec.residual_undecided
    total = Subdomain.empty(G.domain)
    for s in parts:
        assert total.isdisjoint(s)
        total = total | s
        for g in G:
            assert is_invariant(g, s)
    assert total == Subdomain.whole(G.domain)


def test_stability_examples():
    rep = relative_stability(FinGenGroup({"g": rotation(C, "C", ALPHA)}),
                             [rotation(C, "C", mod_interval(2 * ALPHA, 1))])
    assert rep["verdict"] == "OK"
    rep = relative_stability(FinGenGroup({"tau": TAU, "R0": R0}), [R0, R1])
    assert rep["verdict"] == "UNSTABLE" and rep["components"][0]["verdict"] == "SPLIT"
    sq0, sq1 = rotation(TWO, "0", 2 * ALPHA), rotation(TWO, "1", 2 * ALPHA)
    rep = relative_stability(FinGenGroup({"R0": R0, "R1": R1}), [sq0, sq1])
    assert rep["verdict"] == "OK"
    assert all(c["verdict"] == "PRESERVED" for c in rep["components"])
    assert finite_orbit_triviality(FinGenGroup({"tau": TAU})) is False
    assert finite_orbit_triviality(FinGenGroup({"R0": R0, "R1": R1})) is True


def test_scenes_match_direct_construction():
    sc = load_scene(ROOT / "scenes" / "two_circles_G.json")
    assert sc.generators["R0"] == R0 and sc.generators["tau"] == TAU
    assert sc.subgroup["R1"] == R1


def test_birkhoff_examples():
    R = rotation(C, "C", ALPHA)
    x = pt("C", 0)
    assert birkhoff_frequency(R, x, Subdomain.whole(C), 50) == 1
    assert birkhoff_frequency(R, x, Subdomain.empty(C), 50) == 0
    E = Subdomain.from_arcs(C, [("C", 0, Fraction(3, 10))])
    # decimal oracle for the first 2000 steps
    count = sum(1 for i in range(2000) if (i * SQRT2_M1) % 1 < Decimal("0.3"))
    assert birkhoff_frequency(R, x, E, 2000) == Fraction(count, 2000)
    with pytest.raises(ValueError):
        birkhoff_frequency(R, x, E, 0)

import pytest
from sympy.polys.domains import ZZ
from sympy.polys.galoistools import gf_mul, gf_rem

from gqkit.constructions import parse_t2_label
from gqkit.errors import GcdViolation, NotAChain, NotIdeal, NotInTower
from gqkit.galois import (KINDS, build_tower, descent_closed_set, embed_level, extend_ideal,
                          frobenius, frobenius_orbits, grid_extension_report, rational_elements,
                          rational_isomorphism, scheme_point_count, transitivity_check, union_check)
from gqkit.geometry import bits, detect_order, popcount
from gqkit.iso import are_isomorphic
from gqkit.substructure import anchored, full_grids, ideal_perp


def square_oracle(modulus_low_first):
    """x -> x^2 in F_2[x]/(m), with elements as bit masks, via sympy."""
    mod = [int(c) for c in reversed(modulus_low_first)]

    def to_poly(a):
        return [int(c) for c in bin(a)[2:]] if a else []

    def from_poly(p):
        return int("".join(map(str, p)), 2) if p else 0

    def sq(a):
        p = to_poly(a)
        return from_poly(gf_rem(gf_mul(p, p, 2, ZZ), mod, 2, ZZ))
    return sq


def test_tower_levels(tower23):
    assert tower23.exponents == [1, 3]
    assert tower23.level(1).geometry.n_points == 15
    assert tower23.level(3).geometry.n_points == 585
    o = detect_order(tower23.level(3).geometry)
    assert (o.s, o.t) == (8, 8)


def test_other_tower():
    T = build_tower(3, [1, 2])
    assert [T.level(h).q for h in T.exponents] == [2, 4]
    assert transitivity_check(T, 1, 2)
    assert frobenius_orbits(T, 1, 2, "points").sizes() == {1: 15, 2: 35}


def test_tower_errors(tower23):
    with pytest.raises(GcdViolation):
        build_tower(2, [1, 2])
    with pytest.raises(NotAChain):
        build_tower(3, [2, 5])
    with pytest.raises(NotAChain):
        build_tower(3, [])
    with pytest.raises(NotInTower):
        frobenius_orbits(tower23, 1, 5)
    with pytest.raises(ValueError):
        frobenius_orbits(tower23, 1, 3, "planes")


def test_embedding_is_injective(tower23):
    pm, lm = embed_level(tower23, 1, 3)
    assert len(set(pm)) == 15 and len(set(lm)) == 15
    G, HG = tower23.level(1).geometry, tower23.level(3).geometry
    for j, L in enumerate(G.lines):
        assert {pm[p] for p in L} <= set(HG.lines[lm[j]])


def test_frobenius_acts_by_squaring_coordinates(tower23):
    lv = tower23.level(3)
    sq = square_oracle(lv.F.modulus)
    pmap, _ = frobenius(tower23, 1, 3)
    labels = lv.geometry.point_labels
    for p, lab in enumerate(labels):
        kind, coords = parse_t2_label(lab)
        k2, c2 = parse_t2_label(labels[pmap[p]])
        assert k2 == kind
        assert c2 == tuple(sq(c) for c in coords)


def test_frobenius_is_an_automorphism(tower23):
    HG = tower23.level(3).geometry
    pmap, lmap = frobenius(tower23, 1, 3)
    for j, L in enumerate(HG.lines):
        assert sorted(pmap[p] for p in L) == sorted(HG.lines[lmap[j]])


def test_orbit_sizes(tower23):
    assert frobenius_orbits(tower23, 1, 3, "points").sizes() == {1: 15, 3: 190}
    assert frobenius_orbits(tower23, 1, 3, "planar").sizes() == {1: 6, 3: 22}
    assert frobenius_orbits(tower23, 1, 3, "affine").sizes() == {1: 8, 3: 168}
    assert frobenius_orbits(tower23, 1, 3, "lines").sizes() == {1: 15, 3: 190}
    sym = frobenius_orbits(tower23, 1, 3, "symbol")
    assert sym.orbits == [[tower23.level(3).geometry.point_labels.index("I")]]


@pytest.mark.parametrize("kind", KINDS)
def test_burnside(tower23, kind):
    # orbit count = average number of fixed elements over the group
    HG = tower23.level(3).geometry
    pmap, lmap = frobenius(tower23, 1, 3)
    perm = lmap if kind == "lines" else pmap
    dom = frobenius_orbits(tower23, 1, 3, kind)
    elems = [x for o in dom.orbits for x in o]
    fixed_total = 0
    for k in range(3):
        for x in elems:
            y = x
            for _ in range(k):
                y = perm[y]
            fixed_total += y == x
    assert fixed_total % 3 == 0
    assert len(dom.orbits) == fixed_total // 3
    assert all(3 % len(o) == 0 for o in dom.orbits)
    assert len(elems) == len(set(elems))


def test_rational_elements(tower23):
    R = rational_elements(tower23, 1, 3)
    assert popcount(R.points) == 15 and popcount(R.lines) == 15
    iso = rational_isomorphism(tower23, 1, 3)
    assert iso is not None
    assert are_isomorphic(R.geometry(), tower23.level(1).geometry) is not None


def test_everything_rational_at_top(tower23):
    R = rational_elements(tower23, 3, 3)
    HG = tower23.level(3).geometry
    assert (R.points, R.lines) == (HG.all_points, HG.all_lines)


def test_union_and_transitivity(tower23):
    assert union_check(tower23)
    assert transitivity_check(tower23, 1, 3)


def test_extend_line(tower23):
    G = tower23.level(1).geometry
    e = extend_ideal(anchored(G, G.lines[0], [0]), tower23, 1, 3)
    assert popcount(e.result.points) == 9 and popcount(e.result.lines) == 1
    assert e.rules == ["C1"] and e.complete


def test_extend_perp(tower23):
    G = tower23.level(1).geometry
    e = extend_ideal(ideal_perp(G, 0), tower23, 1, 3)
    assert popcount(e.result.lines) == 9
    assert popcount(e.result.points) == 1 + 9 * 8
    assert "C2" in e.rules


def test_extend_grids(tower23):
    G = tower23.level(1).geometry
    HG = tower23.level(3).geometry
    rep = grid_extension_report(tower23, 1, 3)
    assert rep == {"grids": 10, "to_grids": 6, "to_other": 4, "other_sizes": [585] * 4}
    kept = 0
    for g in full_grids(G):
        e = extend_ideal(g, tower23, 1, 3)
        assert "C3" in e.rules
        if not e.flags:
            kept += 1
            o = detect_order(e.result.geometry())
            assert (o.s, o.t) == (8, 1)
            assert e.result.is_full()
    assert kept == 6
    assert HG.n_points == 585


def test_extend_needs_ideal(tower23):
    G = tower23.level(1).geometry
    with pytest.raises(NotIdeal):
        extend_ideal(anchored(G, G.lines[0][:2], [0]), tower23, 1, 3)


def test_descent_of_a_line(tower23):
    G = tower23.level(1).geometry
    d = descent_closed_set(anchored(G, G.lines[0], [0]), tower23, 1, 3)
    assert len(d.naive) == 5
    assert d.size == 7 > len(d.naive)
    assert [len(o) for o in d.orbit_primes()] == [3, 3]
    for o in d.orbit_primes():
        assert all(p.tag == "OrdinaryPoint" for p in o)
    assert len(d.rational) == 5


def test_descent_of_empty(tower23):
    G = tower23.level(1).geometry
    d = descent_closed_set(anchored(G, [], []), tower23, 1, 3)
    assert d.size == 1 and d.orbits[0][0].tag == "Empty"


def test_conjugate_lines_form_one_orbit(tower23):
    G = tower23.level(1).geometry
    d = descent_closed_set(ideal_perp(G, 0), tower23, 1, 3)
    line_orbits = [o for o in d.orbit_primes() if o[0].tag == "FullLine"]
    assert line_orbits and all(len(o) == 3 for o in line_orbits)
    # members of such an orbit are individually not rational
    for o in line_orbits:
        assert all(p.lines not in {r.lines for r in d.rational} for p in o)


@pytest.mark.parametrize("i, H", [(1, 2), (1, 3), (2, 3), (3, 2), (3, 4)])
def test_scheme_point_count(i, H):
    rep = scheme_point_count(i, H)
    assert rep["same_set"]
    assert rep["curve_points"] == rep["oval_points"] == 2 ** H + 1

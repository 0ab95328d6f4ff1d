import pytest
from hypothesis import given
from hypothesis import strategies as st

import oracles
from gqkit.constructions import (dual_grid, fano_plane, grid, line_geometry, perp_geometry, point_geometry,
                                 point_set, quadric_gq, triangle)
from gqkit.errors import DuplicatePointOnLine, NotAxiom3, OutOfRangeId
from gqkit.geometry import (Geometry, check_axiom3, check_axiom3_tilde, classify_axiom3_type, collinearity_graph,
                            detect_order, dual_type, dualize, gq_counts_ok, induced, new_geometry, relabel, to_dot)
from strategies import small_geometries


def test_new_geometry_single_line():
    G = new_geometry(3, [[0, 1, 2]])
    assert (G.n_points, G.n_lines) == (3, 1)
    assert tuple(detect_order(G)) == (2, 0)


def test_new_geometry_empty():
    G = new_geometry(0, [])
    assert (G.n_points, G.n_lines) == (0, 0)
    assert detect_order(G) is None
    assert dualize(G) == G


def test_new_geometry_grid_from_rows_and_columns():
    rows = [[3 * r + c for c in range(3)] for r in range(3)]
    cols = [[3 * r + c for r in range(3)] for c in range(3)]
    G = new_geometry(9, rows + cols)
    assert check_axiom3(G)
    assert tuple(detect_order(G)) == (2, 1)


def test_new_geometry_rejects_bad_ids():
    with pytest.raises(OutOfRangeId):
        new_geometry(3, [[0, 3]])
    with pytest.raises(DuplicatePointOnLine):
        new_geometry(3, [[0, 1, 1]])


def test_incidence_is_symmetric(q42):
    for j, L in enumerate(q42.lines):
        for p in range(q42.n_points):
            assert (p in L) == (j in q42.point_lines[p]) == q42.incident(p, j)


def test_check_axiom3_examples(q42):
    assert check_axiom3(grid(3, 3))
    cert = check_axiom3(triangle())
    assert not cert
    assert len(cert.witnesses) == 2
    assert check_axiom3(q42)
    assert oracles.axiom3_holds(q42)


def test_check_axiom3_tilde_examples():
    assert check_axiom3_tilde(grid(3, 4))
    cert = check_axiom3_tilde(fano_plane())
    assert not cert and cert.kind in ("triangle", "digon")


def test_detect_order_examples(q52):
    assert tuple(detect_order(q52)) == (2, 4)
    # perp: centre has degree 3, others degree 1
    assert detect_order(perp_geometry(2, 3)) is None
    assert detect_order(point_geometry()) is None


def test_classify_examples(q42):
    assert str(classify_axiom3_type(grid(3, 4))) == "Grid(3,4)"
    assert str(classify_axiom3_type(q42)) == "ThickGQ(2,2)"
    assert str(classify_axiom3_type(perp_geometry(2, 3))) == "Perp(2)"
    assert str(classify_axiom3_type(Geometry(0, []))) == "Empty"
    assert str(classify_axiom3_type(point_set(4))) == "PointSet(4)"
    assert str(classify_axiom3_type(grid(3, 3))) == "ThinGQ(2,1)"
    assert str(classify_axiom3_type(dual_grid(3, 3))) == "ThinGQ(1,2)"
    with pytest.raises(NotAxiom3):
        classify_axiom3_type(triangle())


def test_dualize_examples(q42):
    D = dualize(grid(3, 3))
    assert (D.n_points, D.n_lines) == (6, 9)
    assert tuple(detect_order(dualize(q42))) == (2, 2)
    assert dualize(dualize(q42)) == q42


def test_collinearity_graph_examples(q42):
    g = collinearity_graph(line_geometry(3))
    assert all(g.adj[v] == 0b111 for v in range(3))
    g = collinearity_graph(q42)
    assert g.n == 15
    assert all(g.degree(v) == 6 and g.adj[v] >> v & 1 for v in range(15))
    g = collinearity_graph(point_set(3))
    assert [g.adj[v] for v in range(3)] == [1, 2, 4]


def test_gq_counts_on_quadrics():
    for m in (3, 4, 5):
        for q in (2, 3):
            assert gq_counts_ok(quadric_gq(m, q))


def test_json_round_trip(q42):
    G = Geometry.from_json(q42.to_json())
    assert G == q42 and G.point_labels == q42.point_labels


def test_dot_export():
    text = to_dot(line_geometry(2))
    assert text.startswith("graph incidence {") and "p0 -- L0;" in text
    text = to_dot(line_geometry(2), "collinearity")
    assert "p0 -- p1;" in text and "p0 -- p0;" in text


def test_induced_keeps_surviving_points(q42):
    sub, pts, lines = induced(q42, q42.line_mask[0] | q42.line_mask[1])
    assert sub.n_points == len(pts)
    assert all(len(L) >= 1 for L in sub.lines)


@given(small_geometries())
def test_axiom3_agrees_with_oracle(G):
    assert bool(check_axiom3(G)) == oracles.axiom3_holds(G)


@given(small_geometries())
def test_axiom3_implies_tilde(G):
    if check_axiom3(G):
        assert check_axiom3_tilde(G)


@given(small_geometries())
def test_tilde_agrees_with_triangle_oracle(G):
    # a repeated pair of points on two lines is also a failure of the tilde axiom
    digon = any(len(set(a) & set(b)) >= 2 for i, a in enumerate(G.lines) for b in G.lines[i + 1:])
    assert bool(check_axiom3_tilde(G)) == (not digon and not oracles.has_triangle(G))


@given(small_geometries())
def test_dualize_is_involution(G):
    assert dualize(dualize(G)) == G


@given(small_geometries())
def test_detect_order_agrees_with_oracle(G):
    o = detect_order(G)
    ref = oracles.order(G) if G.n_points and G.n_lines else None
    assert (tuple(o) if o else None) == ref


@given(small_geometries(), st.randoms())
def test_relabel_preserves_axioms(G, rnd):
    pp = list(range(G.n_points))
    rnd.shuffle(pp)
    H = relabel(G, pp)
    assert bool(check_axiom3(G)) == bool(check_axiom3(H))
    assert detect_order(G) == detect_order(H)


@given(small_geometries())
def test_classification_stable_under_duality(G):
    if not check_axiom3(G) or any(len(L) < 2 for L in G.lines):
        return
    try:
        tag = classify_axiom3_type(G)
    except NotAxiom3:
        return
    dtag = classify_axiom3_type(dualize(G))
    if _flag_tie(G):
        # a flag with as many extra points as extra lines is self-dual
        assert dtag.kind == tag.kind == "Perp"
    else:
        assert dtag.kind == dual_type(tag).kind


def _flag_tie(G):
    centres = [p for p in range(G.n_points) if len(G.point_lines[p]) == G.n_lines]
    carriers = [j for j in range(G.n_lines) if len(G.lines[j]) == G.n_points]
    return bool(centres and carriers) and G.n_lines - 1 == len(G.lines[carriers[0]]) - 1 \
        and len(G.point_lines[centres[0]]) - 1 == G.n_points - 1


@given(st.integers(2, 5), st.integers(2, 5))
def test_grids_classify_and_dualize(u, v):
    tag = classify_axiom3_type(grid(u, v))
    dtag = classify_axiom3_type(dual_grid(u, v))
    if u == v:
        assert (tag.kind, dtag.kind) == ("ThinGQ", "ThinGQ")
    else:
        assert tag.kind == "Grid" and dtag.kind == "DualGrid"
        assert sorted(tag.params) == sorted(dtag.params) == sorted((u, v))

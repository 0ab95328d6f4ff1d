import networkx as nx
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import corpus_geometry
from gqkit.constructions import grid, line_geometry, perp_geometry, point_geometry, point_set
from gqkit.errors import DiagramDoesNotCommute, NotPrimeFactor
from gqkit.geometry import Geometry, check_axiom3, check_axiom3_tilde, collinearity_graph, detect_order
from gqkit.iso import are_isomorphic, canonical_form
from gqkit.product import (cartesian_product, graph_product, is_cartesian_prime, is_graph_morphism,
                           line_spectrum, parallel_classes, power, product_is_prime_only_if,
                           product_of_sub, product_respects_closure, projections,
                           prodwell_line_spectrum, sabidussi_check, unique_mediating,
                           verify_fiber_terminal)
from gqkit.substructure import anchored, ideal_perp
from strategies import thin_factors


def nx_collinearity(G):
    g = nx.Graph()
    g.add_nodes_from(range(G.n_points))
    for L in G.lines:
        for i, a in enumerate(L):
            for b in L[i + 1:]:
                g.add_edge(a, b)
    return g


def test_line_times_line_is_grid():
    P = cartesian_product(line_geometry(3), line_geometry(3))
    assert P.n_points == 9 and P.n_lines == 6
    o = detect_order(P)
    assert (o.s, o.t) == (2, 1)
    assert are_isomorphic(P, grid(3, 3)) is not None


def test_point_is_neutral(q42):
    assert are_isomorphic(cartesian_product(q42, point_geometry()), q42) is not None
    assert are_isomorphic(cartesian_product(point_geometry(), q42), q42) is not None


def test_line3_times_line4():
    P = cartesian_product(line_geometry(3), line_geometry(4))
    assert (P.n_points, P.n_lines) == (12, 7)
    assert set(line_spectrum(P)) == {3, 4}
    assert clique_free_of_extra(P)


def clique_free_of_extra(P):
    cliques = {frozenset(c) for c in nx.find_cliques(nx_collinearity(P)) if len(c) >= 2}
    return cliques == {frozenset(L) for L in P.lines}


def test_spectrum_with_point_set():
    P = cartesian_product(point_set(3), line_geometry(4))
    assert line_spectrum(P) == {4: 3}


@given(thin_factors(), thin_factors())
def test_collinearity_is_graph_product(G, H):
    P = cartesian_product(G, H)
    ours = nx_collinearity(P)
    ref = nx.cartesian_product(nx_collinearity(G), nx_collinearity(H))
    mapping = {(g, h): g * H.n_points + h for g, h in ref.nodes}
    assert nx.utils.graphs_equal(ours, nx.relabel_nodes(ref, mapping))
    gp = graph_product(collinearity_graph(G), collinearity_graph(H)).strip_loops()
    assert {frozenset(e) for e in ours.edges} == {frozenset(e) for e in gp.edges()}


@given(thin_factors(), thin_factors())
def test_prodwell_line_spectrum(G, H):
    assert check_axiom3_tilde(G) and check_axiom3_tilde(H)
    assert prodwell_line_spectrum(G, H)
    assert check_axiom3_tilde(cartesian_product(G, H))


@settings(max_examples=30)
@given(thin_factors(), thin_factors())
def test_commutative(G, H):
    assert canonical_form(cartesian_product(G, H)).digest == canonical_form(cartesian_product(H, G)).digest


@settings(max_examples=20)
@given(thin_factors(), thin_factors(), thin_factors())
def test_associative(A, B, C):
    if A.n_points * B.n_points * C.n_points > 200:
        return
    left = cartesian_product(cartesian_product(A, B), C)
    right = cartesian_product(A, cartesian_product(B, C))
    assert canonical_form(left).digest == canonical_form(right).digest


@pytest.mark.parametrize("name", ["q4_2", "w_2", "grid_3x4", "dual_grid_3x3", "line_3", "perp_2_3"])
def test_triangle_free_preserved_on_corpus(name):
    G = corpus_geometry(name)
    assert check_axiom3_tilde(cartesian_product(G, line_geometry(2)))
    assert check_axiom3_tilde(cartesian_product(line_geometry(3), G))


@pytest.mark.parametrize("n", [1, 2, 3])
def test_powers_of_a_line(n):
    P = power(line_geometry(3), n)
    assert P.n_points == 3 ** n
    assert len(parallel_classes(P)) == n
    assert check_axiom3_tilde(P)


def test_projections_are_morphisms():
    G, H = perp_geometry(1, 3), line_geometry(3)
    P = cartesian_product(G, H)
    p1, p2 = projections(G, H)
    PG = collinearity_graph(P)
    assert is_graph_morphism(p1, PG, collinearity_graph(G))
    assert is_graph_morphism(p2, PG, collinearity_graph(H))


def test_respects_closure_perp(q42):
    assert product_respects_closure(line_geometry(3), q42, ideal_perp(q42, 0))


def test_respects_closure_trivial(q42):
    Y = line_geometry(3)
    assert product_respects_closure(Y, q42, anchored(q42, [], []))
    assert product_respects_closure(Y, q42, anchored(q42, range(15), range(15)))


def test_product_of_sub_is_full(q42):
    S = product_of_sub(line_geometry(2), q42, ideal_perp(q42, 3))
    assert S.is_full()


def test_prime_only_if_lines():
    r = product_is_prime_only_if(line_geometry(3), line_geometry(4))
    assert r["axiom3"] and r["allowed_shape"] and r["consistent"]


def test_prime_only_if_point_sets():
    r = product_is_prime_only_if(point_set(2), point_set(3))
    assert r["axiom3"] and r["consistent"]


def test_prime_only_if_violation():
    G = Geometry(4, [[0, 1, 2]])
    r = product_is_prime_only_if(G, line_geometry(3))
    assert not r["axiom3"] and r["consistent"]
    assert r["witness"] is not None


@settings(max_examples=40)
@given(thin_factors(), thin_factors())
def test_prime_only_if_consistent(G, H):
    assert product_is_prime_only_if(G, H)["consistent"]


def test_sabidussi_k3_k3():
    r = sabidussi_check(line_geometry(3), line_geometry(3))
    assert r == {"order": 72, "expected": 72, "holds": True}


def test_sabidussi_k3_k4():
    r = sabidussi_check(line_geometry(3), line_geometry(4))
    assert r["order"] == 144 and r["holds"]


def test_sabidussi_unit(q42):
    r = sabidussi_check(q42, point_geometry())
    assert r["order"] == 720 and r["holds"]


def test_sabidussi_needs_primes():
    with pytest.raises(NotPrimeFactor):
        sabidussi_check(grid(3, 3), line_geometry(3))
    assert not is_cartesian_prime(collinearity_graph(grid(3, 3)).strip_loops())


def test_fiber_terminal_identity():
    G, H = line_geometry(3), perp_geometry(1, 2)
    P = cartesian_product(G, H)
    p1, p2 = projections(G, H)
    phi = verify_fiber_terminal((P, p1, p2), G, H)
    assert phi == list(range(P.n_points))
    assert unique_mediating((P, p1, p2), G, H)


def test_fiber_terminal_single_vertex():
    G, H = line_geometry(3), line_geometry(2)
    phi = verify_fiber_terminal((point_geometry(), [2], [1]), G, H)
    assert phi == [2 * 2 + 1]


def test_fiber_terminal_incompatible():
    G, H = line_geometry(3), line_geometry(3)
    W = line_geometry(2)
    with pytest.raises(DiagramDoesNotCommute):
        verify_fiber_terminal((W, [0, 1], [0, 1]), G, H)

"""Cartesian products of point-line geometries via their collinearity graphs."""
from __future__ import annotations

from collections import Counter

from .errors import DiagramDoesNotCommute, NotPrimeFactor
from .geometry import Geometry, Graph, bits, check_axiom3, check_axiom3_tilde, collinearity_graph
from .substructure import AnchoredSubgeometry, remove_closed


def cartesian_product(G: Geometry, H: Geometry) -> Geometry:
    """Points (g, h) numbered g * |H| + h; lines {g} x M first, then N x {h}."""
    nh = H.n_points
    lines, labels, dirs = [], [], []
    for g in range(G.n_points):
        for j, M in enumerate(H.lines):
            lines.append([g * nh + m for m in M])
            labels.append(f"{G.point_label(g)}x{H.line_label(j)}")
            dirs.append(1)
    for j, N in enumerate(G.lines):
        for h in range(nh):
            lines.append([n * nh + h for n in N])
            labels.append(f"{G.line_label(j)}x{H.point_label(h)}")
            dirs.append(0)
    plabels = [f"({G.point_label(g)},{H.point_label(h)})" for g in range(G.n_points) for h in range(nh)]
    markers = [("left", m, h) for m in G.markers for h in range(nh)] + \
              [("right", m, g) for m in H.markers for g in range(G.n_points)]
    meta = {"name": f"{G.meta.get('name', 'G')} x {H.meta.get('name', 'H')}",
            "factors": [G.n_points, nh], "directions": dirs}
    return Geometry(G.n_points * nh, lines, plabels, labels, meta, markers)


def graph_product(A: Graph, B: Graph) -> Graph:
    """Cartesian product of graphs; self loops are kept on every vertex."""
    n = A.n * B.n
    adj = [0] * n
    for a in range(A.n):
        for b in range(B.n):
            v = a * B.n + b
            m = 1 << v
            for b2 in _nbrs(B, b):
                m |= 1 << (a * B.n + b2)
            for a2 in _nbrs(A, a):
                m |= 1 << (a2 * B.n + b)
            adj[v] = m
    return Graph(n, adj)


def _nbrs(A: Graph, v: int):
    return [u for u in bits(A.adj[v]) if u != v]


def projections(G: Geometry, H: Geometry):
    """The two coordinate maps of the product points."""
    nh = H.n_points
    n = G.n_points * nh
    return [v // nh for v in range(n)], [v % nh for v in range(n)]


def is_graph_morphism(f, A: Graph, B: Graph) -> bool:
    """Adjacent (or equal) vertices go to adjacent (or equal) vertices."""
    for v in range(A.n):
        for u in bits(A.adj[v] | (1 << v)):
            if f[u] != f[v] and not B.adj[f[v]] >> f[u] & 1:
                return False
    return True


def line_spectrum(G: Geometry) -> Counter:
    return Counter(len(L) for L in G.lines)


def prodwell_line_spectrum(G: Geometry, H: Geometry) -> bool:
    """The product's line sizes are the union of the factors', and no triangles appear."""
    P = cartesian_product(G, H)
    ok = set(line_spectrum(P)) == set(line_spectrum(G)) | set(line_spectrum(H)) if P.n_points else True
    return ok and bool(check_axiom3_tilde(P)) and clique_lines_agree(P)


def clique_lines_agree(P: Geometry) -> bool:
    """Each line is a maximal clique of the collinearity graph and no other maximal clique has 3+ vertices."""
    coll = [c | (1 << p) for p, c in enumerate(P.coll)]
    lines = {P.line_mask[j] for j in range(P.n_lines)}
    for m in lines:
        common = P.all_points
        for p in bits(m):
            common &= coll[p]
        if common != m:
            return False
    # a triangle outside a line would have to be a clique not covered by a line
    for p in range(P.n_points):
        nb = list(bits(P.coll[p]))
        for i, a in enumerate(nb):
            for b in nb[i + 1:]:
                if P.coll[a] >> b & 1 and not any(m >> p & 1 and m >> a & 1 and m >> b & 1 for m in lines):
                    return False
    return True


def product_of_sub(Y: Geometry, X: Geometry, C: AnchoredSubgeometry) -> AnchoredSubgeometry:
    """Y x C as a subgeometry of Y x X."""
    P = cartesian_product(Y, X)
    nx = X.n_points
    pts = 0
    for y in range(Y.n_points):
        for c in bits(C.points):
            pts |= 1 << (y * nx + c)
    lines = 0
    k = 0
    for y in range(Y.n_points):
        for j in range(X.n_lines):
            if C.lines >> j & 1:
                lines |= 1 << k
            k += 1
    for j in range(Y.n_lines):
        for h in range(nx):
            if C.points >> h & 1:
                lines |= 1 << k
            k += 1
    return AnchoredSubgeometry(P, pts, lines, "product of sub")


def _element_sets(R: Geometry, to_pair):
    pts = {to_pair(p) for p in range(R.n_points)}
    lines = {frozenset(to_pair(p) for p in L) for L in R.lines}
    return pts, lines


def product_respects_closure(Y: Geometry, X: Geometry, C: AnchoredSubgeometry) -> bool:
    """Y x (X minus C) and (Y x X) minus (Y x C) have the same points and lines."""
    left = cartesian_product(Y, remove_closed(X, C))
    rx = remove_closed(X, C)
    parent_x = rx.meta["parent_points"]
    nl = rx.n_points
    lp, ll = _element_sets(left, lambda v: (v // nl, parent_x[v % nl]) if nl else None)
    P = cartesian_product(Y, X)
    right = remove_closed(P, product_of_sub(Y, X, C))
    parent_p = right.meta["parent_points"]
    nx = X.n_points
    rp, rl = _element_sets(right, lambda v: divmod(parent_p[v], nx))
    return lp == rp and ll == rl


def product_is_prime_only_if(G: Geometry, H: Geometry) -> dict:
    """Axiom (3) on G x H, and whether the factors are both point sets or both lines.

    A one-point factor is neutral and always allowed.
    """
    P = cartesian_product(G, H)
    cert = check_axiom3(P)

    def shape(X):
        if X.n_points == 1 and X.n_lines == 0:
            return "unit"
        if X.n_lines == 0:
            return "points"
        if X.n_lines == 1 and len(X.lines[0]) == X.n_points:
            return "line"
        return "other"

    sg, sh = shape(G), shape(H)
    # a single point is the neutral factor, so the product is the other factor
    allowed = (sg == sh and sg in ("points", "line")) or "unit" in (sg, sh)
    return {"axiom3": bool(cert), "shapes": (sg, sh), "allowed_shape": allowed,
            "consistent": (not bool(cert)) or allowed,
            "witness": None if cert else {"point": cert.point, "line": cert.line, "kind": cert.kind}}


def parallel_classes(G: Geometry) -> list:
    """Classes of lines under the closure of 'opposite sides of a square'.

    Two disjoint lines are opposite sides of a square when a bijection of
    their points is given by collinearity.
    """
    n = G.n_lines
    parent = list(range(n))

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    for U in range(n):
        for V in range(U + 1, n):
            if G.line_mask[U] & G.line_mask[V]:
                continue
            if len(G.lines[U]) != len(G.lines[V]):
                continue
            if all(len([q for q in G.lines[V] if G.coll[p] >> q & 1]) == 1 for p in G.lines[U]) and \
                    all(len([p for p in G.lines[U] if G.coll[q] >> p & 1]) == 1 for q in G.lines[V]):
                parent[find(U)] = find(V)
    classes = {}
    for j in range(n):
        classes.setdefault(find(j), []).append(j)
    return sorted(classes.values())


# primality of graphs and Sabidussi

def _distances(A: Graph):
    n = A.n
    nb = [_nbrs(A, v) for v in range(n)]
    inf = n + 1
    D = []
    for s in range(n):
        d = [inf] * n
        d[s] = 0
        q = [s]
        for v in q:
            for u in nb[v]:
                if d[u] == inf:
                    d[u] = d[v] + 1
                    q.append(u)
        D.append(d)
    return D


def cartesian_factor_classes(A: Graph) -> list:
    """Edge classes of the transitive closure of Djokovic's relation and the
    no-square relation; for a connected graph their number is the number of
    Cartesian prime factors."""
    D = _distances(A)
    n = A.n
    if any(D[0][v] > n for v in range(n)):
        raise NotPrimeFactor("factor graphs must be connected")
    edges = [(u, v) for u in range(n) for v in _nbrs(A, u) if u < v]
    idx = {e: i for i, e in enumerate(edges)}
    parent = list(range(len(edges)))

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    def union(a, b):
        parent[find(a)] = find(b)

    for i, (x, y) in enumerate(edges):
        for j in range(i + 1, len(edges)):
            u, v = edges[j]
            if D[x][u] + D[y][v] != D[x][v] + D[y][u]:
                union(i, j)
    nbm = [A.adj[v] & ~(1 << v) for v in range(n)]
    for x in range(n):
        ns = _nbrs(A, x)
        for a in range(len(ns)):
            for b in range(a + 1, len(ns)):
                y, z = ns[a], ns[b]
                if nbm[y] >> z & 1:
                    continue
                if nbm[y] & nbm[z] == 1 << x:
                    union(idx[tuple(sorted((x, y)))], idx[tuple(sorted((x, z)))])
    classes = {}
    for i, e in enumerate(edges):
        classes.setdefault(find(i), []).append(e)
    return sorted(classes.values())


def is_cartesian_prime(A: Graph) -> bool:
    return A.n >= 2 and len(cartesian_factor_classes(A)) == 1


def _as_graph(X) -> Graph:
    return collinearity_graph(X).strip_loops() if isinstance(X, Geometry) else X


def sabidussi_check(G, H) -> dict:
    """|Aut(G x H)| against |Aut(G)| |Aut(H)|, doubled when G and H are isomorphic."""
    from .iso import graph_automorphism_group, graph_certificate
    A, B = _as_graph(G), _as_graph(H)
    unit = A.n == 1 or B.n == 1
    if not unit and not (is_cartesian_prime(A) and is_cartesian_prime(B)):
        raise NotPrimeFactor("both factors must be Cartesian prime")
    P = graph_product(A, B).strip_loops()
    got = graph_automorphism_group(P).order()
    oa = graph_automorphism_group(A).order() if A.n > 1 else 1
    ob = graph_automorphism_group(B).order() if B.n > 1 else 1
    twist = 2 if (not unit and A.n == B.n and graph_certificate(A) == graph_certificate(B)) else 1
    expected = oa * ob * twist
    return {"order": got, "expected": expected, "holds": got == expected}


# the fiber-product cone

def psi1(A: Graph, u: int, v: int) -> int:
    if u == v:
        return 1
    return 2 if A.adj[u] >> v & 1 else 0


def psi2(A: Graph, u: int, v: int) -> int:
    if u == v:
        return 2
    return 1 if A.adj[u] >> v & 1 else 0


def verify_fiber_terminal(cone, G, H) -> list:
    """The mediating map of a cone (W, phi1, phi2) into the product of G and H.

    W is a graph and phi1, phi2 are vertex maps to G and H.  Along each edge
    of W the pair (psi1, psi2) must be (1, 1), (2, 2), or (1, 2) (both ends
    fixed), which is exactly the condition for (phi1, phi2) to preserve
    adjacency in the product.  Returns the map w -> product vertex.
    """
    W, phi1, phi2 = cone
    A, B = _as_graph(G), _as_graph(H)
    W = _as_graph(W)
    if not is_graph_morphism(phi1, W, A) or not is_graph_morphism(phi2, W, B):
        raise DiagramDoesNotCommute("a leg is not a graph morphism")
    for w in range(W.n):
        for w2 in bits(W.adj[w] | (1 << w)):
            pair = (psi1(A, phi1[w], phi1[w2]), psi2(B, phi2[w], phi2[w2]))
            if pair not in ((1, 1), (2, 2), (1, 2)):
                raise DiagramDoesNotCommute(f"edge {w}-{w2} moves both coordinates")
    phi = [phi1[w] * B.n + phi2[w] for w in range(W.n)]
    P = graph_product(A, B)
    if not is_graph_morphism(phi, W, P):
        raise AssertionError("mediating map is not a morphism")
    return phi


def unique_mediating(cone, G, H) -> bool:
    """Any map into the product whose projections are phi1, phi2 equals the mediating one."""
    W, phi1, phi2 = cone
    phi = verify_fiber_terminal(cone, G, H)
    B = _as_graph(H)
    return all(divmod(phi[w], B.n) == (phi1[w], phi2[w]) for w in range(len(phi)))


def power(G: Geometry, n: int) -> Geometry:
    out = G
    for _ in range(n - 1):
        out = cartesian_product(out, G)
    return out


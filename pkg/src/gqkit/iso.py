"""Canonical forms, isomorphisms and automorphism groups of geometries.

The fast path runs nauty (through pynauty) on the two-coloured incidence
graph: points are vertices 0..n-1, lines are vertices n..n+m-1.  An
independent individualization-refinement search written here serves as the
oracle on small cases, and group orders from nauty are re-derived with our
own Schreier-Sims.
"""
from __future__ import annotations

import hashlib
from dataclasses import dataclass

import pynauty

from .errors import DegreeMismatch
from .geometry import Geometry, Graph, bits
from .groups import PermGroup


@dataclass(frozen=True)
class CanonicalCertificate:
    n_points: int
    n_lines: int
    cells: tuple
    cert: bytes

    @property
    def digest(self) -> str:
        h = hashlib.sha256()
        h.update(repr((self.n_points, self.n_lines, self.cells)).encode())
        h.update(self.cert)
        return h.hexdigest()


def _cells(G: Geometry, point_cells, line_cells):
    n = G.n_points
    if point_cells is None:
        point_cells = [range(n)]
    if line_cells is None:
        line_cells = [range(G.n_lines)]
    cells = [set(c) for c in point_cells] + [set(n + j for j in c) for c in line_cells]
    sizes = tuple(len(c) for c in cells)
    covered = sum(sizes)
    if covered != n + G.n_lines:
        raise ValueError("colour cells must partition the points and lines")
    return [c for c in cells if c], sizes


def _nauty_graph(G: Geometry, point_cells=None, line_cells=None):
    n = G.n_points
    adj = {v: [] for v in range(n + G.n_lines)}
    for j, ln in enumerate(G.lines):
        adj[n + j] = list(ln)
    cells, sizes = _cells(G, point_cells, line_cells)
    g = pynauty.Graph(n + G.n_lines, directed=False, adjacency_dict=adj, vertex_coloring=cells)
    return g, sizes


def canonical_form(G: Geometry, point_cells=None, line_cells=None) -> CanonicalCertificate:
    """Exact certificate of the incidence graph with optional extra colour cells.

    Cells are ordered: two geometries get equal certificates iff some
    isomorphism maps cell k to cell k for every k.
    """
    if G.n_points + G.n_lines == 0:
        return CanonicalCertificate(0, 0, (), b"")
    g, sizes = _nauty_graph(G, point_cells, line_cells)
    return CanonicalCertificate(G.n_points, G.n_lines, sizes, pynauty.certificate(g))


def canonical_labeling(G: Geometry, point_cells=None, line_cells=None) -> list:
    if G.n_points + G.n_lines == 0:
        return []
    g, _ = _nauty_graph(G, point_cells, line_cells)
    return list(pynauty.canon_label(g))


@dataclass(frozen=True)
class IsoMap:
    points: tuple
    lines: tuple

    def to_dict(self):
        return {"points": list(self.points), "lines": list(self.lines)}


def are_isomorphic(G: Geometry, H: Geometry, g_cells=None, h_cells=None):
    """An isomorphism G -> H (as an IsoMap), or None.

    ``g_cells`` / ``h_cells`` are optional (point_cells, line_cells) pairs that
    the map must respect cell by cell.
    """
    gp, gl = g_cells or (None, None)
    hp, hl = h_cells or (None, None)
    if (G.n_points, G.n_lines) != (H.n_points, H.n_lines):
        return None
    if canonical_form(G, gp, gl) != canonical_form(H, hp, hl):
        return None
    n, m = G.n_points, G.n_lines
    if n + m == 0:
        return IsoMap((), ())
    lg = canonical_labeling(G, gp, gl)
    lh = canonical_labeling(H, hp, hl)
    f = [0] * (n + m)
    for a, b in zip(lg, lh):
        f[a] = b
    pmap = tuple(f[:n])
    lmap = tuple(x - n for x in f[n:])
    iso = IsoMap(pmap, lmap)
    if not verify_isomorphism(G, H, iso):
        raise AssertionError("canonical labelling produced a non-isomorphism")
    return iso


def verify_isomorphism(G: Geometry, H: Geometry, iso: IsoMap) -> bool:
    if sorted(iso.points) != list(range(H.n_points)) or sorted(iso.lines) != list(range(H.n_lines)):
        return False
    for j, ln in enumerate(G.lines):
        if tuple(sorted(iso.points[p] for p in ln)) != H.lines[iso.lines[j]]:
            return False
    return True


def automorphism_group(G: Geometry, point_cells=None, line_cells=None) -> PermGroup:
    """Type- and cell-preserving automorphisms acting on points 0..n-1 and lines n..n+m-1.

    The generators come from nauty; the order is recomputed by Schreier-Sims
    and compared with nauty's own count.
    """
    deg = G.n_points + G.n_lines
    if deg == 0:
        return PermGroup(0)
    g, _ = _nauty_graph(G, point_cells, line_cells)
    gens, size1, size2, _, _ = pynauty.autgrp(g)
    grp = PermGroup(deg, [tuple(x) for x in gens])
    nauty_order = size1 * 10 ** size2
    own = grp.order()
    if abs(own - nauty_order) > 1e-6 * max(own, 1):
        raise AssertionError(f"group order mismatch: Schreier-Sims {own}, nauty {nauty_order}")
    return grp


def automorphisms(G: Geometry) -> PermGroup:
    return automorphism_group(G)


def point_action(grp: PermGroup, G: Geometry) -> PermGroup:
    return grp.restrict(range(G.n_points))


def line_action(grp: PermGroup, G: Geometry) -> PermGroup:
    return grp.restrict(range(G.n_points, G.n_points + G.n_lines))


def stabilizer_induced(G: Geometry, points=(), lines=()):
    """Setwise stabilizer of a set of points and lines, its action on that set, and the kernel order.

    The induced group acts on the listed points followed by the listed lines.
    """
    points, lines = sorted(set(points)), sorted(set(lines))
    ps, ls = set(points), set(lines)
    pc = [points, [p for p in range(G.n_points) if p not in ps]]
    lc = [lines, [j for j in range(G.n_lines) if j not in ls]]
    stab = automorphism_group(G, pc, lc)
    domain = points + [G.n_points + j for j in lines]
    induced = stab.restrict(domain)
    kernel = stab.order() // induced.order()
    return induced, kernel, stab


# graphs (used by the product engine)

def _graph_nauty(graph: Graph, cells=None):
    adj = {v: [u for u in bits(graph.adj[v]) if u != v] for v in range(graph.n)}
    kw = {"adjacency_dict": adj}
    if cells:
        kw["vertex_coloring"] = [set(c) for c in cells if c]
    return pynauty.Graph(graph.n, directed=False, **kw)


def graph_automorphism_group(graph: Graph) -> PermGroup:
    if graph.n == 0:
        return PermGroup(0)
    gens, s1, s2, _, _ = pynauty.autgrp(_graph_nauty(graph))
    grp = PermGroup(graph.n, [tuple(x) for x in gens])
    if abs(grp.order() - s1 * 10 ** s2) > 1e-6 * grp.order():
        raise AssertionError("group order mismatch")
    return grp


def graph_certificate(graph: Graph) -> bytes:
    if graph.n == 0:
        return b""
    return pynauty.certificate(_graph_nauty(graph))


# independent oracle: individualization-refinement backtracking

def _incidence_adj(G: Geometry) -> list:
    n = G.n_points
    adj = [list(G.point_lines[p]) for p in range(n)]
    adj = [[n + j for j in a] for a in adj]
    adj += [list(ln) for ln in G.lines]
    return adj


def _refine(adj, col):
    k = len(set(col))
    while True:
        sig = [(col[v], tuple(sorted(col[u] for u in adj[v]))) for v in range(len(adj))]
        rank = {s: i for i, s in enumerate(sorted(set(sig)))}
        new = [rank[s] for s in sig]
        if len(rank) == k:
            return new
        k = len(rank)
        col = new


def _search(G: Geometry, H: Geometry, g_colour=None, h_colour=None, find_all=False):
    """Enumerate isomorphisms G -> H as vertex maps of the incidence graphs."""
    if (G.n_points, G.n_lines) != (H.n_points, H.n_lines):
        return []
    N = G.n_points + G.n_lines
    ag, ah = _incidence_adj(G), _incidence_adj(H)
    adj = ag + [[N + u for u in a] for a in ah]
    base_g = [0] * G.n_points + [1] * G.n_lines
    base_h = [0] * H.n_points + [1] * H.n_lines
    if g_colour is not None:
        base_g = [(b, c) for b, c in zip(base_g, g_colour)]
        base_h = [(b, c) for b, c in zip(base_h, h_colour)]
    keys = sorted(set(base_g) | set(base_h))
    col0 = [keys.index(c) for c in base_g + base_h]
    edges_h = {(v, u) for v in range(N) for u in ah[v]}
    found = []

    def balanced(col):
        from collections import Counter
        return Counter(col[:N]) == Counter(col[N:])

    def rec(col):
        col = _refine(adj, col)
        if not balanced(col):
            return False
        cells = {}
        for v in range(N):
            cells.setdefault(col[v], []).append(v)
        target = None
        for c, vs in sorted(cells.items()):
            if len(vs) > 1 and (target is None or len(vs) < len(cells[target])):
                target = c
        if target is None:
            where = {col[N + v]: v for v in range(N)}
            f = [where[col[v]] for v in range(N)]
            if all((f[v], f[u]) in edges_h for v in range(N) for u in ag[v]):
                found.append(tuple(f))
                return not find_all
            return False
        v = cells[target][0]
        fresh = max(col) + 1
        for w in range(N, 2 * N):
            if col[w] != target:
                continue
            c2 = list(col)
            c2[v] = fresh
            c2[w] = fresh
            if rec(c2):
                return True
        return False

    if N == 0:
        return [()]
    rec(col0)
    return found


def backtrack_isomorphism(G: Geometry, H: Geometry):
    res = _search(G, H)
    if not res:
        return None
    f = res[0]
    n = G.n_points
    return IsoMap(tuple(f[:n]), tuple(x - n for x in f[n:]))


def backtrack_automorphism_count(G: Geometry) -> int:
    return len(_search(G, G, find_all=True))


# permutation-group equivalence

def perm_equivalent(P1: PermGroup, P2: PermGroup, colour1=None, colour2=None):
    """A bijection b with b^-1 P1 b = P2 (relabel x -> b[x]), or None.

    Optional colourings restrict b to map colour classes onto equal colours.
    """
    if P1.degree != P2.degree:
        raise DegreeMismatch(f"degrees {P1.degree} and {P2.degree}")
    n = P1.degree
    if P1.order() != P2.order() or P1.orbit_lengths() != P2.orbit_lengths():
        return None
    c1 = P1.cycle_type_counts()
    if c1 is not None and c1 != P2.cycle_type_counts():
        return None
    colour1 = list(colour1) if colour1 is not None else [0] * n
    colour2 = list(colour2) if colour2 is not None else [0] * n
    if sorted(colour1) != sorted(colour2):
        return None
    # orbit pruning is only sound when P2 respects the colouring
    prune = all(colour2[g[x]] == colour2[x] for g in P2.gens for x in range(n))

    def orbit_len_map(grp):
        out = {}
        for o in grp.orbits():
            for x in o:
                out[x] = len(o)
        return out

    def rec(xs, ys, S1, S2, used):
        if len(xs) == n:
            b = [0] * n
            for x, y in zip(xs, ys):
                b[x] = y
            b = tuple(b)
            return b if P1.conjugate(b).same_as(P2) else None
        ol1, ol2 = orbit_len_map(S1), orbit_len_map(S2)
        x = next(z for z in range(n) if z not in set(xs))
        tried = set()
        for y in range(n):
            if y in used or y in tried or colour2[y] != colour1[x] or ol1[x] != ol2[y]:
                continue
            if prune:
                tried.update(S2.orbit(y))
            S1x, S2y = S1.stabilizer([x]), S2.stabilizer([y])
            if S1x.order() != S2y.order():
                continue
            r = rec(xs + [x], ys + [y], S1x, S2y, used | {y})
            if r is not None:
                return r
        return None

    return rec([], [], P1, P2, frozenset())


def is_automorphism(G: Geometry, pmap, lmap) -> bool:
    return verify_isomorphism(G, G, IsoMap(tuple(pmap), tuple(lmap)))


def apply_to_points(g, mask: int) -> int:
    out = 0
    for p in bits(mask):
        out |= 1 << g[p]
    return out


def apply_to_lines(g, G: Geometry, mask: int) -> int:
    n = G.n_points
    out = 0
    for j in bits(mask):
        out |= 1 << (g[n + j] - n)
    return out

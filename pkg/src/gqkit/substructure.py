"""Perps, spans, regularity, symmetry, subquadrangles, hyperplanes, removals,
the two-piece decomposition verifier, trace geometries and complete arcs.

Subsets of points and lines are Python int bitsets over the parent ids.
"""
from __future__ import annotations

import time
from dataclasses import dataclass, field
from itertools import combinations

from .errors import (BudgetExceeded, ConcurrentLines, NotAxiom3, NotOrdered, NotThick, SamePoint,
                     WrongBaseType, WrongOrderShape)
from .geometry import (Geometry, bits, check_axiom3, classify_axiom3_type, detect_order,
                       dualize, induced, mask_of, popcount)


@dataclass(frozen=True)
class AnchoredSubgeometry:
    """A subgeometry (points, lines) of ``parent``.

    The points of an included line are its parent points that are included.
    """
    parent: Geometry = field(compare=False, hash=False, repr=False)
    points: int
    lines: int
    tag: str = field(default="", compare=False)

    @property
    def n_points(self) -> int:
        return popcount(self.points)

    @property
    def n_lines(self) -> int:
        return popcount(self.lines)

    def line_points(self, j: int) -> int:
        return self.parent.line_mask[j] & self.points

    def full_lines(self) -> int:
        G = self.parent
        return mask_of(j for j in bits(self.lines) if G.line_mask[j] & ~self.points == 0)

    def ideal_points(self) -> int:
        G = self.parent
        return mask_of(p for p in bits(self.points)
                       if G.point_line_mask[p] & ~self.lines == 0)

    def is_full(self) -> bool:
        return self.full_lines() == self.lines

    def is_ideal(self) -> bool:
        return self.ideal_points() == self.points

    def is_proper(self) -> bool:
        return (self.points, self.lines) != (self.parent.all_points, self.parent.all_lines)

    def is_subgeometry(self) -> bool:
        return True

    def geometry(self) -> Geometry:
        return induced(self.parent, self.points, self.lines, keep_empty=True)[0]

    def le(self, other: "AnchoredSubgeometry") -> bool:
        return self.points & ~other.points == 0 and self.lines & ~other.lines == 0

    def lt(self, other: "AnchoredSubgeometry") -> bool:
        return self.le(other) and (self.points, self.lines) != (other.points, other.lines)

    def union(self, other) -> "AnchoredSubgeometry":
        return AnchoredSubgeometry(self.parent, self.points | other.points,
                                   self.lines | other.lines)

    def intersection(self, other) -> "AnchoredSubgeometry":
        return AnchoredSubgeometry(self.parent, self.points & other.points,
                                   self.lines & other.lines)

    def retag(self, tag: str) -> "AnchoredSubgeometry":
        return AnchoredSubgeometry(self.parent, self.points, self.lines, tag)

    def to_dict(self) -> dict:
        return {"points": list(bits(self.points)), "lines": list(bits(self.lines)),
                "tag": self.tag}


def anchored(G: Geometry, points=(), lines=(), tag="") -> AnchoredSubgeometry:
    return AnchoredSubgeometry(G, mask_of(points), mask_of(lines), tag)


def whole(G: Geometry) -> AnchoredSubgeometry:
    return AnchoredSubgeometry(G, G.all_points, G.all_lines, "whole")


def full_span(G: Geometry, lines: int) -> AnchoredSubgeometry:
    """Subgeometry consisting of the given lines with all their points."""
    pts = 0
    for j in bits(lines):
        pts |= G.line_mask[j]
    return AnchoredSubgeometry(G, pts, lines)


# perps, traces, spans

def perp(G: Geometry, x: int) -> int:
    return G.coll[x] | (1 << x)


def trace_set(G: Geometry, x: int, y: int) -> int:
    if x == y:
        raise SamePoint("trace needs two distinct points")
    return perp(G, x) & perp(G, y)


def span(G: Geometry, x: int, y: int) -> int:
    if x == y:
        raise SamePoint("span needs two distinct points")
    out = G.all_points
    for z in bits(trace_set(G, x, y)):
        out &= perp(G, z)
    return out


def line_perp(G: Geometry, U: int) -> int:
    """Lines concurrent with U, U included."""
    out = 0
    for p in bits(G.line_mask[U]):
        out |= G.point_line_mask[p]
    return out


def line_trace(G: Geometry, U: int, V: int) -> int:
    return line_perp(G, U) & line_perp(G, V)


def line_span(G: Geometry, U: int, V: int) -> int:
    out = G.all_lines
    for W in bits(line_trace(G, U, V)):
        out &= line_perp(G, W)
    return out


def ideal_perp(G: Geometry, x: int) -> AnchoredSubgeometry:
    """x with all its lines and their points."""
    return full_span(G, G.point_line_mask[x]).retag("ideal perp")


def projection(G: Geometry, x: int, Y: int):
    """The point of Y collinear with x (x off Y), or None when not unique."""
    hit = G.line_mask[Y] & G.coll[x]
    if hit and not hit & (hit - 1):
        return hit.bit_length() - 1
    return None


# regularity

def _order(G: Geometry):
    o = detect_order(G)
    if o is None:
        raise NotOrdered("geometry has no order")
    return o


def is_regular_pair(G: Geometry, U: int, V: int) -> bool:
    """{U,V}^perp and {U,V}^perpperp form a full (s+1) x (s+1) grid."""
    if U == V or G.concurrent(U, V):
        raise ConcurrentLines(f"lines {U} and {V} meet")
    s, _ = _order(G)
    tr = line_trace(G, U, V)
    sp = line_span(G, U, V)
    if popcount(tr) != s + 1 or popcount(sp) != s + 1:
        return False
    return all(G.concurrent(a, b) for a in bits(tr) for b in bits(sp))


def is_regular_line(G: Geometry, U: int) -> bool:
    lp = line_perp(G, U)
    return all(is_regular_pair(G, U, V) for V in range(G.n_lines) if not lp >> V & 1)


def is_regular_point(G: Geometry, x: int) -> bool:
    """Dual notion: |{x,y}^perpperp| = t + 1 for every y opposite x."""
    _, t = _order(G)
    px = perp(G, x)
    for y in range(G.n_points):
        if not px >> y & 1:
            if popcount(trace_set(G, x, y)) != t + 1 or popcount(span(G, x, y)) != t + 1:
                return False
    return True


def full_grid_of_pair(G: Geometry, U: int, V: int):
    if not is_regular_pair(G, U, V):
        return None
    return full_span(G, line_trace(G, U, V) | line_span(G, U, V)).retag("full grid")


def full_grids(G: Geometry) -> list:
    """All full (s+1) x (s+1) grids, one per regular pair, deduplicated and sorted."""
    if detect_order(G) is None:
        return []
    seen = {}
    for U in range(G.n_lines):
        lp = line_perp(G, U)
        for V in range(U + 1, G.n_lines):
            if lp >> V & 1:
                continue
            g = full_grid_of_pair(G, U, V)
            if g is not None and g.lines not in seen:
                seen[g.lines] = g
    return [seen[k] for k in sorted(seen)]


def reguli(G: Geometry, grid_sub: AnchoredSubgeometry):
    """The two reguli of a grid subgeometry as line masks."""
    ls = list(bits(grid_sub.lines))
    first = ls[0]
    r1 = mask_of(j for j in ls if j == first or not G.concurrent(j, first))
    return r1, grid_sub.lines & ~r1


# symmetry

def symmetries_about_line(G: Geometry, U: int):
    """Automorphisms fixing every line concurrent with U."""
    from .iso import automorphism_group
    fixed = list(bits(line_perp(G, U)))
    fixed_set = set(fixed)
    line_cells = [[j] for j in fixed] + [[j for j in range(G.n_lines) if j not in fixed_set]]
    return automorphism_group(G, None, line_cells)


def is_axis_of_symmetry(G: Geometry, U: int) -> bool:
    others = line_perp(G, U) & ~(1 << U)
    if not others:
        return False
    V = (others & -others).bit_length() - 1
    pts = list(bits(G.line_mask[V] & ~G.line_mask[U]))
    if not pts:
        return False
    grp = symmetries_about_line(G, U)
    return set(grp.orbit(pts[0])) >= set(pts)


def is_translation_point(G: Geometry, u: int) -> bool:
    o = detect_order(G)
    if o is None or o.s < 2 or o.t < 2:
        raise NotThick("translation points are defined for thick quadrangles")
    return all(is_axis_of_symmetry(G, U) for U in G.point_lines[u])


# closures

def projection_closure(G: Geometry, points: int, lines: int, full: bool = True,
                       ideal: bool = False, stop_points: int = 0):
    """Smallest (points, lines) containing the input and closed under projection.

    For x included and Y included with x off Y, the projection z of x on Y and
    the line xz are added.  ``full`` adds all points of every included line,
    ``ideal`` adds all lines through every included point.  The search stops
    early when a point of ``stop_points`` is reached.  Returns (points, lines).
    """
    lm, plm, coll = G.line_mask, G.point_line_mask, G.coll
    P, L = 0, 0
    newp, newl = points, lines
    while newp or newl:
        if full:
            for j in bits(newl & ~L):
                newp |= lm[j]
        if ideal:
            for p in bits(newp & ~P):
                newl |= plm[p]
            if full:
                for j in bits(newl & ~L):
                    newp |= lm[j]
        newp &= ~P
        newl &= ~L
        oldP, oldL = P, L
        P |= newp
        L |= newl
        if stop_points and P & stop_points:
            return P, L
        addp, addl = 0, 0
        # new points against all lines, old points against new lines
        for x in bits(newp):
            cx = coll[x]
            for Y in bits(L & ~plm[x]):
                hit = lm[Y] & cx
                z = hit.bit_length() - 1
                if not P >> z & 1:
                    addp |= 1 << z
                lxz = plm[x] & plm[z]
                if not L >> (lxz.bit_length() - 1) & 1:
                    addl |= lxz
        for Y in bits(newl):
            for x in bits(oldP & ~lm[Y]):
                hit = lm[Y] & coll[x]
                z = hit.bit_length() - 1
                if not P >> z & 1:
                    addp |= 1 << z
                lxz = plm[x] & plm[z]
                if not L >> (lxz.bit_length() - 1) & 1:
                    addl |= lxz
        newp, newl = addp, addl
    return P, L


def is_axiom3_sub(G: Geometry, points: int, lines: int) -> bool:
    sub = induced(G, points, lines, keep_empty=True)[0]
    return bool(check_axiom3(sub))


@dataclass
class SearchResult:
    items: list
    complete: bool
    explored: int = 0
    note: str = ""


def thick_full_subgqs(G: Geometry, max_results: int | None = None,
                      budget: float | None = None) -> SearchResult:
    """Proper thick full subquadrangles.

    A full subquadrangle of order (s, t') in a GQ of order (s, t) has
    t >= s t' when proper, so nothing thick exists when t < 2s.  Otherwise
    every candidate contains two opposite lines U, V and a third line W on a
    point of U outside the closure of {U, V}; closures of such triples are
    grown one meeting line at a time, deduplicated by point set.
    """
    o = detect_order(G)
    if o is None or o.s < 2 or o.t < 2:
        return SearchResult([], True, 0, "not thick")
    s, t = o
    if t < 2 * s:
        return SearchResult([], True, 0, "t < 2s excludes proper thick full subquadrangles")
    start = time.monotonic()
    found = {}
    seen = set()
    explored = 0
    lm = G.line_mask

    def record(P, L):
        key = P
        if key in found:
            return
        sub = AnchoredSubgeometry(G, P, L, "thick full subGQ")
        geo = sub.geometry()
        oo = detect_order(geo)
        if oo is not None and oo.s == s and 2 <= oo.t < t and check_axiom3(geo):
            found[key] = sub

    # the first line of any subGQ containing line 0's orbit is arbitrary, so all U are tried
    for U in range(G.n_lines):
        lpU = line_perp(G, U)
        for V in range(U + 1, G.n_lines):
            if lpU >> V & 1:
                continue
            P0, L0 = projection_closure(G, lm[U] | lm[V], (1 << U) | (1 << V))
            if P0 == G.all_points:
                continue
            for x in bits(lm[U]):
                for W in bits(G.point_line_mask[x] & ~L0):
                    P, L = projection_closure(G, P0, L0 | (1 << W))
                    explored += 1
                    if P in seen:
                        continue
                    seen.add(P)
                    if P != G.all_points:
                        record(P, L)
                        # grow by one more line through a point of the closure
                        stack = [(P, L)]
                        while stack:
                            PP, LL = stack.pop()
                            for y in bits(PP):
                                for W2 in bits(G.point_line_mask[y] & ~LL):
                                    P2, L2 = projection_closure(G, PP, LL | (1 << W2))
                                    explored += 1
                                    if P2 in seen or P2 == G.all_points:
                                        continue
                                    seen.add(P2)
                                    record(P2, L2)
                                    stack.append((P2, L2))
                    if max_results and len(found) >= max_results:
                        items = [found[k] for k in sorted(found)]
                        return SearchResult(items, False, explored, "max_results reached")
                    if budget is not None and time.monotonic() - start > budget:
                        items = [found[k] for k in sorted(found)]
                        raise BudgetExceeded("subquadrangle search budget exhausted",
                                             SearchResult(items, False, explored))
    return SearchResult([found[k] for k in sorted(found)], True, explored)


# hyperplanes

def is_geometric_hyperplane(G: Geometry, points: int) -> bool:
    """Every line lies in the set or meets it in exactly one point."""
    for m in G.line_mask:
        c = m & points
        if c != m and (c == 0 or c & (c - 1)):
            return False
    return True


def hyperplane_lines(G: Geometry, points: int) -> int:
    return mask_of(j for j, m in enumerate(G.line_mask) if m & ~points == 0)


def ovoids(G: Geometry, limit: int | None = None, budget: float | None = None) -> SearchResult:
    """Point sets meeting every line exactly once, by exact-cover backtracking.

    Columns are lines, rows are points.  The branching column is the line with
    fewest live candidates, lowest id first.
    """
    start = time.monotonic()
    lm, plm, coll = G.line_mask, G.point_line_mask, G.coll
    out = []
    nodes = [0]
    stopped = [False]

    def rec(chosen, covered, live):
        nodes[0] += 1
        if budget is not None and nodes[0] % 1000 == 0 and time.monotonic() - start > budget:
            stopped[0] = True
        if stopped[0] or (limit is not None and len(out) >= limit):
            return
        uncovered = G.all_lines & ~covered
        if not uncovered:
            out.append(chosen)
            return
        best, bestc = None, None
        for j in bits(uncovered):
            c = lm[j] & live
            k = popcount(c)
            if k == 0:
                return
            if best is None or k < popcount(bestc):
                best, bestc = j, c
                if k == 1:
                    break
        for p in bits(bestc):
            rec(chosen | (1 << p), covered | plm[p], live & ~coll[p] & ~(1 << p))
            live &= ~(1 << p)

    rec(0, 0, G.all_points)
    items = sorted(out)
    if stopped[0]:
        raise BudgetExceeded("ovoid search budget exhausted", SearchResult(items, False, nodes[0]))
    complete = limit is None or len(items) < limit
    return SearchResult(items, complete, nodes[0])


def geometric_hyperplanes(G: Geometry, budget: float | None = None,
                          ovoid_limit: int | None = None) -> list:
    """(AnchoredSubgeometry, kind) for ovoids, subquadrangles of order (s, t/s) and maximal perps."""
    s, t = _order(G)
    out = []
    if s >= 1 and t <= s * s:
        for ov in ovoids(G, ovoid_limit, budget).items:
            out.append((AnchoredSubgeometry(G, ov, 0, "ovoid"), "Ovoid"))
    if s > 0 and t % s == 0:
        tt = t // s
        if tt == 1:
            cands = full_grids(G)
        elif tt >= 2:
            cands = thick_full_subgqs(G, budget=budget).items
        else:
            cands = []
        for sub in cands:
            o = detect_order(sub.geometry())
            if o is not None and (o.s, o.t) == (s, tt) and is_geometric_hyperplane(G, sub.points):
                out.append((sub.retag("subGQ hyperplane"), "SubGQ"))
    for x in range(G.n_points):
        sub = ideal_perp(G, x)
        if is_geometric_hyperplane(G, sub.points):
            out.append((sub.retag("maximal perp"), "MaxPerp"))
    return out


# removal

def remove_closed(G: Geometry, S: AnchoredSubgeometry) -> Geometry:
    """The remnant G minus S.

    Points of S go away; lines of S go away.  A remaining line keeps its
    surviving points.  A remaining line with no survivors becomes an
    ``empty_line`` marker, one with a single survivor a ``hairy`` marker;
    neither is a line of the remnant.  ``meta`` records parent ids.
    """
    keep = G.all_points & ~S.points
    pts = list(bits(keep))
    index = {p: i for i, p in enumerate(pts)}
    lines, kept, markers = [], [], []
    for j in range(G.n_lines):
        if S.lines >> j & 1:
            continue
        surv = [index[p] for p in G.lines[j] if keep >> p & 1]
        if len(surv) == 0:
            markers.append(("empty_line", j))
        elif len(surv) == 1:
            markers.append(("hairy", j, surv[0]))
        else:
            lines.append(surv)
            kept.append(j)
    pl = [G.point_labels[p] for p in pts] if G.point_labels is not None else None
    ll = [G.line_labels[j] for j in kept] if G.line_labels is not None else None
    meta = {"name": f"{G.meta.get('name', 'X')} minus {S.tag or 'closed set'}",
            "parent_points": pts, "parent_lines": kept}
    return Geometry(len(pts), lines, pl, ll, meta, markers)


# decomposition verifier

@dataclass
class DecompositionVerdict:
    decomposable: bool
    case_tag: str
    gamma1: tuple | None = None
    gamma2: tuple | None = None
    checked: int = 0
    shapes: tuple = ()
    dual: bool = False

    def to_dict(self) -> dict:
        d = {"decomposable": self.decomposable, "case": self.case_tag,
             "candidates_checked": self.checked, "shapes": list(self.shapes),
             "found_on_dual": self.dual}
        if self.gamma1 is not None:
            d["gamma1"] = {"points": list(bits(self.gamma1[0])), "lines": list(bits(self.gamma1[1]))}
            d["gamma2"] = {"points": list(bits(self.gamma2[0])), "lines": list(bits(self.gamma2[1]))}
        return d


def _complement_closure(G: Geometry, P2: int, L2: int):
    """Smallest axiom-(3) subgeometry containing every element outside (P2, L2)."""
    P1, L1 = projection_closure(G, G.all_points & ~P2, G.all_lines & ~L2, full=False)
    return P1, L1


def _full_line_candidates(G: Geometry, thin: bool):
    """Candidate second pieces with only full lines, in search order, as (shape, points, lines)."""
    s, t = detect_order(G)
    cands = []
    if not thin:
        for sub in thick_full_subgqs(G).items:
            cands.append(("thick full subGQ", sub.points, sub.lines))
        for g in full_grids(G):
            if (g.points, g.lines) != (G.all_points, G.all_lines):
                cands.append(("full grid", g.points, g.lines))
    perps = []
    for x in range(G.n_points):
        ls = G.point_lines[x]
        for k in range(len(ls), 1, -1):
            for sel in combinations(ls, k):
                sub = full_span(G, mask_of(sel))
                perps.append(("perp", sub.points, sub.lines))
    singles = [("line", G.line_mask[j], 1 << j) for j in range(G.n_lines)]
    if thin:
        cands += perps + singles
        # (s+1) x r subgrids sharing the full regulus: drop a nonempty set of lines from the other
        if t == 1:
            g = full_span(G, G.all_lines)
            r1, r2 = reguli(G, g)
            for keep_r, drop_r in ((r1, r2), (r2, r1)):
                dl = list(bits(drop_r))
                for k in range(1, len(dl)):
                    for sel in combinations(dl, k):
                        L = keep_r | (drop_r & ~mask_of(sel))
                        cands.append(("subgrid", full_span(G, L).points, L))
    else:
        cands += perps + singles
    return cands


def _case_tag(G: Geometry, shape: str, P2: int, L2: int) -> str:
    s, t = detect_order(G)
    if t == 1:
        return {"subgrid": "(i)", "line": "(ii)", "perp": "(iii)"}.get(shape, "(i)")
    if (s, t) == (2, 2):
        return "(vii)"
    return "other"


def decomposition_verdict(G: Geometry, dual_search: bool = True) -> DecompositionVerdict:
    """Search for G = G1 u G2 with G1, G2 proper distinct axiom-(3) subgeometries.

    The second piece ranges over the shapes allowed when it has only full
    lines (thick full subGQs, full grids, partial perps, single lines, and for
    grids the subgrids sharing a regulus); the dual search covers pieces with
    only ideal points.  The first piece is the least axiom-(3) subgeometry
    containing the complement, so a candidate works iff that closure is proper.
    """
    o = detect_order(G)
    if o is None or o.s < 1 or o.t < 1:
        raise NotOrdered("decomposition needs a quadrangle with an order")
    if not check_axiom3(G):
        raise NotAxiom3("decomposition needs axiom (3)")
    s, t = o
    if s == 1 and t > 1:
        dv = decomposition_verdict(dualize(G), dual_search=False)
        if dv.decomposable:
            dmap = {"(i)": "(iv)", "(ii)": "(v)", "(iii)": "(vi)"}
            g1 = (dv.gamma1[1], dv.gamma1[0])
            g2 = (dv.gamma2[1], dv.gamma2[0])
            return DecompositionVerdict(True, dmap.get(dv.case_tag, dv.case_tag), g1, g2,
                                        dv.checked, dv.shapes, True)
        return DecompositionVerdict(False, "Primal", None, None, dv.checked, dv.shapes, True)
    thin = t == 1
    checked = 0
    shapes = []
    for shape, P2, L2 in _full_line_candidates(G, thin):
        checked += 1
        if shape not in shapes:
            shapes.append(shape)
        P1, L1 = _complement_closure(G, P2, L2)
        if (P1, L1) == (G.all_points, G.all_lines) or (P1, L1) == (P2, L2):
            continue
        if not is_axiom3_sub(G, P1, L1) or not is_axiom3_sub(G, P2, L2):
            continue
        return DecompositionVerdict(True, _case_tag(G, shape, P2, L2), (P1, L1), (P2, L2),
                                    checked, tuple(shapes))
    if dual_search:
        D = dualize(G)
        for shape, P2, L2 in _full_line_candidates(D, detect_order(D).t == 1):
            checked += 1
            if "dual " + shape not in shapes:
                shapes.append("dual " + shape)
            P1, L1 = _complement_closure(D, P2, L2)
            if (P1, L1) == (D.all_points, D.all_lines) or (P1, L1) == (P2, L2):
                continue
            if not is_axiom3_sub(D, P1, L1) or not is_axiom3_sub(D, P2, L2):
                continue
            tag = _case_tag(G, shape, P2, L2)
            return DecompositionVerdict(True, tag, (L1, P1), (L2, P2), checked, tuple(shapes), True)
    return DecompositionVerdict(False, "Primal", None, None, checked, tuple(shapes))


def verify_decomposition(G: Geometry, v: DecompositionVerdict) -> bool:
    """Both pieces proper, distinct, satisfy axiom (3), and cover every element."""
    if not v.decomposable:
        return False
    (P1, L1), (P2, L2) = v.gamma1, v.gamma2
    if (P1 | P2, L1 | L2) != (G.all_points, G.all_lines):
        return False
    if (P1, L1) == (P2, L2):
        return False
    for P, L in ((P1, L1), (P2, L2)):
        if (P, L) == (G.all_points, G.all_lines) or not is_axiom3_sub(G, P, L):
            return False
    return True


# trace geometries

@dataclass
class TraceGeometry:
    base: AnchoredSubgeometry
    kind: str
    geometry: Geometry
    line_types: tuple
    externals: tuple
    base_points: tuple


def base_type(G: Geometry, T: AnchoredSubgeometry) -> str:
    """'a' partial ovoid, 'b' full perp with a base point, 'c' full grid."""
    if T.lines == 0:
        pts = list(bits(T.points))
        if len(pts) >= 2 and all(not G.coll[x] >> y & 1 for x, y in combinations(pts, 2)):
            return "a"
        raise WrongBaseType("point set is not a partial ovoid with at least two points")
    if not T.is_full():
        raise WrongBaseType("trace bases must have full lines")
    common = T.points
    for j in bits(T.lines):
        common &= G.line_mask[j]
    if common and full_span(G, T.lines).points == T.points:
        return "b"
    geo = T.geometry()
    try:
        tag = classify_axiom3_type(geo)
    except Exception:
        tag = None
    if tag is not None and tag.kind in ("Grid", "ThinGQ") and (tag.kind == "Grid" or tag.params[1] == 1):
        return "c"
    raise WrongBaseType(f"unsupported trace base {tag}")


def trace_geometry(T: AnchoredSubgeometry, X: Geometry | None = None) -> TraceGeometry:
    """Points of T; lines: T's own lines (type i) and the sets v^perp n T, v outside T (type ii)."""
    G = X if X is not None else T.parent
    kind = base_type(G, T)
    pts = list(bits(T.points))
    index = {p: i for i, p in enumerate(pts)}
    lines, types, ext = [], [], []
    seen = {}
    for j in bits(T.lines):
        m = G.line_mask[j] & T.points
        seen[m] = len(lines)
        lines.append([index[p] for p in bits(m)])
        types.append("i")
        ext.append(())
    sub = {}
    for v in range(G.n_points):
        if T.points >> v & 1:
            continue
        m = perp(G, v) & T.points
        if popcount(m) < 2 or m in seen:
            continue
        sub.setdefault(m, []).append(v)
    for m in sorted(sub):
        lines.append([index[p] for p in bits(m)])
        types.append("ii")
        ext.append(tuple(sub[m]))
    geo = Geometry(len(pts), lines, None, [f"{ty}" for ty in types],
                   {"name": f"Tr({kind})"})
    return TraceGeometry(T, kind, geo, tuple(types), tuple(ext), tuple(pts))


def trace_type_exclusion(s: int) -> bool:
    """Sizes that keep perp-type and grid-type trace geometries apart for finite order s."""
    return s * s + 1 != (s + 1) * s + 1 and s * s + 1 != (s + 1) ** 2


# complete dual grids and arcs

@dataclass(frozen=True)
class DualGridWitness:
    small: tuple
    large: tuple


def _common_neighbours(G: Geometry, pts) -> int:
    m = G.all_points
    for p in pts:
        m &= G.coll[p]
    return m


def _pairwise_noncollinear(G: Geometry, pts) -> bool:
    return all(not G.coll[a] >> b & 1 for a, b in combinations(pts, 2))


def complete_dual_grids(G: Geometry, limit: int | None = None) -> list:
    """Complete dual (s-1) x (s+1) grids in a GQ of order (s, s).

    R is an (s-1)-set of pairwise noncollinear points, R' an (s+1)-set of
    pairwise noncollinear points collinear with all of R, and the points
    collinear with all of R' are exactly R.
    """
    o = detect_order(G)
    if o is None or o.s != o.t or o.s < 2:
        raise WrongOrderShape("complete dual grids need a thick GQ of order (s, s)")
    s = o.s
    out = []
    for R in combinations(range(G.n_points), s - 1):
        if not _pairwise_noncollinear(G, R):
            continue
        C = list(bits(_common_neighbours(G, R)))
        for Rp in combinations(C, s + 1):
            if not _pairwise_noncollinear(G, Rp):
                continue
            if _common_neighbours(G, Rp) == mask_of(R):
                out.append(DualGridWitness(tuple(R), tuple(Rp)))
                if limit and len(out) >= limit:
                    return out
    return out


def arc_from_dual_grid(G: Geometry, D: DualGridWitness):
    """(arc point mask, associated full grid line mask)."""
    small = mask_of(D.small)
    grid_lines = 0
    for p in D.large:
        for j in G.point_lines[p]:
            if not G.line_mask[j] & small:
                grid_lines |= 1 << j
    grid_pts = full_span(G, grid_lines).points
    dg = small | mask_of(D.large)
    near = dg
    for p in bits(dg):
        near |= G.coll[p]
    arc = G.all_points & ~grid_pts & ~near
    return arc, grid_lines


def dual_grid_classes(G: Geometry, witnesses=None) -> int:
    """Number of Aut(G)-orbits on complete dual grids."""
    from .iso import automorphism_group
    ws = witnesses if witnesses is not None else complete_dual_grids(G)
    key = lambda D: (frozenset(D.small), frozenset(D.large))
    todo = {key(D) for D in ws}
    gens = automorphism_group(G).gens
    classes = 0
    while todo:
        start = todo.pop()
        classes += 1
        queue = [start]
        seen = {start}
        for a, b in queue:
            for g in gens:
                img = (frozenset(g[x] for x in a), frozenset(g[x] for x in b))
                if img not in seen:
                    seen.add(img)
                    todo.discard(img)
                    queue.append(img)
    return classes


def arc_report(G: Geometry, limit: int | None = None) -> dict:
    """Sizes and completeness of the arcs built from complete dual grids."""
    s = detect_order(G).s
    sizes, complete = [], []
    for D in complete_dual_grids(G, limit):
        a, _ = arc_from_dual_grid(G, D)
        sizes.append(popcount(a))
        complete.append(is_complete_arc(G, a))
    return {"dual_grids": len(sizes), "sizes": sorted(set(sizes)),
            "s2_minus_s": s * s - s, "s2_minus_1": s * s - 1, "complete": sorted(set(complete))}


def is_complete_arc(G: Geometry, A: int) -> bool:
    """Pairwise noncollinear and not extendable by any further point."""
    pts = list(bits(A))
    if not _pairwise_noncollinear(G, pts):
        return False
    near = A
    for p in pts:
        near |= G.coll[p]
    return near == G.all_points


# trimmed grids

def trimmed_grid(G: Geometry, grid_sub: AnchoredSubgeometry, drop1, drop2) -> AnchoredSubgeometry:
    """Remove the given lines of each regulus together with their points."""
    gone_pts = 0
    for j in list(drop1) + list(drop2):
        gone_pts |= G.line_mask[j]
    L = grid_sub.lines & ~mask_of(list(drop1) + list(drop2))
    return AnchoredSubgeometry(G, grid_sub.points & ~gone_pts, L, "trimmed grid")


def _trimmings(G: Geometry, g: AnchoredSubgeometry, m: int):
    r1, r2 = reguli(G, g)
    for d1 in combinations(list(bits(r1)), m):
        for d2 in combinations(list(bits(r2)), m):
            yield d1, d2, trimmed_grid(G, g, d1, d2)


def fullgr_report(G: Geometry, m_values=None) -> dict:
    """Search for ideal subquadrangles containing a trimmed full grid as a full grid.

    Any such subquadrangle contains the least ideal subgeometry closed under
    projection that contains the trimmed grid.  When that closure reaches a
    removed point of one of the grid's lines the case is settled; otherwise the
    closure itself is the candidate and is classified as thick or thin.
    """
    s, _ = _order(G)
    m_values = m_values or range(1, s)
    cases = thick = thin = 0
    examples = []
    for g in full_grids(G):
        for m in m_values:
            for d1, d2, tg in _trimmings(G, g, m):
                removed_on_lines = 0
                for j in bits(tg.lines):
                    removed_on_lines |= G.line_mask[j] & ~tg.points
                P, L = projection_closure(G, tg.points, 0, full=False, ideal=True,
                                          stop_points=removed_on_lines)
                cases += 1
                if P & removed_on_lines:
                    continue
                geo = induced(G, P, L, keep_empty=True)[0]
                o = detect_order(geo)
                if o is None or not check_axiom3(geo):
                    continue
                if o.s >= 2 and o.t >= 2:
                    thick += 1
                else:
                    thin += 1
                if len(examples) < 3:
                    examples.append({"grid_lines": list(bits(g.lines)), "m": m,
                                     "order": (o.s, o.t), "points": list(bits(P))})
    return {"cases": cases, "thick": thick, "thin": thin, "examples": examples}


def subgr_report(G: Geometry) -> dict:
    """For trimmed grids with s + 1 - m > m, look for subquadrangles keeping them full.

    Candidates are closures of the trimmed grid together with one more line
    of G (restricted to the closure).  Returns counts of thick and thin
    subquadrangles found that contain the trimmed grid as a full grid.
    """
    s, _ = _order(G)
    thick = thin = cases = 0
    examples = []
    for g in full_grids(G):
        for m in range(1, s + 1):
            if s + 1 - m <= m:
                continue
            for d1, d2, tg in _trimmings(G, g, m):
                cases += 1
                seen = set()
                removed_on_lines = 0
                for j in bits(tg.lines):
                    removed_on_lines |= G.line_mask[j] & ~tg.points
                for W in range(G.n_lines):
                    if tg.lines >> W & 1:
                        continue
                    for extra in bits(G.line_mask[W] & ~removed_on_lines):
                        P, L = projection_closure(G, tg.points | (1 << extra), tg.lines | (1 << W),
                                                  full=False, stop_points=removed_on_lines)
                        if (P, L) in seen:
                            continue
                        seen.add((P, L))
                        if any(G.line_mask[j] & P != G.line_mask[j] & tg.points for j in bits(tg.lines)):
                            continue
                        geo = induced(G, P, L, keep_empty=True)[0]
                        o = detect_order(geo)
                        if o is None or not check_axiom3(geo):
                            continue
                        if o.s >= 2 and o.t >= 2:
                            thick += 1
                        else:
                            thin += 1
                            if len(examples) < 3:
                                examples.append({"grid_lines": list(bits(g.lines)), "m": m,
                                                 "order": (o.s, o.t), "points": list(bits(P))})
    return {"cases": cases, "thick": thick, "thin": thin, "examples": examples}

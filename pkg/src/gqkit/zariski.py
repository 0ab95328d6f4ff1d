"""Primal subgeometries, closed sets, spectra and Krull dimension.

A primal subgeometry is one of: a point, a full line, the lines through a
point of a full subquadrangle (at least two of them), a full grid, or a
proper thick full subquadrangle.  Closed sets are down-sets C(S) of primal
subgeometries contained in an ideal subgeometry S.
"""
from __future__ import annotations

import time
from dataclasses import dataclass, field

from .errors import BudgetExceeded, NotAHyperplane, NotIdeal
from .geometry import Geometry, bits, check_axiom3, detect_order, popcount
from .substructure import (AnchoredSubgeometry, decomposition_verdict, full_grids, full_span,
                           hyperplane_lines, is_geometric_hyperplane, remove_closed,
                           thick_full_subgqs)

TAGS = ("Empty", "OrdinaryPoint", "FullLine", "PerpInFullSub", "FullGrid", "ThickFullSubGQ")


@dataclass
class PrimeList:
    items: list
    complete: bool
    excluded_22: list = field(default_factory=list)

    def tags(self) -> set:
        return {s.tag for s in self.items}


def _is_whole(G: Geometry, sub: AnchoredSubgeometry) -> bool:
    return (sub.points, sub.lines) == (G.all_points, G.all_lines)


def full_subquadrangles(X: Geometry, budget=None):
    """Full subquadrangles with an order: X itself, full grids, thick full subGQs.

    Returns (list of AnchoredSubgeometry, complete flag).
    """
    o = detect_order(X)
    if o is None:
        return [], True
    subs = [AnchoredSubgeometry(X, X.all_points, X.all_lines, "whole")]
    grids = [g for g in full_grids(X) if not _is_whole(X, g)]
    complete = True
    try:
        thick = thick_full_subgqs(X, budget=budget)
        thick_items, complete = thick.items, thick.complete
    except BudgetExceeded as e:
        thick_items, complete = e.partial.items, False
    return subs + grids + thick_items, complete


def primal_subgeometries(X: Geometry, include_22: bool = False, budget=None) -> PrimeList:
    """All proper primal subgeometries of X, deterministic order, deduplicated.

    Thick subquadrangles of order (2, 2) are not primal; they are returned in
    ``excluded_22`` and join ``items`` only when ``include_22`` is set.
    """
    start = time.monotonic()
    out = [AnchoredSubgeometry(X, 0, 0, "Empty")]
    seen = {(0, 0)}

    def add(sub, tag):
        key = (sub.points, sub.lines)
        if key in seen or _is_whole(X, sub):
            return
        seen.add(key)
        out.append(sub.retag(tag))

    for p in range(X.n_points):
        add(AnchoredSubgeometry(X, 1 << p, 0), "OrdinaryPoint")
    for j in range(X.n_lines):
        add(AnchoredSubgeometry(X, X.line_mask[j], 1 << j), "FullLine")
    subs, complete = full_subquadrangles(X, budget)
    for S in subs:
        for x in bits(S.points):
            ls = X.point_line_mask[x] & S.lines
            if popcount(ls) >= 2:
                add(full_span(X, ls), "PerpInFullSub")
        if budget is not None and time.monotonic() - start > budget:
            raise BudgetExceeded("primal enumeration budget exhausted", PrimeList(out, False))
    excluded = []
    for S in subs[1:]:
        o = detect_order(S.geometry())
        if o.t == 1:
            add(S, "FullGrid")
        elif (o.s, o.t) == (2, 2):
            excluded.append(S.retag("ThickFullSubGQ"))
            if include_22:
                add(S, "ThickFullSubGQ")
        else:
            add(S, "ThickFullSubGQ")
    return PrimeList(out, complete, excluded)


def is_primal(X: Geometry) -> bool:
    """Whether X itself is primal, i.e. a generic point of its own spectrum."""
    if X.n_points == 0:
        return True
    o = detect_order(X)
    if o is None or o.s < 1 or o.t < 1 or not check_axiom3(X):
        return (X.n_points == 1 and X.n_lines == 0) or \
            (X.n_lines == 1 and X.n_points == len(X.lines[0]))
    if o.t == 1:
        return True
    if (o.s, o.t) == (2, 2):
        return False
    return not decomposition_verdict(X).decomposable


def generic_point(X: Geometry):
    return AnchoredSubgeometry(X, X.all_points, X.all_lines, "generic point") if is_primal(X) else None


def is_ideal_subgeometry(S: AnchoredSubgeometry) -> bool:
    return S.is_full()


@dataclass
class ClosedSet:
    generator: AnchoredSubgeometry
    members: list

    def contains(self, p: AnchoredSubgeometry) -> bool:
        return any((m.points, m.lines) == (p.points, p.lines) for m in self.members)

    def keys(self) -> set:
        return {(m.points, m.lines) for m in self.members}


def closed_set(S: AnchoredSubgeometry, X: Geometry | None = None, primes: PrimeList | None = None) -> ClosedSet:
    X = X if X is not None else S.parent
    if not is_ideal_subgeometry(S):
        raise NotIdeal("closed sets are generated by subgeometries with full lines")
    primes = primes or primal_subgeometries(X)
    items = list(primes.items)
    g = generic_point(X)
    if g is not None:
        items.append(g)
    return ClosedSet(S, [p for p in items if p.le(S)])


def membership(p: AnchoredSubgeometry, C: ClosedSet) -> bool:
    return C.contains(p)


# chains

@dataclass
class KrullResult:
    chain: list
    dimension: int
    exact: bool
    nodes: int

    def to_dict(self) -> dict:
        return {"dimension": self.dimension, "exact": self.exact, "nodes": self.nodes,
                "chain": [{"tag": c.tag, "points": popcount(c.points), "lines": popcount(c.lines)}
                          for c in self.chain]}


def longest_chain(nodes: list, top: AnchoredSubgeometry) -> list:
    """Longest strictly increasing chain of nodes ending at ``top``."""
    order = sorted(range(len(nodes)),
                   key=lambda i: (popcount(nodes[i].points) + popcount(nodes[i].lines),
                                  nodes[i].points, nodes[i].lines))
    nodes = [nodes[i] for i in order]
    best = [0] * len(nodes)
    prev = [-1] * len(nodes)
    for i, a in enumerate(nodes):
        for j in range(i):
            b = nodes[j]
            if best[j] + 1 > best[i] and b.lt(a):
                best[i], prev[i] = best[j] + 1, j
    top_best, top_prev = 0, -1
    for j, b in enumerate(nodes):
        if b.lt(top) and best[j] + 1 > top_best:
            top_best, top_prev = best[j] + 1, j
    chain = [top]
    k = top_prev
    while k >= 0:
        chain.append(nodes[k])
        k = prev[k]
    return chain[::-1]


def krull_dimension(X: Geometry, budget=None, include_22: bool = False) -> KrullResult:
    """Longest chain of nonempty primal subgeometries ending at X.

    Thick (2, 2) subquadrangles join the poset only with ``include_22``.
    The result is exact when every enumeration finished.
    """
    try:
        pl = primal_subgeometries(X, include_22=include_22, budget=budget)
        complete = pl.complete
    except BudgetExceeded as e:
        pl, complete = e.partial, False
    nodes = [p for p in pl.items if p.tag != "Empty"]
    top = AnchoredSubgeometry(X, X.all_points, X.all_lines, "whole")
    chain = longest_chain(nodes, top)
    return KrullResult(chain, len(chain) - 1, complete, len(nodes))


# spectra

@dataclass
class SpecView:
    """Spectrum of X, or of X minus a removed closed set with the subspace topology."""
    X: Geometry
    kind: str
    removed: AnchoredSubgeometry | None
    primes: PrimeList

    def members(self) -> list:
        items = [p for p in self.primes.items if p.tag != "Empty"]
        g = generic_point(self.X)
        if g is not None:
            items.append(g)
        if self.removed is None:
            return items
        return [p for p in items if not p.le(self.removed)]

    def closure(self, p: AnchoredSubgeometry) -> list:
        return [q for q in self.members() if q.le(p)]

    def is_member(self, p: AnchoredSubgeometry) -> bool:
        return any((q.points, q.lines) == (p.points, p.lines) for q in self.members())

    def maximal(self) -> list:
        ms = self.members()
        return [p for p in ms if not any(p.lt(q) for q in ms)]

    def subspace_irreducible(self) -> bool:
        return len(self.maximal()) == 1

    def remnant(self) -> Geometry:
        if self.removed is None:
            return self.X
        return remove_closed(self.X, self.removed)

    def remnant_irreducible(self) -> bool:
        """Irreducibility of the remnant's own spectrum (a unique maximal prime)."""
        return _intrinsically_irreducible(self.remnant())

    def krull(self) -> KrullResult:
        nodes = [p for p in self.members() if not _is_whole(self.X, p)]
        top = AnchoredSubgeometry(self.X, self.X.all_points, self.X.all_lines, "whole")
        chain = longest_chain(nodes, top)
        return KrullResult(chain, len(chain) - 1, self.primes.complete, len(nodes))

    def affine_chain(self) -> list:
        """The best chain with each member cut down to the open part."""
        if self.removed is None:
            return self.krull().chain
        out = []
        for p in self.krull().chain:
            pts = p.points & ~self.removed.points
            lines = p.lines & ~self.removed.lines
            out.append(AnchoredSubgeometry(self.X, pts, lines, p.tag))
        return out


def spec_view(X: Geometry, kind: str = "PROJ", removed=None, include_22: bool = False) -> SpecView:
    kind = kind.upper()
    if kind == "PROJ":
        removed = None
    elif kind == "AFF":
        pts = removed.points if isinstance(removed, AnchoredSubgeometry) else removed
        if not is_geometric_hyperplane(X, pts):
            raise NotAHyperplane("the removed set is not a geometric hyperplane")
        removed = AnchoredSubgeometry(X, pts, hyperplane_lines(X, pts), "hyperplane")
    elif kind == "QUAS":
        if not isinstance(removed, AnchoredSubgeometry) or not removed.is_full():
            raise NotIdeal("quasi-projective views remove a closed set with full lines")
    else:
        raise ValueError(f"unknown spectrum kind {kind}")
    return SpecView(X, kind, removed, primal_subgeometries(X, include_22=include_22))


def removal_report(X: Geometry, C: AnchoredSubgeometry, Z: AnchoredSubgeometry) -> dict:
    """What happens to the closed set C(C) of X when the closed set C(Z) is removed.

    ``closed_irreducible``: C(C) has a single maximal prime in X.
    ``subspace_irreducible``: the same after discarding primes inside Z.
    ``remnant_irreducible``: the geometry C minus Z has a single maximal prime of its own.
    """
    cs = closed_set(C, X)
    ms = [p for p in cs.members if p.tag != "Empty"]
    top = [p for p in ms if not any(p.lt(q) for q in ms)]
    rest = [p for p in ms if not p.le(Z)]
    top_rest = [p for p in rest if not any(p.lt(q) for q in rest)]
    sub = AnchoredSubgeometry(X, C.points, C.lines, "closed set")
    R = remove_closed(sub.geometry(), AnchoredSubgeometry(
        sub.geometry(), _reindex(C.points, Z.points), _reindex(C.lines, Z.lines)))
    return {"closed_irreducible": len(top) == 1, "subspace_irreducible": len(top_rest) == 1,
            "remnant_irreducible": _intrinsically_irreducible(R), "remnant_points": R.n_points,
            "remnant_lines": R.n_lines}


def _reindex(universe: int, mask: int) -> int:
    out = 0
    for i, x in enumerate(bits(universe)):
        if mask >> x & 1:
            out |= 1 << i
    return out


def _intrinsically_irreducible(R: Geometry) -> bool:
    if is_primal(R):
        return True
    ms = [p for p in primal_subgeometries(R).items if p.tag != "Empty"]
    return len([p for p in ms if not any(p.lt(q) for q in ms)]) == 1

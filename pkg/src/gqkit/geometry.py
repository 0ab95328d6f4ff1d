"""Finite point-line incidence structures and their basic checkers.

Points and lines are dense integer ids.  Coordinates and provenance live in
the optional label tuples.  Adjacency is kept as Python int bitsets in both
directions, which makes perps, traces and the axiom scans cheap.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field

from .errors import DuplicatePointOnLine, NotAxiom3, OutOfRangeId


def bits(mask: int):
    """Yield the indices of the set bits of ``mask`` in increasing order."""
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def popcount(mask: int) -> int:
    return bin(mask).count("1")


def mask_of(ids) -> int:
    m = 0
    for i in ids:
        m |= 1 << i
    return m


class Geometry:
    """Immutable incidence structure.

    ``lines`` is a tuple of sorted point tuples.  Lines with fewer than two
    points are allowed so that remnants of removals can be represented.
    ``markers`` carries inert metadata such as empty-line and hairy-point
    records left behind by :func:`gqkit.substructure.remove_closed`.
    """

    __slots__ = ("n_points", "lines", "point_labels", "line_labels", "meta",
                 "markers", "line_mask", "point_lines", "point_line_mask",
                 "_coll", "_hash")

    def __init__(self, n_points, lines, point_labels=None, line_labels=None,
                 meta=None, markers=None):
        if n_points < 0:
            raise OutOfRangeId(f"negative point count {n_points}")
        norm = []
        for j, ln in enumerate(lines):
            pts = tuple(sorted(int(p) for p in ln))
            for a, b in zip(pts, pts[1:]):
                if a == b:
                    raise DuplicatePointOnLine(f"point {a} repeated on line {j}")
            if pts and (pts[0] < 0 or pts[-1] >= n_points):
                raise OutOfRangeId(f"line {j} has a point outside 0..{n_points - 1}")
            norm.append(pts)
        self.n_points = int(n_points)
        self.lines = tuple(norm)
        if point_labels is not None and len(point_labels) != self.n_points:
            raise OutOfRangeId("point label count does not match point count")
        if line_labels is not None and len(line_labels) != len(self.lines):
            raise OutOfRangeId("line label count does not match line count")
        self.point_labels = tuple(point_labels) if point_labels is not None else None
        self.line_labels = tuple(line_labels) if line_labels is not None else None
        self.meta = dict(meta or {})
        self.markers = tuple(markers or ())
        self.line_mask = tuple(mask_of(ln) for ln in self.lines)
        pl = [[] for _ in range(self.n_points)]
        for j, ln in enumerate(self.lines):
            for p in ln:
                pl[p].append(j)
        self.point_lines = tuple(tuple(x) for x in pl)
        self.point_line_mask = tuple(mask_of(x) for x in pl)
        self._coll = None
        self._hash = None

    # basic sizes
    @property
    def n_lines(self) -> int:
        return len(self.lines)

    @property
    def all_points(self) -> int:
        return (1 << self.n_points) - 1

    @property
    def all_lines(self) -> int:
        return (1 << self.n_lines) - 1

    def incident(self, p: int, j: int) -> bool:
        return bool(self.line_mask[j] >> p & 1)

    @property
    def coll(self) -> tuple:
        """Bitset of points collinear with each point, the point itself excluded."""
        if self._coll is None:
            c = [0] * self.n_points
            for m in self.line_mask:
                for p in bits(m):
                    c[p] |= m
            self._coll = tuple(c[p] & ~(1 << p) for p in range(self.n_points))
        return self._coll

    def line_through(self, a: int, b: int):
        """A line containing both points, or None."""
        m = self.point_line_mask[a] & self.point_line_mask[b]
        if not m:
            return None
        return (m & -m).bit_length() - 1

    def meet(self, u: int, v: int):
        """Common point of two lines, or None."""
        m = self.line_mask[u] & self.line_mask[v]
        if not m:
            return None
        return (m & -m).bit_length() - 1

    def concurrent(self, u: int, v: int) -> bool:
        return bool(self.line_mask[u] & self.line_mask[v])

    def point_label(self, p: int) -> str:
        if self.point_labels is None:
            return f"p{p}"
        return self.point_labels[p]

    def line_label(self, j: int) -> str:
        if self.line_labels is None:
            return f"L{j}"
        return self.line_labels[j]

    def key(self) -> tuple:
        """Exact structural key (labels ignored); equal keys mean identical incidence."""
        return (self.n_points, tuple(sorted(self.lines)))

    def __eq__(self, other):
        if not isinstance(other, Geometry):
            return NotImplemented
        return self.n_points == other.n_points and self.lines == other.lines

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.n_points, self.lines))
        return self._hash

    def __repr__(self):
        name = self.meta.get("name", "Geometry")
        return f"<{name}: {self.n_points} points, {self.n_lines} lines>"

    # serialization
    def to_dict(self) -> dict:
        labels = {}
        if self.point_labels is not None:
            labels["points"] = list(self.point_labels)
        if self.line_labels is not None:
            labels["lines"] = list(self.line_labels)
        if self.meta:
            labels["meta"] = self.meta
        d = {"points": self.n_points, "lines": [list(ln) for ln in self.lines],
             "labels": labels}
        if self.markers:
            d["markers"] = [list(m) for m in self.markers]
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))

    @classmethod
    def from_dict(cls, d: dict) -> "Geometry":
        labels = d.get("labels") or {}
        markers = [tuple(m) for m in d.get("markers", [])]
        return cls(d["points"], d["lines"], labels.get("points"), labels.get("lines"),
                   labels.get("meta"), markers)

    @classmethod
    def from_json(cls, text: str) -> "Geometry":
        return cls.from_dict(json.loads(text))

    def with_meta(self, **kw) -> "Geometry":
        meta = dict(self.meta)
        meta.update(kw)
        return Geometry(self.n_points, self.lines, self.point_labels,
                        self.line_labels, meta, self.markers)


def new_geometry(points: int, lines, labels=None) -> Geometry:
    """Validated constructor.  ``labels`` may hold "points", "lines" and "meta"."""
    labels = labels or {}
    return Geometry(points, lines, labels.get("points"), labels.get("lines"),
                    labels.get("meta"))


def relabel(G: Geometry, pperm, lperm=None) -> Geometry:
    """Image of G under point permutation ``pperm`` (old id -> new id) and line permutation."""
    n = G.n_points
    if lperm is None:
        lperm = list(range(G.n_lines))
    lines = [None] * G.n_lines
    for j, ln in enumerate(G.lines):
        lines[lperm[j]] = [pperm[p] for p in ln]
    pl = ll = None
    if G.point_labels is not None:
        pl = [None] * n
        for p in range(n):
            pl[pperm[p]] = G.point_labels[p]
    if G.line_labels is not None:
        ll = [None] * G.n_lines
        for j in range(G.n_lines):
            ll[lperm[j]] = G.line_labels[j]
    return Geometry(n, lines, pl, ll, G.meta)


def induced(G: Geometry, point_mask: int, line_mask: int | None = None,
            keep_empty: bool = False) -> tuple[Geometry, list, list]:
    """Subgeometry on the given points and lines, reindexed densely.

    Lines keep only their surviving points.  When ``line_mask`` is None every
    line meeting the point set in at least one point is kept.  Returns the
    geometry plus the old point ids and old line ids in new order.
    """
    pts = list(bits(point_mask))
    index = {p: i for i, p in enumerate(pts)}
    if line_mask is None:
        lids = [j for j in range(G.n_lines) if G.line_mask[j] & point_mask]
    else:
        lids = list(bits(line_mask))
    lines, kept = [], []
    for j in lids:
        ln = [index[p] for p in G.lines[j] if p in index]
        if ln or keep_empty:
            lines.append(ln)
            kept.append(j)
    pl = [G.point_labels[p] for p in pts] if G.point_labels is not None else None
    ll = [G.line_labels[j] for j in kept] if G.line_labels is not None else None
    return Geometry(len(pts), lines, pl, ll), pts, kept


# axiom checkers

@dataclass(frozen=True)
class Axiom3Certificate:
    verdict: bool
    point: int | None = None
    line: int | None = None
    witnesses: tuple = ()
    kind: str = ""

    def __bool__(self):
        return self.verdict


def check_axiom3(G: Geometry) -> Axiom3Certificate:
    """Every non-incident (x, Y) has exactly one point on Y collinear with x.

    Two lines sharing two or more points also fail: the axiom is read inside
    partial linear spaces.
    """
    lm = G.line_mask
    for u in range(G.n_lines):
        for v in range(u + 1, G.n_lines):
            common = lm[u] & lm[v]
            if common & (common - 1):
                return Axiom3Certificate(False, None, u, tuple(bits(common)), "digon")
    coll = G.coll
    for x in range(G.n_points):
        cx = coll[x]
        for j, m in enumerate(G.line_mask):
            if m >> x & 1:
                continue
            hit = m & cx
            if hit == 0 or hit & (hit - 1):
                return Axiom3Certificate(False, x, j, tuple(bits(hit)), "projection")
    return Axiom3Certificate(True)


def check_axiom3_tilde(G: Geometry) -> Axiom3Certificate:
    """No triangles: at most one projection point, and two lines share at most one point."""
    lm = G.line_mask
    for u in range(G.n_lines):
        for v in range(u + 1, G.n_lines):
            common = lm[u] & lm[v]
            if common & (common - 1):
                return Axiom3Certificate(False, None, u, tuple(bits(common)), "digon")
    coll = G.coll
    for x in range(G.n_points):
        cx = coll[x]
        for j, m in enumerate(lm):
            if m >> x & 1:
                continue
            hit = m & cx
            if hit & (hit - 1):
                return Axiom3Certificate(False, x, j, tuple(bits(hit))[:2], "triangle")
    return Axiom3Certificate(True)


@dataclass(frozen=True)
class OrderPair:
    s: int
    t: int

    def __iter__(self):
        return iter((self.s, self.t))


def detect_order(G: Geometry) -> OrderPair | None:
    if G.n_points == 0 or G.n_lines == 0:
        return None
    sizes = {len(ln) for ln in G.lines}
    degs = {len(pl) for pl in G.point_lines}
    if len(sizes) != 1 or len(degs) != 1:
        return None
    s, t = sizes.pop() - 1, degs.pop() - 1
    if s < 0 or t < 0:
        return None
    return OrderPair(s, t)


def is_gq(G: Geometry) -> bool:
    return detect_order(G) is not None and bool(check_axiom3(G))


def dualize(G: Geometry) -> Geometry:
    """Swap points and lines.  Point i of the dual is line i of G and vice versa."""
    lines = [list(G.point_lines[p]) for p in range(G.n_points)]
    meta = dict(G.meta)
    if "name" in meta:
        name = meta["name"]
        meta["name"] = name[5:] if name.startswith("dual ") else "dual " + name
    return Geometry(G.n_lines, lines, G.line_labels, G.point_labels, meta)


# classification of axiom-(3) geometries

@dataclass(frozen=True)
class Axiom3Type:
    kind: str
    params: tuple = ()
    uniform: bool = True

    def __str__(self):
        if not self.params:
            return self.kind
        return f"{self.kind}({','.join(map(str, self.params))})"


_DUAL_KIND = {"Empty": "Empty", "PointSet": "LineSet", "LineSet": "PointSet",
              "Grid": "DualGrid", "DualGrid": "Grid", "Perp": "DualPerp",
              "DualPerp": "Perp", "ThickGQ": "ThickGQ", "ThinGQ": "ThinGQ"}


def dual_type(tag: Axiom3Type) -> Axiom3Type:
    params = tag.params
    if tag.kind in ("ThickGQ", "ThinGQ"):
        params = tuple(reversed(params))
    return Axiom3Type(_DUAL_KIND[tag.kind], params, tag.uniform)


def _grid_shape(G: Geometry):
    """(u, v) if G is a u x v grid with u, v >= 2, else None."""
    if any(len(pl) != 2 for pl in G.point_lines):
        return None
    lm = G.line_mask
    nl = G.n_lines
    # concurrency graph must be complete bipartite
    colour = [-1] * nl
    colour[0] = 0
    stack = [0]
    while stack:
        u = stack.pop()
        for v in range(nl):
            if v != u and lm[u] & lm[v]:
                if colour[v] < 0:
                    colour[v] = 1 - colour[u]
                    stack.append(v)
                elif colour[v] == colour[u]:
                    return None
    if -1 in colour:
        return None
    r1 = [u for u in range(nl) if colour[u] == 0]
    r2 = [u for u in range(nl) if colour[u] == 1]
    for a in r1:
        for b in r2:
            c = lm[a] & lm[b]
            if c == 0 or c & (c - 1):
                return None
    u, v = sorted((len(r1), len(r2)))
    if u < 2 or G.n_points != u * v:
        return None
    return u, v


def classify_axiom3_type(G: Geometry) -> Axiom3Type:
    """Place an axiom-(3) geometry in the finite list of possible shapes.

    Square grids and their duals are reported as thin quadrangles, non-square
    ones as Grid/DualGrid.  A flag with extra lines through the flag point and
    extra points on the flag line is both a perp and a dual perp; the side
    with more extra elements wins, ties go to Perp.
    """
    if not check_axiom3(G):
        raise NotAxiom3("axiom (3) fails")
    if G.n_points == 0 and G.n_lines == 0:
        return Axiom3Type("Empty")
    if G.n_lines == 0:
        return Axiom3Type("PointSet", (G.n_points,))
    if G.n_points == 0:
        return Axiom3Type("LineSet", (G.n_lines,))
    all_l, all_p = G.all_lines, G.all_points
    centres = [p for p in range(G.n_points) if G.point_line_mask[p] == all_l]
    carriers = [j for j in range(G.n_lines) if G.line_mask[j] == all_p]
    if centres or carriers:
        sizes = {len(ln) for ln in G.lines}
        degs = {len(pl) for pl in G.point_lines}
        if centres and carriers:
            x, X = centres[0], carriers[0]
            a = len(G.lines[X]) - 1
            b = len(G.point_lines[x]) - 1
            if b >= a:
                return Axiom3Type("Perp", (b,), len(sizes) == 1)
            return Axiom3Type("DualPerp", (a,), len(degs) == 1)
        if centres:
            return Axiom3Type("Perp", (G.n_lines - 1,), len(sizes) == 1)
        return Axiom3Type("DualPerp", (G.n_points - 1,), len(degs) == 1)
    order = detect_order(G)
    if order is not None and order.s >= 2 and order.t >= 2:
        return Axiom3Type("ThickGQ", (order.s, order.t))
    shape = _grid_shape(G)
    if shape is not None:
        u, v = shape
        if u == v:
            return Axiom3Type("ThinGQ", (u - 1, 1))
        return Axiom3Type("Grid", (u, v))
    shape = _grid_shape(dualize(G))
    if shape is not None:
        u, v = shape
        if u == v:
            return Axiom3Type("ThinGQ", (1, u - 1))
        return Axiom3Type("DualGrid", (u, v))
    raise NotAxiom3("axiom (3) holds but the shape is not in the classification")


# collinearity graph

@dataclass(frozen=True)
class Graph:
    """Simple graph on 0..n-1 with adjacency bitsets.  ``loops`` marks stored self-adjacency."""
    n: int
    adj: tuple
    loops: bool = True

    def neighbours(self, v: int) -> int:
        return self.adj[v]

    def edges(self):
        for u in range(self.n):
            for v in bits(self.adj[u] >> u << u):
                if v > u or (v == u and self.loops):
                    yield (u, v)

    def strip_loops(self) -> "Graph":
        return Graph(self.n, tuple(self.adj[v] & ~(1 << v) for v in range(self.n)), False)

    def degree(self, v: int) -> int:
        return popcount(self.adj[v] & ~(1 << v))


def collinearity_graph(G: Geometry) -> Graph:
    coll = G.coll
    return Graph(G.n_points, tuple(coll[p] | (1 << p) for p in range(G.n_points)), True)


def incidence_edges(G: Geometry):
    for j, ln in enumerate(G.lines):
        for p in ln:
            yield p, j


def to_dot(G: Geometry, kind: str = "incidence") -> str:
    """DOT text for the incidence graph (points as circles, lines as boxes) or collinearity graph."""
    out = []
    if kind == "incidence":
        out.append("graph incidence {")
        for p in range(G.n_points):
            out.append(f'  p{p} [shape=circle,label="{G.point_label(p)}"];')
        for j in range(G.n_lines):
            out.append(f'  L{j} [shape=box,label="{G.line_label(j)}"];')
        for p, j in incidence_edges(G):
            out.append(f"  p{p} -- L{j};")
    elif kind == "collinearity":
        graph = collinearity_graph(G)
        out.append("graph collinearity {")
        for p in range(G.n_points):
            out.append(f'  p{p} [label="{G.point_label(p)}"];')
        for u, v in graph.edges():
            out.append(f"  p{u} -- p{v};")
    else:
        raise ValueError(f"unknown DOT kind {kind!r}")
    out.append("}")
    return "\n".join(out) + "\n"


def graph_to_dot(graph: Graph, name: str = "g") -> str:
    out = [f"graph {name} {{"]
    for v in range(graph.n):
        out.append(f"  v{v};")
    for u, v in graph.edges():
        out.append(f"  v{u} -- v{v};")
    out.append("}")
    return "\n".join(out) + "\n"


def gq_counts_ok(G: Geometry) -> bool:
    """Double-counting identities |P| = (s+1)(st+1), |L| = (t+1)(st+1)."""
    o = detect_order(G)
    if o is None:
        return False
    s, t = o
    return G.n_points == (s + 1) * (s * t + 1) and G.n_lines == (t + 1) * (s * t + 1)

"""Concrete geometries: orthogonal quadrangles and their duals, grids, perps,
ovals in PG(2, 2^h) and the Tits quadrangle T2(O) of an oval with nucleus.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product
from math import gcd

import numpy as np

from .errors import EvenH, GcdViolation, NoIrreducibleForm, NoNucleus
from .fields import Fq, embedding, field_of_order, gf
from .geometry import Geometry, dualize


# projective spaces

def normalize(F: Fq, v) -> tuple:
    """Scale a nonzero vector so that its first nonzero entry is 1."""
    for x in v:
        if x:
            inv = F.inv(x)
            return tuple(F.mul(inv, y) for y in v)
    raise ValueError("zero vector has no projective point")


def projective_points(F: Fq, n: int) -> list:
    """All normalized points of PG(n, q), sorted lexicographically."""
    pts = []
    for lead in range(n + 1):
        for tail in product(F.elements, repeat=n - lead):
            pts.append((0,) * lead + (1,) + tail)
    pts.sort()
    return pts


def coord_str(v) -> str:
    return ",".join(map(str, v))


# quadratic forms

@dataclass(frozen=True)
class QuadraticForm:
    """Sum of a_ij X_i X_j over i <= j, stored as a sorted tuple of ((i, j), a)."""
    F: Fq
    nvars: int
    terms: tuple
    name: str = ""

    @classmethod
    def from_dict(cls, F: Fq, nvars: int, coeffs: dict, name: str = ""):
        terms = []
        for (i, j), a in coeffs.items():
            if i > j:
                i, j = j, i
            if a:
                terms.append(((i, j), a))
        terms.sort()
        return cls(F, nvars, tuple(terms), name)

    @property
    def n(self) -> int:
        """Projective dimension of the ambient space."""
        return self.nvars - 1

    def coeff(self, i: int, j: int) -> int:
        if i > j:
            i, j = j, i
        for (a, b), c in self.terms:
            if (a, b) == (i, j):
                return c
        return 0

    def __call__(self, x) -> int:
        F = self.F
        acc = 0
        for (i, j), a in self.terms:
            if x[i] and x[j]:
                acc = F.add(acc, F.mul(a, F.mul(x[i], x[j])))
        return acc

    def polar(self, x, y) -> int:
        """B(x, y) = Q(x + y) - Q(x) - Q(y)."""
        F = self.F
        acc = 0
        for (i, j), a in self.terms:
            if i == j:
                t = F.mul(2 % F.p, F.mul(x[i], y[i])) if F.p != 2 else 0
            else:
                t = F.add(F.mul(x[i], y[j]), F.mul(x[j], y[i]))
            if t:
                acc = F.add(acc, F.mul(a, t))
        return acc

    def substitute(self, basis) -> "QuadraticForm":
        """Pull back along the linear map sending e_k to basis[k] (vectors in the old space)."""
        F = self.F
        m = len(basis)
        coeffs = {}
        for k in range(m):
            v = self(basis[k])
            if v:
                coeffs[(k, k)] = v
            for l in range(k + 1, m):
                w = self.polar(basis[k], basis[l])
                if w:
                    coeffs[(k, l)] = w
        return QuadraticForm.from_dict(F, m, coeffs)

    def to_dict(self) -> dict:
        return {"q": self.F.q, "nvars": self.nvars,
                "terms": [[i, j, a] for (i, j), a in self.terms], "name": self.name}


def binary_form_irreducible(F: Fq, a: int, b: int, c: int) -> bool:
    """a x^2 + b xy + c y^2 has no projective zero over F."""
    if a == 0:
        return False
    for t in F.elements:
        if F.add(F.add(F.mul(a, F.mul(t, t)), F.mul(b, t)), c) == 0:
            return False
    return True


def least_irreducible_binary_form(F: Fq) -> tuple:
    """Lexicographically least monic (1, b, c) with x^2 + bxy + cy^2 irreducible."""
    for b in F.elements:
        for c in F.elements:
            if binary_form_irreducible(F, 1, b, c):
                return (1, b, c)
    raise NoIrreducibleForm(f"no irreducible binary form over {F}")


def standard_form(m: int, q: int) -> QuadraticForm:
    """Quadric in PG(m, q): hyperbolic (m=3), parabolic (m=4) or elliptic (m=5)."""
    F = field_of_order(q)
    coeffs = {(0, 1): 1, (2, 3): 1}
    if m == 3:
        name = f"Q(3,{q})"
    elif m == 4:
        coeffs[(4, 4)] = 1
        name = f"Q(4,{q})"
    elif m == 5:
        a, b, c = least_irreducible_binary_form(F)
        coeffs[(4, 4)] = a
        coeffs[(4, 5)] = b
        coeffs[(5, 5)] = c
        name = f"Q(5,{q})"
    else:
        raise ValueError(f"m must be 3, 4 or 5, got {m}")
    return QuadraticForm.from_dict(F, m + 1, coeffs, name)


def quadric_zeros(Q: QuadraticForm) -> list:
    return [x for x in projective_points(Q.F, Q.n) if Q(x) == 0]


def quadric_geometry(Q: QuadraticForm, name: str = "") -> Geometry:
    """Points: projective zeros.  Lines: projective lines contained in the zero set.

    A line through zeros x, y lies on the quadric iff B(x, y) = 0, since
    Q(y + c x) = Q(y) + c^2 Q(x) + c B(x, y).
    """
    F = Q.F
    pts = quadric_zeros(Q)
    index = {p: i for i, p in enumerate(pts)}
    seen = set()
    lines = []
    for i, x in enumerate(pts):
        for j in range(i + 1, len(pts)):
            y = pts[j]
            if Q.polar(x, y):
                continue
            ln = [i, j]
            for c in F.elements:
                if c == 0:
                    continue
                w = normalize(F, [F.add(yy, F.mul(c, xx)) for xx, yy in zip(x, y)])
                ln.append(index[w])
            key = tuple(sorted(set(ln)))
            if key not in seen:
                seen.add(key)
                lines.append(key)
    lines.sort()
    labels = [coord_str(p) for p in pts]
    return Geometry(len(pts), lines, labels, None,
                    {"name": name or Q.name, "q": F.q, "construction": "quadric"})


def quadric_gq(m: int, q: int) -> Geometry:
    return quadric_geometry(standard_form(m, q))


def wq(q: int) -> Geometry:
    """W(q), realized as the point-line dual of Q(4, q)."""
    return dualize(quadric_gq(4, q)).with_meta(name=f"W({q})", construction="dual of Q(4,q)")


def h3(q: int) -> Geometry:
    """H(3, q^2), realized as the point-line dual of Q(5, q)."""
    return dualize(quadric_gq(5, q)).with_meta(name=f"H(3,{q * q})",
                                               construction="dual of Q(5,q)")


def count_form_zeros(Q: QuadraticForm, q: int | None = None, m: int = 1) -> int:
    """Number of projective zeros of Q over F_{q^m}, by exhaustive evaluation."""
    F = Q.F
    if q is not None and q != F.q:
        raise ValueError("form is defined over a different field")
    E = gf(F.p, F.k * m)
    emb = embedding(F, E)
    add, mul = E.add_table(), E.mul_table()
    Qm = E.q
    nv = Q.nvars
    # vectors enumerated in blocks: first two coordinates vary fastest
    head = min(nv, 3)
    grids = np.indices((Qm,) * head).reshape(head, -1)
    affine = 0
    for tail in product(range(Qm), repeat=nv - head):
        cols = [grids[i] for i in range(head)] + [np.full(grids.shape[1], t, dtype=grids.dtype)
                                                  for t in tail]
        acc = np.zeros(grids.shape[1], dtype=np.int32)
        for (i, j), a in Q.terms:
            v = mul[cols[i], cols[j]]
            v = mul[emb[a], v]
            acc = add[acc, v]
        affine += int(np.count_nonzero(acc == 0))
    return (affine - 1) // (Qm - 1)


# small abstract geometries

def grid(u: int, v: int) -> Geometry:
    """u x v grid: point (i, j) has id i*v + j; u lines of size v, then v lines of size u."""
    lines = [[i * v + j for j in range(v)] for i in range(u)]
    lines += [[i * v + j for i in range(u)] for j in range(v)]
    labels = [f"({i},{j})" for i in range(u) for j in range(v)]
    return Geometry(u * v, lines, labels, None, {"name": f"grid({u},{v})"})


def dual_grid(u: int, v: int) -> Geometry:
    return dualize(grid(u, v)).with_meta(name=f"dual_grid({u},{v})")


def perp_geometry(t: int, pts_per_line: int) -> Geometry:
    """One centre (id 0) on t+1 lines of ``pts_per_line`` points each."""
    lines, nxt = [], 1
    for _ in range(t + 1):
        lines.append([0] + list(range(nxt, nxt + pts_per_line - 1)))
        nxt += pts_per_line - 1
    return Geometry(nxt, lines, None, None, {"name": f"perp({t},{pts_per_line})"})


def line_geometry(n: int) -> Geometry:
    return Geometry(n, [list(range(n))], None, None, {"name": f"line({n})"})


def point_set(n: int) -> Geometry:
    return Geometry(n, [], None, None, {"name": f"points({n})"})


def point_geometry() -> Geometry:
    return point_set(1).with_meta(name="point")


def empty_geometry() -> Geometry:
    return Geometry(0, [], None, None, {"name": "empty"})


def fano_plane() -> Geometry:
    lines = [[0, 1, 2], [0, 3, 4], [0, 5, 6], [1, 3, 5], [1, 4, 6], [2, 3, 6], [2, 4, 5]]
    return Geometry(7, lines, None, None, {"name": "Fano"})


def triangle() -> Geometry:
    return Geometry(3, [[0, 1], [1, 2], [0, 2]], None, None, {"name": "triangle"})


# ovals

@dataclass(frozen=True)
class Oval:
    F: Fq
    points: tuple
    nucleus: tuple | None
    name: str = ""
    flags: tuple = field(default=())

    @property
    def q(self) -> int:
        return self.F.q


def plane_lines(F: Fq) -> list:
    """Lines of PG(2, q) as normalized dual coordinates."""
    return projective_points(F, 2)


def on_line(F: Fq, line, pt) -> bool:
    return F.sum(F.mul(a, b) for a, b in zip(line, pt)) == 0


def tangent_lines(O: Oval) -> dict:
    """Map each oval point to the list of lines meeting the oval only there."""
    F = O.F
    tang = {p: [] for p in O.points}
    for ln in plane_lines(F):
        hit = [p for p in O.points if on_line(F, ln, p)]
        if len(hit) == 1:
            tang[hit[0]].append(ln)
    return tang


def verify_oval(O: Oval) -> bool:
    """Every line meets O in at most 2 points, each point has one tangent, nucleus on all tangents."""
    F = O.F
    if len(O.points) != F.q + 1 or len(set(O.points)) != len(O.points):
        return False
    for ln in plane_lines(F):
        if sum(on_line(F, ln, p) for p in O.points) > 2:
            return False
    tang = tangent_lines(O)
    if any(len(v) != 1 for v in tang.values()):
        return False
    if O.nucleus is not None:
        if O.nucleus in O.points:
            return False
        if not all(on_line(F, v[0], O.nucleus) for v in tang.values()):
            return False
    return True


def segre_oval(i: int, h: int) -> Oval:
    """{(1 : t : t^(2^i))} together with (0:0:1) in PG(2, 2^h), nucleus (0:1:0)."""
    if gcd(i, h) != 1:
        raise GcdViolation(f"gcd({i},{h}) = {gcd(i, h)} != 1")
    F = gf(2, h)
    e = 2 ** i
    pts = tuple(sorted([(1, t, F.pow(t, e)) for t in F.elements] + [(0, 0, 1)]))
    flags = ("i=1: conic",) if i == 1 else ()
    return Oval(F, pts, (0, 1, 0), f"O({i},{h})", flags)


def brown_oval(h: int) -> Oval:
    """{(1 : t : t^6)} together with (0:0:1) in PG(2, 2^h) for odd h, nucleus (0:1:0)."""
    if h % 2 == 0:
        raise EvenH(f"h must be odd, got {h}")
    F = gf(2, h)
    pts = tuple(sorted([(1, t, F.pow(t, 6)) for t in F.elements] + [(0, 0, 1)]))
    return Oval(F, pts, (0, 1, 0), f"B({h})")


def _join(F: Fq, a, b) -> tuple:
    """Normalized dual coordinates of the line through two distinct points of PG(2, q)."""
    c = (F.sub(F.mul(a[1], b[2]), F.mul(a[2], b[1])),
         F.sub(F.mul(a[2], b[0]), F.mul(a[0], b[2])),
         F.sub(F.mul(a[0], b[1]), F.mul(a[1], b[0])))
    return normalize(F, c)


def t2_of_oval(O: Oval) -> Geometry:
    """Tits quadrangle T2(O) of order (q, q).

    The oval sits in the plane X3 = 0 of PG(3, q).  Points: affine points
    (a, b, c, 1); planes meeting X3 = 0 in a tangent line, written
    [l0, l1, l2, u3] with l the normalized tangent; the symbol (inf).
    Lines: affine lines through an oval point, and the oval points.
    """
    if O.nucleus is None:
        raise NoNucleus("T2 needs an oval with nucleus")
    F = O.F
    q = F.q
    ovp = list(O.points)
    tang = [_join(F, p, O.nucleus) for p in ovp]
    # points
    affine = [tuple(v) for v in product(F.elements, repeat=3)]
    aff_id = {v: i for i, v in enumerate(affine)}
    planar = [(k, u3) for k in range(len(ovp)) for u3 in F.elements]
    n_aff = len(affine)
    pl_id = {pc: n_aff + i for i, pc in enumerate(planar)}
    inf = n_aff + len(planar)
    labels = [f"A:{coord_str(v)}" for v in affine]
    labels += [f"P:{coord_str(tang[k])};{u3}" for k, u3 in planar]
    labels.append("I")
    # lines of type (a): affine point classes along each oval direction
    lines, llabels = [], []
    for k, d in enumerate(ovp):
        done = set()
        for P in affine:
            if P in done:
                continue
            pts = []
            for lam in F.elements:
                R = tuple(F.add(x, F.mul(lam, y)) for x, y in zip(P, d))
                done.add(R)
                pts.append(aff_id[R])
            # the plane through this line and the tangent at d
            l = tang[k]
            u3 = F.neg(F.sum(F.mul(a, b) for a, b in zip(l, P)))
            pts.append(pl_id[(k, u3)])
            lines.append(sorted(pts))
            llabels.append(f"a:{coord_str(d)}@{coord_str(P)}")
    for k, d in enumerate(ovp):
        pts = [pl_id[(k, u3)] for u3 in F.elements] + [inf]
        lines.append(sorted(pts))
        llabels.append(f"b:{coord_str(d)}")
    meta = {"name": f"T2({O.name})", "q": q, "construction": "T2", "oval": O.name}
    return Geometry(inf + 1, lines, labels, llabels, meta)


def parse_t2_label(label: str):
    """Decode a T2 point or line label into (kind, coordinates)."""
    if label == "I":
        return ("I", ())
    kind, rest = label.split(":", 1)
    if kind == "A":
        return ("A", tuple(int(x) for x in rest.split(",")))
    if kind == "P":
        l, u3 = rest.split(";")
        return ("P", tuple(int(x) for x in l.split(",")) + (int(u3),))
    if kind == "a":
        d, p = rest.split("@")
        return ("a", (tuple(int(x) for x in d.split(",")), tuple(int(x) for x in p.split(","))))
    if kind == "b":
        return ("b", tuple(int(x) for x in rest.split(",")))
    raise ValueError(f"not a T2 label: {label!r}")


def t2_type_counts(G: Geometry) -> dict:
    counts = {"A": 0, "P": 0, "I": 0}
    for lab in G.point_labels:
        counts[parse_t2_label(lab)[0]] += 1
    return counts


def build(name: str, q: int = 2, **kw) -> Geometry:
    """Named constructions used by the CLI and the corpus."""
    if name in ("q3", "q4", "q5"):
        return quadric_gq(int(name[1]), q)
    if name == "w":
        return wq(q)
    if name == "h3":
        return h3(q)
    if name == "grid":
        return grid(kw.get("u", q + 1), kw.get("v", q + 1))
    if name == "dual_grid":
        return dual_grid(kw.get("u", q + 1), kw.get("v", q + 1))
    if name == "perp":
        return perp_geometry(kw.get("t", q), kw.get("k", q + 1))
    if name == "line":
        return line_geometry(kw.get("k", q + 1))
    if name == "fano":
        return fano_plane()
    if name == "t2":
        oval = kw.get("oval", "brown")
        h = kw.get("h", 1)
        O = brown_oval(h) if oval == "brown" else segre_oval(kw.get("i", 2), h)
        return t2_of_oval(O)
    raise ValueError(f"unknown construction {name!r}")

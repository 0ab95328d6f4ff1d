"""Towers of oval quadrangles over F_{2^h} and their Frobenius descent.

Level h of a tower is T2 of the Segre oval O(i, h) (or Brown's oval).  For
h | H the level-h quadrangle sits inside the level-H one through the field
inclusion, and its elements are exactly those fixed by x -> x^(2^h).
"""
from __future__ import annotations

from dataclasses import dataclass, field
from math import gcd

from .constructions import (Oval, brown_oval, coord_str, normalize, parse_t2_label, projective_points,
                            segre_oval, t2_of_oval)
from .errors import GcdViolation, NotAChain, NotIdeal, NotInTower
from .fields import Fq, embedding, gf
from .geometry import Geometry, bits, mask_of, popcount
from .iso import are_isomorphic
from .substructure import (AnchoredSubgeometry, full_grids, is_regular_pair, projection_closure,
                           thick_full_subgqs)
from .zariski import closed_set

KINDS = ("points", "affine", "planar", "symbol", "lines")


@dataclass
class TowerLevel:
    h: int
    F: Fq
    oval: Oval
    geometry: Geometry
    label_index: dict = field(repr=False)
    line_index: dict = field(repr=False)

    @property
    def q(self) -> int:
        return self.F.q


@dataclass
class Tower:
    i: int | None
    kind: str
    levels: dict

    def level(self, h: int) -> TowerLevel:
        if h not in self.levels:
            raise NotInTower(f"level {h} is not in the tower {sorted(self.levels)}")
        return self.levels[h]

    @property
    def exponents(self) -> list:
        return sorted(self.levels)


def _level(oval: Oval, h: int) -> TowerLevel:
    G = t2_of_oval(oval)
    lab = {s: k for k, s in enumerate(G.point_labels)}
    lines = {m: j for j, m in enumerate(G.line_mask)}
    return TowerLevel(h, oval.F, oval, G, lab, lines)


def build_tower(i, exponents, kind: str = "segre") -> Tower:
    """Levels for a divisibility chain of exponents; kind 'segre' uses O(i, h), 'brown' uses O(h)."""
    exps = list(exponents)
    if not exps:
        raise NotAChain("no exponents given")
    for a, b in zip(exps, exps[1:]):
        if b % a or b == a:
            raise NotAChain(f"{a} does not properly divide {b}")
    levels = {}
    for h in exps:
        if kind == "segre":
            if gcd(i, h) != 1:
                raise GcdViolation(f"gcd({i},{h}) = {gcd(i, h)} != 1")
            levels[h] = _level(segre_oval(i, h), h)
        elif kind == "brown":
            levels[h] = _level(brown_oval(h), h)
        else:
            raise ValueError(f"unknown tower kind {kind}")
    T = Tower(i, kind, levels)
    for a, b in zip(exps, exps[1:]):
        embed_level(T, a, b)
    return T


def _check_pair(T: Tower, h: int, H: int):
    T.level(h)
    T.level(H)
    if H % h:
        raise NotInTower(f"{h} does not divide {H}")


def _map_label(label: str, f) -> str:
    kind, coords = parse_t2_label(label)
    if kind == "I":
        return "I"
    if kind == "A":
        return "A:" + coord_str(f(x) for x in coords)
    return "P:" + coord_str(f(x) for x in coords[:3]) + ";" + str(f(coords[3]))


def _point_map(src: TowerLevel, dst: TowerLevel, f) -> list:
    out = []
    for lab in src.geometry.point_labels:
        out.append(dst.label_index[_map_label(lab, f)])
    return out


def _line_map(src: TowerLevel, dst: TowerLevel, pmap: list) -> list:
    """Each source line goes to the unique target line through its image points."""
    G, H = src.geometry, dst.geometry
    out = []
    for ln in G.lines:
        a, b = pmap[ln[0]], pmap[ln[1]]
        j = H.point_line_mask[a] & H.point_line_mask[b]
        if popcount(j) != 1:
            raise AssertionError("image points do not determine a line")
        j = j.bit_length() - 1
        for p in ln:
            if not H.line_mask[j] >> pmap[p] & 1:
                raise AssertionError("a line is not mapped into a line")
        out.append(j)
    return out


def embed_level(T: Tower, h: int, H: int):
    """(point map, line map) of level h into level H; checks the oval maps into the oval."""
    _check_pair(T, h, H)
    lo, hi = T.level(h), T.level(H)
    emb = embedding(lo.F, hi.F)
    f = emb.__getitem__
    big = set(hi.oval.points)
    for p in lo.oval.points:
        if normalize(hi.F, tuple(f(x) for x in p)) not in big:
            raise AssertionError("oval point does not map into the larger oval")
    pmap = _point_map(lo, hi, f)
    if len(set(pmap)) != len(pmap):
        raise AssertionError("point map is not injective")
    return pmap, _line_map(lo, hi, pmap)


def frobenius(T: Tower, h: int, H: int):
    """The permutation x -> x^(2^h) of level H, as (point perm, line perm)."""
    _check_pair(T, h, H)
    lv = T.level(H)
    F = lv.F
    f = lambda a: F.frob(a, h)  # noqa: E731
    pmap = _point_map(lv, lv, f)
    return pmap, _line_map(lv, lv, pmap)


@dataclass
class OrbitDecomposition:
    h: int
    H: int
    kind: str
    orbits: list

    @property
    def group(self) -> str:
        return f"Gal(F_2^{self.H}/F_2^{self.h}), cyclic of order {self.H // self.h}, x -> x^(2^{self.h})"

    def sizes(self) -> dict:
        out = {}
        for o in self.orbits:
            out[len(o)] = out.get(len(o), 0) + 1
        return dict(sorted(out.items()))

    def fixed(self) -> list:
        return [o[0] for o in self.orbits if len(o) == 1]

    def to_dict(self) -> dict:
        return {"h": self.h, "H": self.H, "kind": self.kind, "group": self.group,
                "sizes": {str(k): v for k, v in self.sizes().items()},
                "orbits": self.orbits}


def _cycles(perm: list, domain) -> list:
    seen, out = set(), []
    for x in sorted(domain):
        if x in seen:
            continue
        orb, y = [], x
        while y not in seen:
            seen.add(y)
            orb.append(y)
            y = perm[y]
        out.append(sorted(orb))
    return out


def element_kinds(G: Geometry) -> dict:
    out = {"affine": [], "planar": [], "symbol": []}
    for p, lab in enumerate(G.point_labels):
        k = parse_t2_label(lab)[0]
        out[{"A": "affine", "P": "planar", "I": "symbol"}[k]].append(p)
    out["points"] = list(range(G.n_points))
    out["lines"] = list(range(G.n_lines))
    return out


def frobenius_orbits(T: Tower, h: int, H: int, kind: str = "points") -> OrbitDecomposition:
    if kind not in KINDS:
        raise ValueError(f"kind must be one of {KINDS}")
    pmap, lmap = frobenius(T, h, H)
    dom = element_kinds(T.level(H).geometry)[kind]
    perm = lmap if kind == "lines" else pmap
    return OrbitDecomposition(h, H, kind, _cycles(perm, dom))


def rational_elements(T: Tower, h: int, H: int) -> AnchoredSubgeometry:
    """Frobenius-fixed points and lines of level H, checked against the embedded level h."""
    pmap, lmap = frobenius(T, h, H)
    G = T.level(H).geometry
    pts = mask_of(p for p in range(G.n_points) if pmap[p] == p)
    lines = mask_of(j for j in range(G.n_lines) if lmap[j] == j)
    if h == H:
        return AnchoredSubgeometry(G, pts, lines, f"rational over F_2^{h}")
    ep, el = embed_level(T, h, H)
    if mask_of(ep) != pts or mask_of(el) != lines:
        raise AssertionError("fixed elements differ from the embedded lower level")
    return AnchoredSubgeometry(G, pts, lines, f"rational over F_2^{h}")


def rational_isomorphism(T: Tower, h: int, H: int):
    """An isomorphism of the fixed subgeometry onto level h, or None."""
    return are_isomorphic(rational_elements(T, h, H).geometry(), T.level(h).geometry)


def transitivity_check(T: Tower, h: int, H: int) -> bool:
    """Each class over level h (a fibre of the quotient map) is one orbit of Gal.

    The fibres are computed independently as the sets closed under the
    Frobenius map and minimal with that property, then compared with the
    orbits of the whole cyclic group generated by x -> x^(2^h).
    """
    pmap, lmap = frobenius(T, h, H)
    n = H // h
    for perm in (pmap, lmap):
        for x in range(len(perm)):
            # the group element F^k for every k: the fibre of x is its image set
            fibre, y = {x}, x
            for _ in range(n):
                y = perm[y]
                fibre.add(y)
            if y != x:
                return False
            for z in fibre:
                w, img = z, set()
                for _ in range(n):
                    w = perm[w]
                    img.add(w)
                if img != fibre:
                    return False
    return True


def union_check(T: Tower) -> bool:
    """The top level is the union of the images of all levels, and embeddings compose."""
    exps = T.exponents
    top = exps[-1]
    G = T.level(top).geometry
    cover = 0
    for h in exps:
        if top % h:
            continue
        pm = embed_level(T, h, top)[0] if h != top else list(range(G.n_points))
        cover |= mask_of(pm)
        for m in exps:
            if m % h == 0 and top % m == 0 and h < m < top:
                a = embed_level(T, h, m)[0]
                b = embed_level(T, m, top)[0]
                if [b[x] for x in a] != pm:
                    return False
    return cover == G.all_points


# base extension of ideal subgeometries

@dataclass
class Extension:
    base: AnchoredSubgeometry
    result: AnchoredSubgeometry
    rules: list
    flags: list
    complete: bool


def _subgqs_in(G: Geometry, I: AnchoredSubgeometry, budget=None):
    subs = [g for g in full_grids(G) if g.le(I)]
    res = thick_full_subgqs(G, budget=budget)
    subs += [s for s in res.items if s.le(I)]
    if (I.points, I.lines) == (G.all_points, G.all_lines):
        subs.append(AnchoredSubgeometry(G, G.all_points, G.all_lines, "whole"))
    return subs, res.complete


def extend_ideal(I: AnchoredSubgeometry, T: Tower, h: int, H: int, budget=None) -> Extension:
    """The base extension of an ideal subgeometry of level h to level H.

    Full lines extend to full lines; a point whose whole pencil lies in I keeps
    its whole pencil; a partial pencil at x is extended inside every full
    subquadrangle through x that meets it in the subquadrangle's own pencil;
    a full subquadrangle extends to the subquadrangle generated by its
    extended lines.
    """
    G = T.level(h).geometry
    if I.parent is not G and I.parent != G:
        raise NotIdeal("the subgeometry does not live on the given level")
    if not I.is_full():
        raise NotIdeal("only subgeometries with full lines can be extended")
    HG = T.level(H).geometry
    pm, lm = embed_level(T, h, H) if h != H else (list(range(G.n_points)), list(range(G.n_lines)))
    rules, flags = [], []
    subs, complete = _subgqs_in(G, I, budget)

    def ext_lines(mask):
        return mask_of(lm[j] for j in bits(mask))

    ext_sub = {}
    for S in subs:
        if popcount(S.lines) < 2:
            continue
        P, L = projection_closure(HG, 0, ext_lines(S.lines), full=True)
        ext_sub[(S.points, S.lines)] = (P, L)
    L = ext_lines(I.lines)
    if I.lines:
        rules.append("C1")
    P = mask_of(pm[p] for p in bits(I.points))
    for x in bits(I.points):
        pencil = G.point_line_mask[x] & I.lines
        if popcount(pencil) < 2:
            continue
        if pencil == G.point_line_mask[x]:
            L |= HG.point_line_mask[pm[x]]
            rules.append("C2")
            continue
        covered = 0
        for S in subs:
            sp = G.point_line_mask[x] & S.lines
            if not S.points >> x & 1 or popcount(sp) < 2 or sp & ~pencil or sp != pencil & S.lines:
                continue
            EP, EL = ext_sub[(S.points, S.lines)]
            L |= HG.point_line_mask[pm[x]] & EL
            covered |= sp
        rules.append("C2.B")
        if pencil & ~covered:
            flags.append(f"pencil at point {x}: lines outside every suitable subquadrangle kept by C1")
    for S in subs:
        if popcount(S.lines) >= 2:
            EP, EL = ext_sub[(S.points, S.lines)]
            L |= EL
            rules.append("C3")
            x = S.points.bit_length() - 1
            if popcount(G.point_line_mask[x] & S.lines) == 2 and popcount(HG.point_line_mask[pm[x]] & EL) != 2:
                flags.append(f"a full grid generates a subgeometry with {popcount(EP)} points, not a grid")
    for j in bits(L):
        P |= HG.line_mask[j]
    out = AnchoredSubgeometry(HG, P, L, f"{I.tag or 'I'} over F_2^{H}")
    return Extension(I, out, sorted(set(rules)), flags, complete)


def grid_extension_report(T: Tower, h: int, H: int) -> dict:
    """What the subquadrangle generated by the extended lines of each level-h full grid is."""
    G, HG = T.level(h).geometry, T.level(H).geometry
    _, lm = embed_level(T, h, H)
    out = {"grids": 0, "to_grids": 0, "to_other": 0, "other_sizes": []}
    for g in full_grids(G):
        P, L = projection_closure(HG, 0, mask_of(lm[j] for j in bits(g.lines)), full=True)
        x = P.bit_length() - 1
        out["grids"] += 1
        if popcount(HG.point_line_mask[x] & L) == 2:
            out["to_grids"] += 1
        else:
            out["to_other"] += 1
            out["other_sizes"].append(popcount(P))
    return out


# descent of closed sets

@dataclass
class DescentResult:
    naive: list
    orbits: list
    rational: list
    flags: list = field(default_factory=list)

    @property
    def size(self) -> int:
        return len(self.orbits)

    def contains(self, sub: AnchoredSubgeometry) -> bool:
        key = (sub.points, sub.lines)
        return any(key in {(m.points, m.lines) for m in o} for o in self.orbits)

    def orbit_primes(self) -> list:
        return [o for o in self.orbits if len(o) > 1]

    def to_dict(self) -> dict:
        return {"naive": len(self.naive), "enriched": len(self.orbits),
                "orbit_sizes": [len(o) for o in self.orbits],
                "kinds": [o[0].tag for o in self.orbits]}


def _grid_pencil(HG: Geometry, U: int, V: int) -> bool:
    """Two concurrent lines lie in a full grid: some W opposite U, meeting V, with (U, W) regular."""
    x = (HG.line_mask[U] & HG.line_mask[V]).bit_length() - 1
    for y in bits(HG.line_mask[V] & ~(1 << x)):
        for W in bits(HG.point_line_mask[y] & ~(1 << V)):
            if is_regular_pair(HG, U, W):
                return True
    return False


def _primes_inside(HG: Geometry, Ibar: AnchoredSubgeometry, subs: list) -> list:
    """Primes inside the extension: points, full lines, whole and two-line pencils, extended subquadrangles."""
    out = [AnchoredSubgeometry(HG, 0, 0, "Empty")]
    seen = {(0, 0)}

    def add(P, L, tag):
        if (P, L) not in seen:
            seen.add((P, L))
            out.append(AnchoredSubgeometry(HG, P, L, tag))

    def pencil(pen):
        pts = 0
        for j in bits(pen):
            pts |= HG.line_mask[j]
        add(pts, pen, "PerpInFullSub")

    for p in bits(Ibar.points):
        add(1 << p, 0, "OrdinaryPoint")
    for j in bits(Ibar.lines):
        add(HG.line_mask[j], 1 << j, "FullLine")
    for x in bits(Ibar.points):
        pen = HG.point_line_mask[x] & Ibar.lines
        if pen == HG.point_line_mask[x]:
            pencil(pen)
        ls = list(bits(pen))
        for a in range(len(ls)):
            for b in range(a + 1, len(ls)):
                if _grid_pencil(HG, ls[a], ls[b]):
                    pencil((1 << ls[a]) | (1 << ls[b]))
    for P, L in subs:
        for x in bits(P):
            pen = HG.point_line_mask[x] & L
            if popcount(pen) >= 2:
                pencil(pen)
        if (P, L) != (HG.all_points, HG.all_lines):
            x = P.bit_length() - 1
            thin = popcount(HG.point_line_mask[x] & L) == 2
            add(P, L, "FullGrid" if thin else "ThickFullSubGQ")
    return out


def descent_closed_set(I: AnchoredSubgeometry, T: Tower, h: int, H: int, budget=None) -> DescentResult:
    """C(I) over level h: Galois orbits of the primes inside the extension of I to level H."""
    G = T.level(h).geometry
    HG = T.level(H).geometry
    naive = closed_set(I, G).members if I.points else [AnchoredSubgeometry(G, 0, 0, "Empty")]
    if not I.points:
        return DescentResult(naive, [[AnchoredSubgeometry(HG, 0, 0, "Empty")]], [])
    ext = extend_ideal(I, T, h, H, budget)
    Ibar = ext.result
    subs = []
    Gsubs, _ = _subgqs_in(G, I, budget)
    pm, lm = embed_level(T, h, H) if h != H else (list(range(G.n_points)), list(range(G.n_lines)))
    for S in Gsubs:
        if popcount(S.lines) >= 2:
            subs.append(projection_closure(HG, 0, mask_of(lm[j] for j in bits(S.lines)), full=True))
    primes = _primes_inside(HG, Ibar, subs)
    fp, fl = frobenius(T, h, H)
    index = {(p.points, p.lines): k for k, p in enumerate(primes)}

    def image(p):
        return (mask_of(fp[x] for x in bits(p.points)), mask_of(fl[j] for j in bits(p.lines)))

    seen, orbits = set(), []
    for k, p in enumerate(primes):
        if k in seen:
            continue
        orb, cur = [], p
        while index[(cur.points, cur.lines)] not in seen:
            seen.add(index[(cur.points, cur.lines)])
            orb.append(cur)
            cur = primes[index[image(cur)]]
        orbits.append(orb)
    rational = [o[0] for o in orbits if len(o) == 1]
    return DescentResult(naive, orbits, rational, ext.flags)


# comparison with the defining curve

def scheme_point_count(i: int, H: int) -> dict:
    """Points of Y^(2^i) = Z X^(2^i - 1) in PG(2, 2^H), against the oval O(i, H).

    The curve's rational points are the oval itself: the affine part
    {(1 : t : t^(2^i))} plus the point (0 : 0 : 1).
    """
    F = gf(2, H)
    e = 2 ** i
    count = 0
    pts = []
    for v in projective_points(F, 2):
        X, Y, Z = v
        if F.pow(Y, e) == F.mul(Z, F.pow(X, e - 1)):
            count += 1
            pts.append(v)
    O = segre_oval(i, H)
    return {"curve_points": count, "oval_points": len(O.points), "affine_part": len(O.points) - 1,
            "same_set": sorted(pts) == sorted(O.points)}

"""The Grothendieck ring of finite incidence geometries.

Generators are isomorphism classes of objects; a cut replaces [Q] by
[Q minus C] + [C] for a closed C.  Each :class:`Ring` fixes one notion of
isomorphism for anchored objects (IDEA1, IDEA2 or PTRACE) and keeps its own
store of representatives.

Objects are :class:`Piece` values: a point set and line set inside a parent
geometry, plus a count of lines that lost every point.  Remnants of the
top-level object are compared as abstract geometries; pieces produced as the
closed part of a cut stay anchored in the top-level parent, which is what
defines their isomorphism type.

The quadric classes at the end live in Z[L] + Z[L][Spec K].
"""
from __future__ import annotations

import threading
from dataclasses import dataclass, field

from .constructions import QuadraticForm, projective_points
from .errors import (NoRationalPoint, NoRepresentative, NotClosedIn, NotFullGrid,
                     UnsupportedObject, WrongBaseType)
from .geometry import Geometry, bits, detect_order, induced, popcount
from .iso import automorphism_group, canonical_form, perm_equivalent, stabilizer_induced
from .product import cartesian_product
from .substructure import AnchoredSubgeometry, base_type, trace_geometry

MODES = ("IDEA1", "IDEA2", "PTRACE")


# objects

@dataclass(frozen=True)
class Piece:
    parent: Geometry
    points: int
    lines: int
    empties: int = 0
    geometric: bool = True
    # lines cut down to a single point; they do not affect the class but
    # become empty lines once that point goes too
    stubs: int = 0

    @property
    def n_points(self) -> int:
        return popcount(self.points)

    def is_whole(self) -> bool:
        return (self.points, self.lines, self.empties) == (self.parent.all_points,
                                                          self.parent.all_lines, 0)

    def geometry(self) -> Geometry:
        return induced(self.parent, self.points, self.lines)[0]

    def anchored(self) -> AnchoredSubgeometry:
        return AnchoredSubgeometry(self.parent, self.points, self.lines)


def as_piece(obj) -> Piece:
    if isinstance(obj, Piece):
        return obj
    if isinstance(obj, Geometry):
        empties = sum(1 for m in obj.markers if m and m[0] == "empty_line")
        return Piece(obj, obj.all_points, obj.all_lines, empties, True)
    if isinstance(obj, AnchoredSubgeometry):
        G = obj.parent
        if (obj.points, obj.lines) == (G.all_points, G.all_lines):
            return Piece(G, obj.points, obj.lines, 0, True)
        return Piece(G, obj.points, obj.lines, 0, False)
    raise UnsupportedObject(f"cannot take the class of {type(obj).__name__}")


def split(P: Piece, C: AnchoredSubgeometry):
    """(P minus C, C) as pieces; C must be closed in P."""
    if C.parent is not P.parent and C.parent != P.parent:
        raise NotClosedIn("the closed set lives in a different parent")
    if C.points & ~P.points or C.lines & ~P.lines:
        raise NotClosedIn("the closed set is not contained in the object")
    G = P.parent
    for j in bits(C.lines):
        if G.line_mask[j] & P.points & ~C.points:
            raise NotClosedIn(f"line {j} of the closed set is not full in the object")
    pts = P.points & ~C.points
    lines, stubs, empties = 0, 0, P.empties
    for j in bits((P.lines | P.stubs) & ~C.lines):
        k = popcount(G.line_mask[j] & pts)
        if k >= 2:
            lines |= 1 << j
        elif k == 1:
            stubs |= 1 << j
        else:
            empties += 1
    rem = Piece(G, pts, lines, empties, P.geometric, stubs)
    closed = Piece(G, C.points, C.lines, 0, C.points == G.all_points and C.lines == G.all_lines)
    return rem, closed


# keys

@dataclass(frozen=True, order=True)
class ClassKey:
    """kind is one of point, empty_line, concrete, anchored, formal."""
    kind: str
    data: tuple = ()

    def __str__(self):
        if self.kind == "point":
            return "[pt]"
        if self.kind == "empty_line":
            return "[L^e]"
        if self.kind == "formal":
            return "*".join(str(k) for k in self.data)
        return f"[{self.kind}:{self.data[0][:10]}{'+%de' % self.data[1] if self.data[1] else ''}]"


POINT = ClassKey("point")
EMPTY_LINE = ClassKey("empty_line")


class RingElement:
    """Immutable map ClassKey -> nonzero integer."""
    __slots__ = ("ring", "terms")

    def __init__(self, ring, terms=None):
        self.ring = ring
        d = {}
        for k, c in (terms or {}).items():
            if c:
                d[k] = c
        self.terms = tuple(sorted(d.items()))

    def as_dict(self) -> dict:
        return dict(self.terms)

    def _coerce(self, other):
        if isinstance(other, int):
            return self.ring.scalar(other)
        if isinstance(other, RingElement):
            if other.ring is not self.ring:
                raise UnsupportedObject("elements of different rings do not mix")
            return other
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        d = self.as_dict()
        for k, c in other.terms:
            d[k] = d.get(k, 0) + c
        return RingElement(self.ring, d)

    __radd__ = __add__

    def __neg__(self):
        return RingElement(self.ring, {k: -c for k, c in self.terms})

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self.ring.mul(self, other)

    __rmul__ = __mul__

    def __eq__(self, other):
        if isinstance(other, int):
            other = self.ring.scalar(other)
        if not isinstance(other, RingElement):
            return NotImplemented
        return self.ring is other.ring and self.terms == other.terms

    def __hash__(self):
        return hash(self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def __repr__(self):
        if not self.terms:
            return "0"
        return " + ".join(f"{c}{k}" if c != 1 else str(k) for k, c in self.terms)

    def to_dict(self) -> dict:
        return {str(k): c for k, c in self.terms}


@dataclass
class _Bucket:
    keys: list = field(default_factory=list)


class Ring:
    """K0 for one notion of isomorphism, with an append-only representative store."""

    def __init__(self, mode: str = "IDEA2"):
        mode = mode.upper()
        if mode not in MODES:
            raise ValueError(f"unknown iso mode {mode}")
        self.mode = mode
        self.reps = {}
        self._npoints = {POINT: 1, EMPTY_LINE: 0}
        self._buckets = {}
        self._joint = {}
        self._products = {}
        self._lock = threading.Lock()

    # elements
    def zero(self) -> RingElement:
        return RingElement(self, {})

    def one(self) -> RingElement:
        return RingElement(self, {POINT: 1})

    def scalar(self, n: int) -> RingElement:
        return RingElement(self, {POINT: n})

    def empty_line(self) -> RingElement:
        return RingElement(self, {EMPTY_LINE: 1})

    def element(self, key: ClassKey, coeff: int = 1) -> RingElement:
        return RingElement(self, {key: coeff})

    def class_of(self, obj) -> RingElement:
        P = as_piece(obj)
        if P.points == 0:
            return RingElement(self, {EMPTY_LINE: P.empties})
        return RingElement(self, {self.key_of(P): 1})

    def key_of(self, obj) -> ClassKey:
        P = as_piece(obj)
        if P.points == 0:
            if P.empties == 1:
                return EMPTY_LINE
            raise UnsupportedObject("only single classes have a key")
        if P.n_points == 1 and P.lines == 0 and P.empties == 0:
            return POINT
        if P.geometric or P.is_whole():
            g = P.geometry()
            key = ClassKey("concrete", (canonical_form(g).digest, P.empties, "abstract"))
        else:
            key = self._anchored_key(P)
        with self._lock:
            if key not in self.reps:
                self.reps[key] = P
                self._npoints[key] = P.n_points
        return key

    def _anchored_key(self, P: Piece) -> ClassKey:
        G = P.parent
        pc = [list(bits(P.points)), list(bits(G.all_points & ~P.points))]
        lc = [list(bits(P.lines)), list(bits(G.all_lines & ~P.lines))]
        if self.mode == "PTRACE":
            try:
                base_type(G, P.anchored())
            except WrongBaseType:
                pass
            else:
                T = trace_geometry(P.anchored())
                cells = ([list(range(T.geometry.n_points))],
                         [[j for j, t in enumerate(T.line_types) if t == "i"],
                          [j for j, t in enumerate(T.line_types) if t == "ii"]])
                d = canonical_form(T.geometry, *cells).digest
                return ClassKey("anchored", ("PT" + d, P.empties, self.mode))
        if self.mode in ("IDEA1", "PTRACE"):
            return ClassKey("anchored", (canonical_form(G, pc, lc).digest, P.empties, self.mode))
        # IDEA2: isomorphic pieces with permutation-equivalent induced groups
        sub = P.geometry()
        grp, _, _ = stabilizer_induced(G, bits(P.points), bits(P.lines))
        sig = (canonical_form(sub).digest, grp.order(), tuple(sorted(grp.orbit_lengths())), P.empties)
        colour = [0] * sub.n_points + [1] * sub.n_lines
        # IDEA1 implies IDEA2, so equal joint certificates settle it without a search
        joint = (canonical_form(G, pc, lc).digest, P.empties)
        with self._lock:
            if joint in self._joint:
                return self._joint[joint]
            bucket = self._buckets.setdefault(sig, _Bucket())
            for k, g2 in bucket.keys:
                if perm_equivalent(grp, g2, colour, colour) is not None:
                    self._joint[joint] = k
                    return k
            k = ClassKey("anchored", (f"{sig[0]}:{len(bucket.keys)}", P.empties, self.mode))
            bucket.keys.append((k, grp))
            self._joint[joint] = k
            return k

    def representative(self, key: ClassKey) -> Piece:
        if key not in self.reps:
            raise NoRepresentative(f"no stored representative for {key}")
        return self.reps[key]

    def point_count(self, key: ClassKey) -> int:
        if key.kind == "formal":
            n = 1
            for k in key.data:
                n *= self.point_count(k)
            return n
        if key not in self._npoints:
            raise NoRepresentative(f"no stored representative for {key}")
        return self._npoints[key]

    # arithmetic
    def add(self, a: RingElement, b: RingElement) -> RingElement:
        return a + b

    def mul(self, a: RingElement, b: RingElement) -> RingElement:
        out = {}
        for ka, ca in a.terms:
            for kb, cb in b.terms:
                for k, c in self._mul_keys(ka, kb).items():
                    out[k] = out.get(k, 0) + ca * cb * c
        return RingElement(self, out)

    def _is_concrete(self, k: ClassKey) -> bool:
        return k.kind == "concrete" and k.data[1] == 0

    def _mul_keys(self, a: ClassKey, b: ClassKey) -> dict:
        if a == POINT:
            return {b: 1}
        if b == POINT:
            return {a: 1}
        if a == EMPTY_LINE and b == EMPTY_LINE:
            return {}
        if a == EMPTY_LINE:
            return {EMPTY_LINE: self.point_count(b)}
        if b == EMPTY_LINE:
            return {EMPTY_LINE: self.point_count(a)}
        # concrete factors multiply out; the rest stays a formal multiset
        conc, other = [], []
        for k in (a, b):
            for f in (k.data if k.kind == "formal" else (k,)):
                (conc if self._is_concrete(f) else other).append(f)
        c = None
        for f in conc:
            c = f if c is None else self._concrete_product(c, f)
        factors = sorted(([c] if c is not None else []) + other)
        if len(factors) == 1:
            return {factors[0]: 1}
        return {ClassKey("formal", tuple(factors)): 1}

    def _concrete_product(self, a: ClassKey, b: ClassKey) -> ClassKey:
        pair = tuple(sorted((a, b)))
        if pair in self._products:
            return self._products[pair]
        G = self.representative(a).geometry()
        H = self.representative(b).geometry()
        P = cartesian_product(G, H).with_meta(origin="product")
        k = self.key_of(P)
        self._products[pair] = k
        return k

    # scissors
    def cut(self, term, C: AnchoredSubgeometry) -> RingElement:
        """[term minus C] + [C]."""
        if isinstance(term, ClassKey):
            term = self.representative(term)
        elif isinstance(term, RingElement):
            if len(term.terms) != 1 or term.terms[0][1] != 1:
                raise UnsupportedObject("cut applies to a single class")
            term = self.representative(term.terms[0][0])
        P = as_piece(term)
        rem, closed = split(P, C)
        return self.class_of(rem) + self.class_of(closed)

    def empty_line_product(self, S) -> RingElement:
        """[L^e] * [S] = |S*| [L^e]."""
        if isinstance(S, (Geometry, AnchoredSubgeometry, Piece)):
            S = self.class_of(S)
        if isinstance(S, ClassKey):
            S = self.element(S)
        for k, _ in S.terms:
            if k not in (POINT, EMPTY_LINE) and k.kind != "formal" and k not in self.reps:
                raise NoRepresentative(f"no stored representative for {k}")
        return self.empty_line() * S


# identities

def _stabilizer_of_sets(G: Geometry, point_sets, line_sets):
    """Automorphisms of G fixing each listed set setwise."""
    def cells(n, sets):
        sig = {}
        for x in range(n):
            sig.setdefault(tuple(s >> x & 1 for s in sets), []).append(x)
        return [sig[k] for k in sorted(sig)]
    return automorphism_group(G, cells(G.n_points, point_sets), cells(G.n_lines, line_sets))


def _check_full_grid(X: Geometry, gamma: AnchoredSubgeometry, L: int):
    if not gamma.is_full():
        raise NotFullGrid("the grid has a line that is not full")
    o = detect_order(gamma.geometry())
    ox = detect_order(X)
    if o is None or ox is None or o.t != 1 or o.s != ox.s or popcount(gamma.lines) != 2 * (o.s + 1):
        raise NotFullGrid("not a full grid of the parent")
    if not gamma.lines >> L & 1:
        raise NotFullGrid(f"line {L} is not a line of the grid")


def grid_line_scissor_report(X: Geometry, gamma: AnchoredSubgeometry, L: int, mode: str = "IDEA2") -> dict:
    """Decompose [X] as X-G, G-L, L and as (X-L)-(G-L), G-L, L and compare.

    The first two residues agree term by term, so the line viewed inside the
    grid and the line viewed inside X carry the same class.
    """
    _check_full_grid(X, gamma, L)
    R = Ring(mode)
    top = as_piece(X)
    line = AnchoredSubgeometry(X, X.line_mask[L], 1 << L)
    r1, g = split(top, gamma)
    r2, l1 = split(g, line)
    s1, l2 = split(top, line)
    rest = AnchoredSubgeometry(X, gamma.points & ~X.line_mask[L], gamma.lines & ~(1 << L))
    s2, g2 = split(s1, rest)
    d1 = [R.class_of(r1), R.class_of(r2), R.class_of(l1)]
    d2 = [R.class_of(s2), R.class_of(g2), R.class_of(l2)]
    residues_match = d1[0] == d2[0] and d1[1] == d2[1]
    whole = R.class_of(X)
    # induced groups on the line: inside the grid-and-line stabilizer vs the line stabilizer
    dom = list(bits(X.line_mask[L]))
    in_grid = _stabilizer_of_sets(X, [gamma.points, X.line_mask[L]], [gamma.lines, 1 << L]).restrict(dom)
    alone = _stabilizer_of_sets(X, [X.line_mask[L]], [1 << L]).restrict(dom)
    return {
        "holds": residues_match and d1[2] == d2[2] and sum(d1, R.zero()) == sum(d2, R.zero()),
        "residues_match": residues_match,
        "first": [repr(e) for e in d1],
        "second": [repr(e) for e in d2],
        "whole": repr(whole),
        "line_group_in_grid": in_grid.order(),
        "line_group_in_parent": alone.order(),
        "line_groups_equivalent": perm_equivalent(in_grid, alone) is not None,
    }


def grid_line_scissor_identity(X: Geometry, gamma: AnchoredSubgeometry, L: int, mode: str = "IDEA2") -> bool:
    return grid_line_scissor_report(X, gamma, L, mode)["holds"]


def hyperplane_kind(X: Geometry, H: AnchoredSubgeometry) -> str:
    if H.lines == 0:
        return "ovoid"
    common = X.all_points
    for j in bits(H.lines):
        common &= X.line_mask[j]
    return "perp" if common else "subquadrangle"


def hyperplane_scissor(R: Ring, X: Geometry, H: AnchoredSubgeometry) -> dict:
    """[X] = [X minus H] + [H] with the affine part keeping every line not in H."""
    rem, closed = split(as_piece(X), H)
    parts_ok = (rem.points | closed.points) == X.all_points and not rem.points & closed.points
    lines_ok = (rem.lines | H.lines) == X.all_lines and rem.empties == 0
    return {"kind": hyperplane_kind(X, H), "element": R.class_of(rem) + R.class_of(closed),
            "affine_points": rem.n_points, "affine_lines": popcount(rem.lines),
            "holds": parts_ok and lines_ok}


def removal_changes_class(R: Ring, X: Geometry, C: AnchoredSubgeometry) -> bool:
    """Removing a nonempty closed set of points or full lines gives a different key."""
    rem, _ = split(as_piece(X), C)
    if rem.points == 0:
        return True
    return R.key_of(rem) != R.key_of(X)


# quadric classes

K_KINDS = ("Fq", "Fq2", "dual")


def _trim(c) -> tuple:
    c = list(c)
    while c and c[-1] == 0:
        c.pop()
    return tuple(c)


def _padd(a, b) -> tuple:
    n = max(len(a), len(b))
    return _trim((a[i] if i < len(a) else 0) + (b[i] if i < len(b) else 0) for i in range(n))


def _pmul(a, b) -> tuple:
    if not a or not b:
        return ()
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            out[i + j] += x * y
    return _trim(out)


def _peval(a, x: int) -> int:
    return sum(c * x ** i for i, c in enumerate(a))


@dataclass(frozen=True)
class MotivicClass:
    """a(L) + b(L) [Spec K]; K is F_q, F_{q^2} or the dual numbers over F_q."""
    a: tuple = ()
    b: tuple = ()
    K: str = "Fq"

    def __post_init__(self):
        if self.K not in K_KINDS:
            raise ValueError(f"unknown field descriptor {self.K}")
        a, b = _trim(self.a), _trim(self.b)
        if self.K == "Fq":
            a, b = _padd(a, b), ()
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)

    @classmethod
    def L(cls, k: int = 1) -> "MotivicClass":
        return cls((0,) * k + (1,))

    @classmethod
    def const(cls, n: int) -> "MotivicClass":
        return cls((n,))

    @classmethod
    def spec_k(cls, K: str = "Fq2") -> "MotivicClass":
        return cls((), (1,), K)

    def _join(self, other) -> str:
        if not other.b:
            return self.K
        if not self.b:
            return other.K
        if self.K != other.K:
            raise ValueError("classes over different extensions do not mix")
        return self.K

    def __add__(self, other):
        K = self._join(other)
        return MotivicClass(_padd(self.a, other.a), _padd(self.b, other.b), K)

    def __mul__(self, other):
        K = self._join(other)
        sq = 2 if K == "Fq2" else 1
        a = _pmul(self.a, other.a)
        b = _padd(_padd(_pmul(self.a, other.b), _pmul(self.b, other.a)),
                  tuple(sq * c for c in _pmul(self.b, other.b)))
        return MotivicClass(a, b, K)

    def to_dict(self) -> dict:
        return {"a": list(self.a), "b": list(self.b), "K": self.K}

    @classmethod
    def from_dict(cls, d: dict) -> "MotivicClass":
        return cls(tuple(d["a"]), tuple(d["b"]), d["K"])

    def __str__(self):
        def poly(c):
            ts = []
            for i, x in reversed(list(enumerate(c))):
                if x:
                    mon = "" if i == 0 else ("L" if i == 1 else f"L^{i}")
                    coef = str(x) if (x != 1 or i == 0) else ""
                    ts.append(coef + mon)
            return " + ".join(ts)
        s = poly(self.a)
        if self.b:
            s = (s + " + " if s else "") + f"({poly(self.b)})[Spec {self.K}]"
        return s or "0"


def hom_count(K: str, m: int) -> int:
    """Number of F_q-embeddings of K into F_{q^m}, with the dual numbers reduced to F_q."""
    if K == "Fq2":
        return 0 if m % 2 else 2
    return 1


def evaluate_count(M: MotivicClass, q: int, m: int = 1) -> int:
    x = q ** m
    return _peval(M.a, x) + _peval(M.b, x) * hom_count(M.K, m)


def _binary_class(F, a: int, b: int, c: int) -> MotivicClass:
    if not (a or b or c):
        return MotivicClass((1, 1))
    roots = 1 if a == 0 else 0
    for t in F.elements:
        if F.add(F.add(F.mul(a, F.mul(t, t)), F.mul(b, t)), c) == 0:
            roots += 1
    if roots == 0:
        return MotivicClass.spec_k("Fq2")
    return MotivicClass.const(roots)


def _least_zero(Q: QuadraticForm):
    for x in projective_points(Q.F, Q.n):
        if Q(x) == 0:
            return x
    return None


def quadric_class(Q: QuadraticForm) -> MotivicClass:
    """Class of the projective quadric Q = 0 in P^n over F_q, n = nvars - 1.

    n = 0 and n = 1 are read off directly.  Otherwise take the least rational
    point u: at a vertex the quadric is a cone over a hyperplane section, and
    at a smooth point projection from u gives L^(n-1) + 1 + L[Q'] with Q' the
    form on a complement of u in the tangent hyperplane.
    """
    F, n = Q.F, Q.n
    if n == 0:
        return MotivicClass.const(1 if Q.coeff(0, 0) == 0 else 0)
    if n == 1:
        return _binary_class(F, Q.coeff(0, 0), Q.coeff(0, 1), Q.coeff(1, 1))
    u = _least_zero(Q)
    if u is None:
        raise NoRationalPoint(f"no rational point on a quadric in P^{n}")
    e = [tuple(1 if i == j else 0 for i in range(Q.nvars)) for j in range(Q.nvars)]
    c = [Q.polar(u, e[j]) for j in range(Q.nvars)]
    if not any(c):
        i0 = next(i for i, x in enumerate(u) if x)
        W = [e[j] for j in range(Q.nvars) if j != i0]
        return MotivicClass.const(1) + MotivicClass.L() * quadric_class(Q.substitute(W))
    k = next(i for i, x in enumerate(c) if x)
    ck = F.inv(c[k])
    kernel = {}
    for j in range(Q.nvars):
        if j == k:
            continue
        v = list(e[j])
        v[k] = F.neg(F.mul(c[j], ck))
        kernel[j] = tuple(v)
    j0 = next(j for j in kernel if u[j])
    W = [kernel[j] for j in sorted(kernel) if j != j0]
    return MotivicClass.L(n - 1) + MotivicClass.const(1) + MotivicClass.L() * quadric_class(Q.substitute(W))

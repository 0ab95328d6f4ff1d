"""Isomorphism of substructures relative to their parents.

* ``idea1_isomorphic``: some isomorphism of the parents carries one
  substructure onto the other.
* ``idea2_isomorphic``: the substructures are isomorphic and their induced
  stabilizer groups are equivalent as permutation groups.
* ``p_trace_isomorphic``: the trace geometries are isomorphic by a map that
  sends original lines to original lines.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

from .errors import IncompatibleTypes
from .geometry import Geometry, bits
from .groups import PermGroup
from .iso import are_isomorphic, perm_equivalent, stabilizer_induced
from .substructure import AnchoredSubgeometry, TraceGeometry, trace_geometry


@dataclass
class AnchoredLine:
    line: int
    parent: Geometry
    induced: PermGroup
    kernel: int


def anchored_line(G: Geometry, U: int) -> AnchoredLine:
    grp, kernel, _ = stabilizer_induced(G, G.lines[U], ())
    return AnchoredLine(U, G, grp, kernel)


def _cells(S: AnchoredSubgeometry):
    G = S.parent
    inp = list(bits(S.points))
    inl = list(bits(S.lines))
    outp = [p for p in range(G.n_points) if not S.points >> p & 1]
    outl = [j for j in range(G.n_lines) if not S.lines >> j & 1]
    return [inp, outp], [inl, outl]


def idea1_isomorphic(A, B):
    """An isomorphism of the parents mapping A onto B, or None.

    A bare Geometry is an abstract object with no parent; it is only ever
    compared with another bare Geometry.
    """
    if isinstance(A, Geometry) or isinstance(B, Geometry):
        if isinstance(A, Geometry) and isinstance(B, Geometry):
            return are_isomorphic(A, B)
        return None
    if (A.n_points, A.n_lines) != (B.n_points, B.n_lines):
        return None
    return are_isomorphic(A.parent, B.parent, _cells(A), _cells(B))


def induced_group(S: AnchoredSubgeometry):
    """Setwise stabilizer of S acting on its points then lines, and the kernel order."""
    return _induced(S.parent, S.points, S.lines)


@lru_cache(maxsize=512)
def _induced(G: Geometry, points: int, lines: int):
    grp, kernel, _ = stabilizer_induced(G, bits(points), bits(lines))
    return grp, kernel


def idea2_isomorphic(A: AnchoredSubgeometry, B: AnchoredSubgeometry):
    """A bijection of elements conjugating the induced groups, or None."""
    if not isinstance(A, AnchoredSubgeometry) or not isinstance(B, AnchoredSubgeometry):
        raise IncompatibleTypes("IDEA 2 compares substructures inside parents")
    if (A.n_points, A.n_lines) != (B.n_points, B.n_lines):
        return None
    if are_isomorphic(A.geometry(), B.geometry()) is None:
        return None
    ga, _ = induced_group(A)
    gb, _ = induced_group(B)
    colour = [0] * A.n_points + [1] * A.n_lines
    return perm_equivalent(ga, gb, colour, colour)


def _trace_cells(T: TraceGeometry):
    orig = [j for j, ty in enumerate(T.line_types) if ty == "i"]
    sub = [j for j, ty in enumerate(T.line_types) if ty == "ii"]
    return None, [orig, sub]


def trace_isomorphic(T1: TraceGeometry, T2: TraceGeometry):
    """Plain isomorphism of the trace geometries, ignoring line types."""
    return are_isomorphic(T1.geometry, T2.geometry)


def p_trace_isomorphic(T1, T2):
    """Isomorphism of trace geometries sending type-(i) lines to type-(i) lines.

    Arguments may be TraceGeometry objects or anchored bases.
    """
    if isinstance(T1, AnchoredSubgeometry):
        T1 = trace_geometry(T1)
    if isinstance(T2, AnchoredSubgeometry):
        T2 = trace_geometry(T2)
    if T1.line_types.count("i") != T2.line_types.count("i"):
        return None
    return are_isomorphic(T1.geometry, T2.geometry, _trace_cells(T1), _trace_cells(T2))

"""K4 cell classification and the closed-form single-cell self-stress.

A planar tensegrity cell is a complete graph on four points A, B, C, D in
general position.  Its six force densities are fixed up to one scale factor;
each component is a ratio of signed triangle areas obtained by eliminating
the nodal equilibrium equations with 2D cross products.  Member order is

    w1=(A,B)  w2=(C,B)  w3=(C,D)  w4=(A,D)  w5=(A,C)  w6=(B,D)

which matches the incidences (A: w1,w4,w5), (C: w2,w3,w5), (B: w1,w2,w6),
(D: w4,w3,w6) used in the elimination.
"""

from __future__ import annotations

import math
from enum import Enum

import numpy as np

from .errors import DegeneratePosition
from .geom import DEFAULT_TOL, Orientation, Point, Tolerance, affine_area_f, coord_span, orientation

# Member endpoints as index pairs into the (a, b, c, d) argument order.
CELL_MEMBER_PAIRS = ((0, 1), (2, 1), (2, 3), (0, 3), (0, 2), (1, 3))


class CellType(str, Enum):
    TYPE_I = "TypeI"
    TYPE_II = "TypeII"


def _interior_index(pts, tol):
    """Index of the point strictly inside the triangle of the other three,
    or None when the four points are in convex position."""
    for i in range(4):
        tri = [pts[j] for j in range(4) if j != i]
        sides = [
            orientation(tri[0], tri[1], pts[i], tol),
            orientation(tri[1], tri[2], pts[i], tol),
            orientation(tri[2], tri[0], pts[i], tol),
        ]
        if Orientation.COLLINEAR in sides:
            continue
        if len({s for s in sides}) == 1:
            return i
    return None


def classify_cell(a: Point, b: Point, c: Point, d: Point, tol: Tolerance = DEFAULT_TOL) -> CellType:
    """TypeI iff the four points are in convex position, TypeII when one point
    lies inside the triangle of the other three."""
    pts = (a, b, c, d)
    for i in range(4):
        for j in range(i + 1, 4):
            for k in range(j + 1, 4):
                if orientation(pts[i], pts[j], pts[k], tol) is Orientation.COLLINEAR:
                    raise DegeneratePosition(f"points {i}, {j}, {k} are collinear")
    return CellType.TYPE_II if _interior_index(pts, tol) is not None else CellType.TYPE_I


def cell_member_groups(a: Point, b: Point, c: Point, d: Point, tol: Tolerance = DEFAULT_TOL):
    """The two typology groups of the cell, as index tuples into the w order.

    TypeI: (4 hull edges, 2 diagonals).  TypeII: (3 envelope edges, 3 spokes
    to the interior point).  Signs in the self-stress are uniform within each
    group and opposite across the two.
    """
    pts = (a, b, c, d)
    kind = classify_cell(a, b, c, d, tol)
    pair_index = {frozenset(p): i for i, p in enumerate(CELL_MEMBER_PAIRS)}
    if kind is CellType.TYPE_II:
        interior = _interior_index(pts, tol)
        spokes = tuple(sorted(i for p, i in pair_index.items() if interior in p))
        envelope = tuple(sorted(i for p, i in pair_index.items() if interior not in p))
        return envelope, spokes
    # Convex position: order the corners around the centroid to find the hull.
    cx = sum(p.x for p in pts) / 4.0
    cy = sum(p.y for p in pts) / 4.0
    hull = sorted(range(4), key=lambda i: math.atan2(pts[i].y - cy, pts[i].x - cx))
    edges = [frozenset((hull[i], hull[(i + 1) % 4])) for i in range(4)]
    hull_members = tuple(sorted(pair_index[e] for e in edges))
    diagonals = tuple(sorted(set(range(6)) - set(hull_members)))
    return hull_members, diagonals


def cell_selfstress(
    a: Point, b: Point, c: Point, d: Point, w1: float, tol: Tolerance = DEFAULT_TOL
) -> np.ndarray:
    """The unique (up to scale) self-stress of the cell, with first component w1.

    Components are ratios of the four signed areas f(A,B,C), f(A,C,D),
    f(A,B,D), f(B,C,D); a vanishing denominator means the configuration is
    degenerate.  The result satisfies nodal equilibrium at all four nodes.
    """
    if w1 == 0.0:
        raise ValueError("w1 must be nonzero")
    f_abc = affine_area_f(a, b, c)
    f_acd = affine_area_f(a, c, d)
    f_abd = affine_area_f(a, b, d)
    f_bcd = affine_area_f(b, c, d)
    span = coord_span((a, b, c, d))
    floor = tol.rel_eps * span * span
    if min(abs(f_abc), abs(f_acd), abs(f_abd), abs(f_bcd)) <= floor:
        raise DegeneratePosition("zero affine area among the cell triangles")
    unit = np.array(
        [
            1.0,
            f_abd / f_bcd,
            (f_abc * f_abd) / (f_acd * f_bcd),
            f_abc / f_acd,
            -f_abd / f_acd,
            -f_abc / f_bcd,
        ]
    )
    return w1 * unit

"""Planar geometric primitives: signed affine area, orientation, general position.

Everything downstream (cell states, wheel recurrences, fusion placement)
reduces to ratios of the signed-area function ``affine_area_f``, so this is
the one place where degeneracy thresholds are decided.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum


@dataclass(frozen=True)
class Point:
    x: float
    y: float

    def __post_init__(self):
        object.__setattr__(self, "x", float(self.x))
        object.__setattr__(self, "y", float(self.y))
        if not (math.isfinite(self.x) and math.isfinite(self.y)):
            raise ValueError(f"non-finite coordinates ({self.x}, {self.y})")


@dataclass(frozen=True)
class Tolerance:
    """Relative degeneracy threshold: |area| <= rel_eps * span^2 counts as flat."""

    rel_eps: float = 1e-9

    def __post_init__(self):
        if not 0.0 < self.rel_eps < 1e-3:
            raise ValueError(f"rel_eps must lie in (0, 1e-3), got {self.rel_eps}")


DEFAULT_TOL = Tolerance()


class Orientation(Enum):
    CCW = 1
    CW = -1
    COLLINEAR = 0


def affine_area_f(a: Point, b: Point, c: Point) -> float:
    """Twice the signed area of triangle abc.

    Computed as the cross product (b-a) x (c-a) rather than the raw 3x3
    determinant: same value, better conditioned near collinear inputs.
    Positive for counterclockwise abc, zero iff a, b, c sit on one line.
    """
    return (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x)


def coord_span(points) -> float:
    """Largest coordinate extent of the points along either axis."""
    xs = [p.x for p in points]
    ys = [p.y for p in points]
    return max(max(xs) - min(xs), max(ys) - min(ys))


def orientation(a: Point, b: Point, c: Point, tol: Tolerance = DEFAULT_TOL) -> Orientation:
    """Sign of the triangle abc; collinear when the area is below the
    relative threshold (area scales with span squared, so the test does too)."""
    f = affine_area_f(a, b, c)
    s = coord_span((a, b, c))
    if abs(f) <= tol.rel_eps * s * s:
        return Orientation.COLLINEAR
    return Orientation.CCW if f > 0 else Orientation.CW


def is_general_position(points, tol: Tolerance = DEFAULT_TOL) -> bool:
    """True iff no three of the points are collinear. Vacuously true below 3."""
    pts = list(points)
    n = len(pts)
    for i in range(n):
        for j in range(i + 1, n):
            for k in range(j + 1, n):
                if orientation(pts[i], pts[j], pts[k], tol) is Orientation.COLLINEAR:
                    return False
    return True

import numpy as np
import pytest

from tensegrid.geom import Point, Tolerance, is_general_position
from tensegrid.model import Structure, new_structure
from tensegrid.multiply import adhere


# Sampling tolerance is tighter than the default so fixtures are never
# borderline-degenerate for the code under test.
SAMPLE_TOL = Tolerance(rel_eps=1e-6)


def random_quadruple(rng, box=10.0):
    while True:
        pts = [Point(*xy) for xy in rng.uniform(-box, box, size=(4, 2))]
        if is_general_position(pts, SAMPLE_TOL):
            return pts


def random_convex_wheel(rng, n):
    """Convex rim of n nodes around an interior center at the origin."""
    while True:
        gaps = rng.uniform(1.0, 2.0, size=n)
        angles = np.cumsum(gaps) / np.sum(gaps) * 2 * np.pi
        radii = rng.uniform(1.0, 1.3, size=n)
        pts = [Point(r * np.cos(a), r * np.sin(a)) for r, a in zip(radii, angles)]
        cross = [
            (pts[(k + 1) % n].x - pts[k].x) * (pts[(k + 2) % n].y - pts[(k + 1) % n].y)
            - (pts[(k + 1) % n].y - pts[k].y) * (pts[(k + 2) % n].x - pts[(k + 1) % n].x)
            for k in range(n)
        ]
        if all(c > 1e-3 for c in cross):
            return pts


def build_wheel_structure(center: Point, rim_pts):
    s = new_structure()
    c = s.add_node(center)
    rim = [s.add_node(p) for p in rim_pts]
    n = len(rim)
    for k in range(n):
        s.add_member(rim[k], rim[(k + 1) % n])
        s.add_member(c, rim[k])
    return s, c, rim


def three_cell_structure() -> Structure:
    """Three cells: the second shares one member with the first, the third
    shares two members (three nodes) and closes a wheel around node 3."""
    s = new_structure()
    adhere(s, [Point(0, 0), Point(3, 0), Point(1.2, 1.4), Point(-1, 3)])
    adhere(s, [2, 3, Point(4, 3), Point(6, 1)])
    adhere(s, [3, 4, 5, Point(1.5, 5)])
    return s


# Jittered 3x3 grid, row-major from the top: p1..p9; p5 is the center.
GRID = {
    1: Point(0.00, 2.03), 2: Point(1.07, 2.11), 3: Point(2.04, 1.98),
    4: Point(-0.06, 0.93), 5: Point(1.02, 1.04), 6: Point(2.13, 0.95),
    7: Point(0.04, -0.08), 8: Point(0.97, 0.02), 9: Point(2.06, -0.04),
}


def four_cell_structure(remove_center_right=False):
    """Four quad cells tiling the jittered grid.  Structure node ids:
    1=p1 2=p2 3=p5 4=p4 5=p3 6=p6 7=p7 8=p8 9=p9 (insertion order)."""
    from tensegrid.multiply import fuse

    s = new_structure()
    adhere(s, [GRID[1], GRID[2], GRID[5], GRID[4]])
    adhere(s, [2, 3, GRID[3], GRID[6]])
    adhere(s, [4, 3, GRID[7], GRID[8]])
    if remove_center_right:
        fuse(s, [3, 6, 8, GRID[9]], remove=[(3, 6)])
    else:
        adhere(s, [3, 6, 8, GRID[9]])
    return s


@pytest.fixture
def rng():
    return np.random.default_rng(20260808)

import math

import numpy as np
import pytest

from tensegrid.cells import CellType, cell_member_groups, cell_selfstress, classify_cell
from tensegrid.errors import DegeneratePosition
from tensegrid.geom import Point, affine_area_f
from tensegrid.model import new_structure
from tensegrid.stress import equilibrium_residual, nullspace_basis

from conftest import random_quadruple

SQUARE = (Point(0, 0), Point(1, 0), Point(1, 1), Point(0, 1))


def _cell_nullspace(points):
    s = new_structure()
    s.insert_cell(list(points))
    return s, nullspace_basis(s)


def test_classify_examples():
    assert classify_cell(*SQUARE) is CellType.TYPE_I
    tri_centroid = (Point(0, 0), Point(2, 0), Point(1, math.sqrt(3)), Point(1, 0.6))
    assert classify_cell(*tri_centroid) is CellType.TYPE_II
    with pytest.raises(DegeneratePosition):
        classify_cell(Point(0, 0), Point(1, 0), Point(2, 0), Point(0, 1))


def test_square_state_is_unit_pattern():
    w = cell_selfstress(*SQUARE, 1.0)
    assert np.allclose(w, [1, 1, 1, 1, -1, -1])
    s, basis = _cell_nullspace(SQUARE)
    assert basis.dim == 1
    assert equilibrium_residual(s, w) <= 1e-12


def test_w4_over_w1_matches_area_ratio(rng):
    for _ in range(50):
        a, b, c, d = random_quadruple(rng)
        w = cell_selfstress(a, b, c, d, 1.0)
        expected = affine_area_f(a, b, c) / affine_area_f(a, c, d)
        assert w[3] == pytest.approx(expected, rel=1e-12)


def test_state_lies_in_cell_nullspace(rng):
    for _ in range(50):
        pts = random_quadruple(rng)
        s, basis = _cell_nullspace(pts)
        assert basis.dim == 1
        w = cell_selfstress(*pts, 1.0)
        wn = w / np.linalg.norm(w)
        v = basis.states[:, 0]
        assert np.linalg.norm(v - (v @ wn) * wn) <= 1e-8
        assert equilibrium_residual(s, w) <= 1e-9


def test_scale_equivariance_exact_for_powers_of_two(rng):
    pts = random_quadruple(rng)
    base = cell_selfstress(*pts, 1.0)
    for lam in (2.0, 0.5, 8.0, -4.0):
        assert np.array_equal(cell_selfstress(*pts, lam), lam * base)


def test_scale_equivariance_general(rng):
    pts = random_quadruple(rng)
    base = cell_selfstress(*pts, 1.0)
    for lam in (3.7, -0.213, 1e3):
        assert np.allclose(cell_selfstress(*pts, lam), lam * base, rtol=1e-15)


def test_zero_w1_rejected():
    with pytest.raises(ValueError):
        cell_selfstress(*SQUARE, 0.0)


def test_sign_pattern_follows_typology_groups(rng):
    for _ in range(100):
        pts = random_quadruple(rng)
        w = cell_selfstress(*pts, 1.0)
        group_a, group_b = cell_member_groups(*pts)
        signs_a = {np.sign(w[i]) for i in group_a}
        signs_b = {np.sign(w[i]) for i in group_b}
        assert len(signs_a) == 1 and len(signs_b) == 1
        assert signs_a != signs_b


def test_ratio_invariance_under_rigid_motion(rng):
    pts = random_quadruple(rng)
    w0 = cell_selfstress(*pts, 1.0)
    theta, tx, ty = 0.83, 5.0, -2.5
    ct, st_ = math.cos(theta), math.sin(theta)
    moved = [Point(ct * p.x - st_ * p.y + tx, st_ * p.x + ct * p.y + ty) for p in pts]
    w1 = cell_selfstress(*moved, 1.0)
    assert np.allclose(w1 / w1[0], w0 / w0[0], rtol=1e-10)


def test_ratio_invariance_under_uniform_scaling(rng):
    pts = random_quadruple(rng)
    w0 = cell_selfstress(*pts, 1.0)
    lam = 37.5
    scaled = [Point(lam * p.x, lam * p.y) for p in pts]
    w1 = cell_selfstress(*scaled, 1.0)
    assert np.allclose(w1, w0, rtol=1e-10)


def test_triangle_centroid_spokes_carry_minus_three(rng):
    # Centroid splits the triangle into three equal areas, so every spoke
    # density is -3x the envelope density; confirmed against the oracle.
    tri = [Point(0, 0), Point(4, 0), Point(1.5, 3.5)]
    cx = sum(p.x for p in tri) / 3
    cy = sum(p.y for p in tri) / 3
    pts = (*tri, Point(cx, cy))
    w = cell_selfstress(*pts, 1.0)
    envelope, spokes = cell_member_groups(*pts)
    env_vals = w[list(envelope)]
    spoke_vals = w[list(spokes)]
    assert np.allclose(spoke_vals, -3.0 * env_vals[0], rtol=1e-9)
    s, basis = _cell_nullspace(pts)
    assert basis.dim == 1
    assert equilibrium_residual(s, w) <= 1e-9

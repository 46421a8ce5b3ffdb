import numpy as np
import pytest
from hypothesis import given, strategies as st

from tensegrid.errors import DegeneratePosition, DegenerateResult, NoSolution, TooManyRemovals
from tensegrid.cells import cell_selfstress
from tensegrid.geom import Point, affine_area_f, coord_span
from tensegrid.model import new_structure
from tensegrid.multiply import (
    adhere,
    degrees_of_freedom,
    delta_dim,
    fuse,
    laman_bound,
    place_fusion_node,
    placement_lines,
    rigidity_report,
)
from tensegrid.stress import nullity

from conftest import four_cell_structure, random_quadruple, three_cell_structure


def test_laman_bound_examples():
    s = new_structure()
    assert laman_bound(s) == 0
    adhere(s, [Point(0, 0), Point(3, 0), Point(1.2, 1.4), Point(-1, 3)])
    assert laman_bound(s) == 1
    adhere(s, [2, 3, Point(4, 3), Point(6, 1)])
    assert (s.n_active_members, s.n_active_nodes) == (11, 6)
    assert laman_bound(s) == 2
    adhere(s, [3, 4, 5, Point(1.5, 5)])
    assert (s.n_active_members, s.n_active_nodes) == (15, 7)
    assert laman_bound(s) == 4


def test_delta_dim_table():
    assert delta_dim(5, 2) == 1
    assert delta_dim(4, 2) == 0
    assert delta_dim(4, 1) == 2
    assert delta_dim(-2, 0) == -2
    assert delta_dim(6, 0) == 6
    assert delta_dim(0, 0) == 0


@given(st.integers(-50, 50), st.integers(-20, 20))
def test_delta_dim_matches_bound_change(e, v):
    # the bookkeeping identity is exactly the change of 3 + |E| - 2|V|
    base_e, base_v = 100, 40
    before = 3 + base_e - 2 * base_v
    after = 3 + (base_e + e) - 2 * (base_v + v)
    assert delta_dim(e, v) == after - before


def test_degrees_of_freedom_branches():
    s = three_cell_structure()
    assert degrees_of_freedom(s, nullity(s)) == 0
    bare = new_structure()
    a, b, c = (bare.add_node(p) for p in (Point(0, 0), Point(1, 0), Point(0, 1)))
    bare.add_member(a, b)
    bare.add_member(b, c)
    bare.add_member(a, c)
    assert laman_bound(bare) == 0
    assert degrees_of_freedom(bare, nullity(bare)) == 0
    tiny = new_structure()
    tiny.add_node(Point(0, 0))
    assert degrees_of_freedom(tiny, 0) == 0


def test_single_cell_is_rigid(rng):
    s = new_structure()
    adhere(s, random_quadruple(rng))
    report = rigidity_report(s, nullity(s))
    assert report.laman_bound == 1 and report.nullity == 1 and report.mechanisms == 0
    assert degrees_of_freedom(s, report.nullity) == 0


def test_two_cells_sharing_one_node_has_one_mechanism():
    s = new_structure()
    adhere(s, [Point(0, 0), Point(2, 0), Point(1.1, 1.3), Point(0.8, -1.2)])
    adhere(s, [2, Point(4, 0.2), Point(3.2, 1.4), Point(3.4, -1.1)], allow_mechanisms=True)
    assert (s.n_active_nodes, s.n_active_members) == (7, 12)
    report = rigidity_report(s, nullity(s))
    assert report.laman_bound == 1
    assert report.nullity == 2
    assert report.mechanisms == 1  # s - m = B
    assert degrees_of_freedom(s, report.nullity) == 1
    assert report.generically_rigid_claim is False


def test_adhere_deltas_match_ledger_rows():
    s = new_structure()
    adhere(s, [Point(0, 0), Point(3, 0), Point(1.2, 1.4), Point(-1, 3)])
    # one full shared member (2 nodes): e=5, v=2 -> +1
    _, d = adhere(s, [2, 3, Point(4, 3), Point(6, 1)])
    assert (d.e_i, d.v_i, d.delta_dim) == (5, 2, 1)
    # two shared members / 3 nodes: e=4, v=1 -> +2
    _, d = adhere(s, [3, 4, 5, Point(1.5, 5)])
    assert (d.e_i, d.v_i, d.delta_dim) == (4, 1, 2)


def test_adhere_sharing_all_four_nodes_adds_six():
    # In the four-cell grid the outer corner nodes (1, 5, 7, 9) are pairwise
    # unjoined, so a cell over them shares 4 nodes and 0 members.
    s = four_cell_structure()
    rec, d = adhere(s, [1, 5, 7, 9])
    assert rec.shared_member_ids == ()
    assert (d.e_i, d.v_i, d.delta_dim) == (6, 0, 6)


def test_fuse_single_removal_row():
    s = new_structure()
    adhere(s, [Point(0, 0), Point(3, 0), Point(1.2, 1.4), Point(-1, 3)])
    before = nullity(s)
    rec, d = fuse(s, [1, 2, Point(0.4, -2.2), Point(2.8, -2.4)], remove=[(1, 2)])
    assert (d.e_i, d.v_i, d.delta_dim) == (4, 2, 0)
    assert not d.placement_sensitive
    assert len(rec.removed_member_ids) == 1
    assert nullity(s) == before  # dim unchanged, oracle-confirmed


def test_fuse_two_removals_three_shared_nodes():
    # Shared nodes {4, 2, 6} carry exactly two members, both removed:
    # e = 4 - 2 = 2, v = 1, dim unchanged (oracle-confirmed).
    s = new_structure()
    adhere(s, [Point(0, 0), Point(3, 0), Point(1.2, 1.4), Point(-1, 3)])
    adhere(s, [2, 3, Point(4, 3), Point(6, 1)])
    before = nullity(s)
    assert before == 2
    a, b, c = s.nodes[4], s.nodes[2], s.nodes[6]
    w1 = cell_selfstress(s.nodes[1], s.nodes[2], s.nodes[3], s.nodes[4], 1.0)
    w2 = cell_selfstress(s.nodes[2], s.nodes[3], s.nodes[5], s.nodes[6], 1.0)
    # densities of the combined existing state on (4,2) and (2,6)
    t1 = w1[5]  # member (2, 4) is the (B, D) slot of cell 1
    t2 = w2[5]  # member (2, 6) is the (B, D) slot of cell 2
    point = place_fusion_node((a, b, c), [((0, 1), t1), ((1, 2), t2)], alpha=1.0)
    rec, d = fuse(s, [4, 2, 6, point], remove=[(2, 4), (2, 6)])
    assert (d.e_i, d.v_i, d.delta_dim) == (2, 1, 0)
    assert d.placement_sensitive
    assert nullity(s) == before


def test_fuse_requires_three_shared_nodes_for_multi_removal():
    s = new_structure()
    adhere(s, [Point(0, 0), Point(3, 0), Point(1.2, 1.4), Point(-1, 3)])
    with pytest.raises(TooManyRemovals):
        fuse(s, [1, 2, Point(0.4, -2.2), Point(2.8, -2.4)], remove=[(1, 2), (1, 3)])


def test_wheel_growth_step_keeps_dimension():
    # A type II cell is a 3-wheel; sharing two adjacent rim nodes plus the
    # center and removing the old rim chord yields a 4-wheel, same dimension.
    s = new_structure()
    rim = [Point(0, 2), Point(-1.8, -1.1), Point(1.9, -1.2)]
    center = Point(0.05, -0.1)
    adhere(s, [*rim, center])  # nodes 1,2,3 rim; 4 center
    assert nullity(s) == 1
    _, d = fuse(s, [1, 3, 4, Point(2.2, 1.6)], remove=[(1, 3)])
    assert d.delta_dim == 0
    assert nullity(s) == 1
    assert laman_bound(s) == 1


def test_fuse_then_readding_recomposes_adhesion_delta():
    base = three_cell_structure()
    token = base.snapshot()
    adhered = base.restore(token)
    _, d_adhere = adhere(adhered, [6, 7, Point(8, 6), Point(9, 3.5)])
    fused = base.restore(token)
    rec, d_fuse = fuse(fused, [6, 7, Point(8, 6), Point(9, 3.5)], remove=[(6, 7)])
    assert d_fuse.v_i == d_adhere.v_i
    assert d_fuse.e_i + 1 == d_adhere.e_i
    fused.add_member(6, 7)
    assert fused.n_active_members == adhered.n_active_members
    assert fused.n_active_nodes == adhered.n_active_nodes


def test_ledger_consistency_randomized(rng):
    # 1 + sum of post-first deltas equals the oracle nullity for guarded builds.
    for _ in range(6):
        s = new_structure()
        _, _ = adhere(s, random_quadruple(rng))
        total = 1
        n_cells = int(rng.integers(2, 12))
        for _ in range(n_cells - 1):
            mem = s.active_members()[int(rng.integers(s.n_active_members))]
            i, j = mem.nodes
            while True:
                pts = [Point(*xy) for xy in rng.uniform(-40, 40, size=(2, 2))]
                try:
                    _, d = adhere(s, [int(i), int(j), *pts])
                    break
                except DegeneratePosition:
                    continue
            total += d.delta_dim
        oracle = nullity(s)
        assert total == laman_bound(s) == oracle
        assert degrees_of_freedom(s, oracle) == 0


def test_maxwell_rule_holds_with_and_without_mechanisms(rng):
    # s - m = B, with s from the oracle and m from the degrees of freedom.
    s = new_structure()
    adhere(s, random_quadruple(rng))
    adhere(s, [1, Point(30, 30), Point(34, 31), Point(31, 35)], allow_mechanisms=True)
    onull = nullity(s)
    assert onull - degrees_of_freedom(s, onull) == laman_bound(s)
    t = three_cell_structure()
    tnull = nullity(t)
    assert tnull - degrees_of_freedom(t, tnull) == laman_bound(t)


# ----- fusion node placement ---------------------------------------------------


def test_two_removal_point_lies_on_b_d_line():
    a, b, c, d = Point(0, 0), Point(4, 0.3), Point(2.2, 3.1), Point(-1.5, 2.0)
    w = cell_selfstress(a, b, c, d, 1.0)
    t1, t2 = w[0], w[1]  # densities on (A,B) and (B,C) in the existing cell
    e = place_fusion_node((a, b, c), [((0, 1), t1), ((1, 2), t2)], alpha=1.0)
    span = coord_span((a, b, c, d, e))
    assert abs(affine_area_f(b, d, e)) <= 1e-9 * span * span


def test_single_removal_allows_any_position(rng):
    for _ in range(20):
        a, b, c, _ = random_quadruple(rng)
        t1 = float(rng.uniform(0.2, 3.0))
        p = place_fusion_node((a, b, c), [((0, 1), t1)], alpha=2.0)
        # returned point must make a valid general-position cell
        w = cell_selfstress(a, b, c, p, 1.0)
        assert np.all(np.isfinite(w))


def test_three_removal_point_is_line_intersection(rng):
    for _ in range(20):
        a, b, c, d = random_quadruple(rng)
        w = cell_selfstress(a, b, c, d, 1.0)
        t1, t2, t3 = w[0], w[1], w[4]
        removed = [((0, 1), t1), ((1, 2), t2), ((0, 2), t3)]
        p = place_fusion_node((a, b, c), removed, alpha=1.0)
        # all three pairwise density ratios of the new cell match the t's
        wn = cell_selfstress(a, b, c, p, 1.0)
        assert wn[1] * t1 == pytest.approx(wn[0] * t2, rel=1e-8)
        assert wn[4] * t1 == pytest.approx(wn[0] * t3, rel=1e-8)
        # and p reproduces d (the unique solution for densities from cell abcd)
        assert p.x == pytest.approx(d.x, rel=1e-6, abs=1e-6)
        assert p.y == pytest.approx(d.y, rel=1e-6, abs=1e-6)


def test_placement_respects_fix_coordinate():
    a, b, c, d = Point(0, 0), Point(4, 0.3), Point(2.2, 3.1), Point(-1.5, 2.0)
    w = cell_selfstress(a, b, c, d, 1.0)
    removed = [((0, 1), w[0]), ((1, 2), w[1])]
    p = place_fusion_node((a, b, c), removed, alpha=1.0, fix=("x", -3.0))
    assert p.x == -3.0
    (lu, lv, l0), = placement_lines((a, b, c), removed)
    assert lu * p.x + lv * p.y + l0 == pytest.approx(0.0, abs=1e-9 * max(abs(lu), abs(lv)))


def test_placement_errors():
    a, b, c = Point(0, 0), Point(4, 0), Point(2, 3)
    with pytest.raises(ValueError):
        place_fusion_node((a, b, c), [((0, 1), 1.0)], alpha=0.0)
    with pytest.raises(DegeneratePosition):
        place_fusion_node((a, b, Point(8, 0)), [((0, 1), 1.0)], alpha=1.0)
    with pytest.raises(NoSolution):
        place_fusion_node((a, b, c), [((0, 1), 0.0), ((1, 2), 0.0)], alpha=1.0)
    # fixing x at the shared node B lands the point on B: collinear result
    d = Point(1.8, -2.6)
    w = cell_selfstress(a, b, c, d, 1.0)
    removed = [((0, 1), w[0]), ((1, 2), w[1])]
    with pytest.raises(DegenerateResult):
        place_fusion_node((a, b, c), removed, alpha=1.0, fix=("x", b.x))

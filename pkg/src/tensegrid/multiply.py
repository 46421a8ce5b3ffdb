"""Adhesion and fusion mechanics: degree-of-freedom accounting and the
placement of the fourth node when fusion cancels stress in removed members.

The bookkeeping identity is dim(W) change = e_i - 2*v_i in the plane, with
e_i and v_i the signed member/node count changes of a step.  The running sum
equals the Laman bound 3 + |E| - 2|V| whenever at least two nodes are active,
and matches the nullspace dimension exactly when the structure is
generically rigid.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import (
    DegeneratePosition,
    DegenerateResult,
    NoSolution,
    TooManyRemovals,
    UnknownMemberId,
)
from .geom import DEFAULT_TOL, Orientation, Point, coord_span, orientation
from .model import Structure


@dataclass(frozen=True)
class StepDelta:
    """Signed member/node count change of one multiplication step."""

    e_i: int
    v_i: int
    placement_sensitive: bool = False  # set when 2+ removals tie equilibrium to node placement

    @property
    def delta_dim(self) -> int:
        return self.e_i - 2 * self.v_i


@dataclass(frozen=True)
class RigidityReport:
    laman_bound: int
    nullity: int
    mechanisms: int
    generically_rigid_claim: bool


def laman_bound(structure: Structure) -> int:
    """3 + |E| - 2|V| over active members/nodes; 0 by convention below two nodes."""
    v = structure.n_active_nodes
    if v < 2:
        return 0
    return 3 + structure.n_active_members - 2 * v


def delta_dim(e_i: int, v_i: int) -> int:
    return e_i - 2 * v_i


def degrees_of_freedom(structure: Structure, nullity: int) -> int:
    """Infinitesimal mechanism count from the nullspace dimension."""
    v = structure.n_active_nodes
    if v < 2:
        return v * (v - 1) // 2 - structure.n_active_members
    return nullity - laman_bound(structure)


def adhere(structure: Structure, entries, allow_mechanisms: bool = False, tol=DEFAULT_TOL):
    """Insert a cell preserving every shared member. Returns (record, delta)."""
    e0, v0 = structure.n_active_members, structure.n_active_nodes
    record = structure.insert_cell(entries, allow_mechanisms=allow_mechanisms, tol=tol)
    delta = StepDelta(structure.n_active_members - e0, structure.n_active_nodes - v0)
    return record, delta


def fuse(structure: Structure, entries, remove, allow_mechanisms: bool = False, tol=DEFAULT_TOL):
    """Insert a cell, then flag the listed members removed.

    ``remove`` entries are member ids or (i, j) node pairs, resolved after the
    insertion.  Two or more removals require the cell to share at least three
    nodes; the returned delta is then flagged placement-sensitive, because
    equilibrium of the union depends on where the fourth node was put (see
    ``place_fusion_node``).
    """
    removals = list(remove)
    if not removals:
        raise ValueError("fuse requires at least one removal; use adhere otherwise")
    shared_nodes = sum(1 for e in entries if isinstance(e, int))
    if len(removals) >= 2 and shared_nodes < 3:
        raise TooManyRemovals(
            f"{len(removals)} removals need >= 3 shared nodes, cell shares {shared_nodes}"
        )
    e0, v0 = structure.n_active_members, structure.n_active_nodes
    record = structure.insert_cell(entries, allow_mechanisms=allow_mechanisms, tol=tol)
    member_ids = []
    for r in removals:
        if isinstance(r, int):
            member_ids.append(r)
        else:
            m = structure.member_for_pair(*r)
            if m is None:
                raise UnknownMemberId(f"no active member for pair {tuple(r)}")
            member_ids.append(m.member_id)
    for mid in member_ids:
        structure.remove_member(mid)
    record = structure.mark_cell_removals(record.cell_id, member_ids)
    delta = StepDelta(
        structure.n_active_members - e0,
        structure.n_active_nodes - v0,
        placement_sensitive=len(member_ids) >= 2,
    )
    return record, delta


def rigidity_report(structure: Structure, nullity: int) -> RigidityReport:
    b = laman_bound(structure)
    return RigidityReport(
        laman_bound=b,
        nullity=nullity,
        mechanisms=nullity - b,
        generically_rigid_claim=structure.rigid_claim,
    )


# ----- fusion node placement -------------------------------------------------

# Removable members among three shared nodes (A, B, C), as index pairs.
SHARED_PAIRS = {frozenset((0, 1)), frozenset((1, 2)), frozenset((0, 2))}


def _affine_coeffs(p: Point, q: Point):
    """Coefficients (cx, cy, c0) of the map (x, y) -> f(p, q, (x, y))."""
    # f(p, q, P) = (q - p) x (P - p): linear in P.
    cx = -(q.y - p.y)
    cy = q.x - p.x
    c0 = (q.y - p.y) * p.x - (q.x - p.x) * p.y
    return cx, cy, c0


def _parse_removed(removed) -> dict:
    dens = {}
    for pair, t in removed:
        key = frozenset(pair)
        if key not in SHARED_PAIRS:
            raise ValueError(f"removed member {tuple(pair)} is not among the shared pairs")
        dens[key] = float(t)
    if not 1 <= len(dens) <= 3:
        raise ValueError("removed must name 1 to 3 distinct shared members")
    return dens


def _cancel_line(shared, dens, key1, key2):
    """Coefficients (u, v, c) of u*x + v*y + c = 0: the locus where the new
    cell's densities on the two removed members are proportional to the
    existing ones.  Linear because f(P, Q, .) is affine in the free point."""
    a, b, c = shared
    ab, bc, ac = frozenset((0, 1)), frozenset((1, 2)), frozenset((0, 2))
    f_ab = _affine_coeffs(a, b)
    f_bc = _affine_coeffs(b, c)
    f_ac = _affine_coeffs(a, c)
    if {key1, key2} == {ab, bc}:
        return tuple(dens[ab] * u - dens[bc] * v for u, v in zip(f_ab, f_bc))
    if {key1, key2} == {ab, ac}:
        return tuple(dens[ab] * u + dens[ac] * v for u, v in zip(f_ab, f_ac))
    return tuple(dens[bc] * u + dens[ac] * v for u, v in zip(f_bc, f_ac))


def placement_lines(shared, removed) -> list:
    """The independent cancellation lines for a removal set: none for a single
    removal, one line for two, two lines for three."""
    dens = _parse_removed(removed)
    keys = sorted(dens, key=sorted)
    if len(keys) == 1:
        return []
    if len(keys) == 2:
        return [_cancel_line(shared, dens, keys[0], keys[1])]
    return [_cancel_line(shared, dens, keys[0], keys[1]),
            _cancel_line(shared, dens, keys[0], keys[2])]


def place_fusion_node(shared, removed, alpha: float, fix=None, tol=DEFAULT_TOL) -> Point:
    """Position of the new cell's fourth node so that the cell's self-stress,
    scaled by alpha, cancels the existing densities of every removed member.

    ``shared`` is the triple (A, B, C); ``removed`` lists 1 to 3 entries of the
    form (pair, t) with pair an index pair among (0,1), (1,2), (0,2) and t the
    existing force density.  Canceling two members pins the node to a line
    (one coordinate may be fixed via ``fix=("x", value)`` or ``("y", value)``);
    canceling three pins it to the intersection of two such lines.  With one
    removal any general-position point works and a deterministic default is
    returned.  The cell-state ratios are projective, so the returned point
    does not depend on alpha; alpha scales the state used for cancellation.
    """
    a, b, c = shared
    if alpha == 0.0:
        raise ValueError("alpha must be nonzero")
    if orientation(a, b, c, tol) is Orientation.COLLINEAR:
        raise DegeneratePosition("shared nodes are collinear")
    dens = _parse_removed(removed)
    lines = placement_lines(shared, removed)
    span = coord_span((a, b, c))
    centroid = Point((a.x + b.x + c.x) / 3.0, (a.y + b.y + c.y) / 3.0)

    if len(dens) == 1:
        # Any general-position point cancels a single member; mirror one shared
        # node across the midpoint of the other two for a deterministic pick.
        keys = next(iter(dens))
        others = [i for i in range(3) if i not in keys]
        pts = (a, b, c)
        i, j = tuple(keys)
        point = Point(pts[i].x + pts[j].x - pts[others[0]].x, pts[i].y + pts[j].y - pts[others[0]].y)
    elif len(dens) == 2:
        lu, lv, l0 = lines[0]
        norm = max(abs(lu), abs(lv))
        if norm <= 1e-14 * max(span, 1.0):
            raise NoSolution("placement line is degenerate (zero densities?)")
        if fix is not None:
            coord, value = fix
            if coord == "x":
                if abs(lv) <= 1e-14 * norm:
                    raise NoSolution("line is vertical; cannot fix x")
                point = Point(value, -(lu * value + l0) / lv)
            elif coord == "y":
                if abs(lu) <= 1e-14 * norm:
                    raise NoSolution("line is horizontal; cannot fix y")
                point = Point(-(lv * value + l0) / lu, value)
            else:
                raise ValueError(f"fix coordinate must be 'x' or 'y', got {coord!r}")
        else:
            # Foot of the perpendicular from the shared-node centroid.
            g = centroid
            d = (lu * g.x + lv * g.y + l0) / (lu * lu + lv * lv)
            point = Point(g.x - d * lu, g.y - d * lv)
    else:
        l1, l2 = lines
        det = l1[0] * l2[1] - l1[1] * l2[0]
        scale = max(abs(v) for v in (*l1[:2], *l2[:2]))
        if abs(det) <= 1e-12 * scale * scale:
            raise NoSolution("placement lines are parallel or degenerate")
        x = (-l1[2] * l2[1] + l2[2] * l1[1]) / det
        y = (-l1[0] * l2[2] + l2[0] * l1[2]) / det
        point = Point(x, y)

    for p, q in ((a, b), (b, c), (a, c)):
        if orientation(p, q, point, tol) is Orientation.COLLINEAR:
            raise DegenerateResult("placed node is collinear with two shared nodes")
    return point

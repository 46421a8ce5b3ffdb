"""The structure document: nodes, members, cell history, cell multigraph.

Members are never physically deleted, only flagged removed: the virtual-cell
search and the cell multigraph both need the full history.  Node, member and
cell ids are assigned sequentially starting at 1 and never reused.
"""

from __future__ import annotations

import copy
import uuid
from dataclasses import dataclass, field, replace

from .cells import CELL_MEMBER_PAIRS, CellType, cell_member_groups, classify_cell
from .errors import (
    AlreadyRemoved,
    DegeneratePosition,
    InsufficientSharing,
    InvalidToken,
    UnknownMemberId,
    UnknownNodeId,
)
from .geom import DEFAULT_TOL, Point, is_general_position

ACTUAL = "actual"
VIRTUAL = "virtual"


@dataclass(frozen=True)
class Member:
    member_id: int
    nodes: tuple[int, int]  # canonical (low, high)
    removed: bool = False
    group: str = "unset"  # envelope | spoke | unset


@dataclass(frozen=True)
class CellRecord:
    cell_id: int
    node_ids: tuple[int, ...]
    cell_type: CellType | None
    member_ids: tuple[int, ...]  # actual cells: the six members in w order
    shared_member_ids: tuple[int, ...] = ()
    removed_member_ids: tuple[int, ...] = ()
    kind: str = ACTUAL


@dataclass(frozen=True)
class MultiEdge:
    cell_a: int
    cell_b: int
    member_id: int
    weight: int  # 1 while the shared member is part of the structure, 0 once removed


@dataclass(frozen=True)
class SnapshotToken:
    lineage: str
    payload: dict = field(repr=False)


def _canonical(i: int, j: int) -> tuple[int, int]:
    return (i, j) if i < j else (j, i)


class Structure:
    """Planar framework with generation history. Single-writer mutation."""

    dimension = 2

    def __init__(self):
        self._lineage = uuid.uuid4().hex
        self.nodes: dict[int, Point] = {}
        self.members: dict[int, Member] = {}
        self.cells: list[CellRecord] = []
        self.multigraph: list[MultiEdge] = []
        self.rigid_claim = True
        self._next_node_id = 1
        self._next_member_id = 1
        self._next_cell_id = 1
        self._active_pairs: dict[tuple[int, int], int] = {}
        self._degree: dict[int, int] = {}
        self._member_owner: dict[int, int] = {}  # member id -> cell that created it

    # ----- queries -------------------------------------------------------

    def active_members(self) -> list[Member]:
        return [m for m in self.members.values() if not m.removed]

    def active_member_ids(self) -> list[int]:
        return [m.member_id for m in self.members.values() if not m.removed]

    def active_node_ids(self) -> list[int]:
        return [n for n in self.nodes if self._degree.get(n, 0) > 0]

    @property
    def n_active_nodes(self) -> int:
        return len(self.active_node_ids())

    @property
    def n_active_members(self) -> int:
        return len(self._active_pairs)

    def actual_cells(self) -> list[CellRecord]:
        return [c for c in self.cells if c.kind == ACTUAL]

    def member_for_pair(self, i: int, j: int) -> Member | None:
        """The active member joining nodes i and j, if any."""
        mid = self._active_pairs.get(_canonical(i, j))
        return self.members[mid] if mid is not None else None

    def any_member_for_pair(self, i: int, j: int) -> Member | None:
        """Active or removed member for the pair; latest one wins."""
        mid = self._active_pairs.get(_canonical(i, j))
        if mid is not None:
            return self.members[mid]
        found = None
        for m in self.members.values():
            if m.nodes == _canonical(i, j):
                found = m
        return found

    def neighbors(self, node_id: int, include_removed: bool = False) -> set[int]:
        out = set()
        for m in self.members.values():
            if m.removed and not include_removed:
                continue
            if node_id in m.nodes:
                out.add(m.nodes[0] if m.nodes[1] == node_id else m.nodes[1])
        return out

    def cells_of_node(self, node_id: int) -> list[CellRecord]:
        return [c for c in self.cells if c.kind == ACTUAL and node_id in c.node_ids]

    def cells_of_member(self, member_id: int) -> list[CellRecord]:
        return [c for c in self.cells if c.kind == ACTUAL and member_id in c.member_ids]

    def degree(self, node_id: int) -> int:
        return self._degree.get(node_id, 0)

    # ----- low-level construction (tests, ad hoc frameworks) --------------

    def add_node(self, point: Point) -> int:
        nid = self._next_node_id
        self._next_node_id += 1
        self.nodes[nid] = point
        self._degree.setdefault(nid, 0)
        return nid

    def add_member(self, i: int, j: int) -> int:
        for n in (i, j):
            if n not in self.nodes:
                raise UnknownNodeId(f"node {n} does not exist")
        if i == j:
            raise ValueError("member endpoints must differ")
        pair = _canonical(i, j)
        if pair in self._active_pairs:
            raise ValueError(f"active member {pair} already exists")
        mid = self._next_member_id
        self._next_member_id += 1
        self.members[mid] = Member(mid, pair)
        self._active_pairs[pair] = mid
        self._degree[i] = self._degree.get(i, 0) + 1
        self._degree[j] = self._degree.get(j, 0) + 1
        return mid

    # ----- cell insertion --------------------------------------------------

    def insert_cell(self, entries, allow_mechanisms: bool = False, tol=DEFAULT_TOL) -> CellRecord:
        """Insert a K4 cell.

        ``entries`` holds four anchors, each an existing node id (int) or a new
        ``Point``.  Members whose endpoint pair already exists actively are
        recorded as shared, not duplicated; one multigraph edge is added per
        shared member, toward the cell that created it.
        """
        if len(entries) != 4:
            raise ValueError("a cell needs exactly four anchors")
        existing_ids = [e for e in entries if isinstance(e, int)]
        for nid in existing_ids:
            if nid not in self.nodes:
                raise UnknownNodeId(f"node {nid} does not exist")
        if self.nodes and len(existing_ids) < 2 and not allow_mechanisms:
            raise InsufficientSharing(
                f"cell anchors only {len(existing_ids)} existing node(s); "
                "pass allow_mechanisms=True to opt in"
            )
        points = [self.nodes[e] if isinstance(e, int) else e for e in entries]
        if not is_general_position(points, tol):
            raise DegeneratePosition("three of the cell anchors are collinear")
        ctype = classify_cell(*points, tol)
        envelope_w, spoke_w = cell_member_groups(*points, tol)

        node_ids = []
        for e in entries:
            node_ids.append(e if isinstance(e, int) else self.add_node(e))

        member_ids, shared = [], []
        for w_index, (ia, ib) in enumerate(CELL_MEMBER_PAIRS):
            pair = _canonical(node_ids[ia], node_ids[ib])
            mid = self._active_pairs.get(pair)
            if mid is not None:
                shared.append(mid)
            else:
                mid = self._next_member_id
                self._next_member_id += 1
                group = "spoke" if w_index in spoke_w else "envelope"
                self.members[mid] = Member(mid, pair, group=group)
                self._active_pairs[pair] = mid
                self._degree[pair[0]] = self._degree.get(pair[0], 0) + 1
                self._degree[pair[1]] = self._degree.get(pair[1], 0) + 1
            member_ids.append(mid)

        cell_id = self._next_cell_id
        self._next_cell_id += 1
        record = CellRecord(
            cell_id=cell_id,
            node_ids=tuple(node_ids),
            cell_type=ctype,
            member_ids=tuple(member_ids),
            shared_member_ids=tuple(shared),
        )
        self.cells.append(record)
        for mid in shared:
            owner = self._member_owner.get(mid)
            if owner is not None:
                weight = 0 if self.members[mid].removed else 1
                self.multigraph.append(MultiEdge(owner, cell_id, mid, weight))
        for mid in member_ids:
            self._member_owner.setdefault(mid, cell_id)
        if self.cells and len(self.cells) > 1 and len(existing_ids) < 2:
            self.rigid_claim = False
        return record

    def mark_cell_removals(self, cell_id: int, member_ids) -> CellRecord:
        """Attach the removal set of a fusion event to its cell record."""
        for idx, rec in enumerate(self.cells):
            if rec.cell_id == cell_id:
                updated = replace(rec, removed_member_ids=tuple(member_ids))
                self.cells[idx] = updated
                return updated
        raise ValueError(f"no cell {cell_id}")

    # ----- removal ---------------------------------------------------------

    def remove_member(self, member_id: int) -> None:
        """Flag a member removed; multigraph weights for it drop to 0.

        A node that loses its last incident member becomes detached (excluded
        from active counts); the degree-3 cascade of the general virtual-cell
        search works on scratch copies, never here.
        """
        m = self.members.get(member_id)
        if m is None:
            raise UnknownMemberId(f"member {member_id} does not exist")
        if m.removed:
            raise AlreadyRemoved(f"member {member_id} already removed")
        self.members[member_id] = replace(m, removed=True)
        del self._active_pairs[m.nodes]
        for n in m.nodes:
            self._degree[n] -= 1
        self.multigraph = [
            replace(e, weight=0) if e.member_id == member_id else e for e in self.multigraph
        ]

    # ----- snapshots --------------------------------------------------------

    _STATE_KEYS = (
        "nodes",
        "members",
        "cells",
        "multigraph",
        "rigid_claim",
        "_next_node_id",
        "_next_member_id",
        "_next_cell_id",
        "_active_pairs",
        "_degree",
        "_member_owner",
    )

    def snapshot(self) -> SnapshotToken:
        payload = {k: copy.deepcopy(getattr(self, k)) for k in self._STATE_KEYS}
        return SnapshotToken(self._lineage, payload)

    def restore(self, token: SnapshotToken) -> "Structure":
        if token.lineage != self._lineage:
            raise InvalidToken("token was taken from a different structure")
        restored = Structure()
        restored._lineage = self._lineage
        for k in self._STATE_KEYS:
            setattr(restored, k, copy.deepcopy(token.payload[k]))
        return restored

    # ----- equality (content, not lineage) ----------------------------------

    def __eq__(self, other):
        if not isinstance(other, Structure):
            return NotImplemented
        return all(getattr(self, k) == getattr(other, k) for k in self._STATE_KEYS)

    def state_fingerprint(self):
        return tuple(
            (k, repr(getattr(self, k))) for k in self._STATE_KEYS
        )


def new_structure() -> Structure:
    return Structure()

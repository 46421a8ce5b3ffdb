"""Shared parsing/execution of scripted operations (CLI `script`, HTTP API)."""

from __future__ import annotations

from ..errors import ParseError, UnknownMemberId
from ..geom import Point
from ..model import Structure
from ..multiply import adhere, fuse


def parse_anchor(entry):
    if isinstance(entry, dict):
        if "node" in entry:
            return int(entry["node"])
        if "point" in entry:
            x, y = entry["point"]
            return Point(float(x), float(y))
    raise ParseError(f"anchor must be {{'node': id}} or {{'point': [x, y]}}, got {entry!r}")


def parse_anchors(entries):
    if not isinstance(entries, (list, tuple)) or len(entries) != 4:
        raise ParseError("a cell takes exactly four anchors")
    return [parse_anchor(e) for e in entries]


def parse_removal(entry):
    if isinstance(entry, int):
        return entry
    if isinstance(entry, (list, tuple)) and len(entry) == 2:
        return (int(entry[0]), int(entry[1]))
    raise ParseError(f"removal must be a member id or [i, j] pair, got {entry!r}")


def apply_op(structure: Structure, op: dict):
    """Apply one scripted operation; returns (kind, payload)."""
    kind = op.get("op")
    if kind == "cell":
        record, delta = adhere(
            structure,
            parse_anchors(op.get("anchors")),
            allow_mechanisms=bool(op.get("allow_mechanisms", False)),
        )
        return "cell", (record, delta)
    if kind == "fuse":
        record, delta = fuse(
            structure,
            parse_anchors(op.get("anchors")),
            [parse_removal(r) for r in op.get("remove", [])],
            allow_mechanisms=bool(op.get("allow_mechanisms", False)),
        )
        return "fuse", (record, delta)
    if kind == "remove":
        if "member" in op:
            mid = int(op["member"])
        elif "pair" in op:
            i, j = (int(x) for x in op["pair"])
            m = structure.member_for_pair(i, j)
            if m is None:
                raise UnknownMemberId(f"no active member for pair ({i}, {j})")
            mid = m.member_id
        else:
            raise ParseError("remove op needs 'member' or 'pair'")
        structure.remove_member(mid)
        return "remove", mid
    raise ParseError(f"unknown op {kind!r}")


def run_ops(structure: Structure, ops) -> list:
    return [apply_op(structure, op) for op in ops]

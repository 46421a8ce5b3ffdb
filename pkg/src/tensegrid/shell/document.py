"""Versioned JSON document: lossless round-trip of a structure and its basis.

Node coordinates ride as plain JSON numbers (Python's float repr round-trips
exactly); basis entries are stored column-major as decimal strings for the
same guarantee.  Serialization is canonical (sorted keys, fixed separators),
so identical inputs produce identical bytes.
"""

from __future__ import annotations

import json

import numpy as np

from ..errors import ParseError, VersionMismatch
from ..geom import Point
from ..model import ACTUAL, VIRTUAL, CellRecord, Member, MultiEdge, Structure
from ..cells import CellType
from ..stress import (
    CellSource,
    NumericSource,
    StressBasis,
    VirtualGeneralSource,
    VirtualWheelSource,
)

DOC_VERSION = 1


def _source_dict(src) -> dict:
    if isinstance(src, CellSource):
        return {"kind": "cell", "cell_id": src.cell_id,
                "composed_with": [[c, x] for c, x in src.composed_with]}
    if isinstance(src, VirtualWheelSource):
        return {"kind": "virtual_wheel", "center": src.center,
                "periphery": list(src.periphery),
                "composed_with": [[c, x] for c, x in src.composed_with]}
    if isinstance(src, VirtualGeneralSource):
        return {"kind": "virtual_general", "member_ids": list(src.member_ids)}
    if isinstance(src, NumericSource):
        return {"kind": "numeric", "index": src.index}
    raise TypeError(f"unknown source {src!r}")


def _source_from_dict(d: dict):
    kind = d.get("kind")
    if kind == "cell":
        return CellSource(d["cell_id"], tuple((c, x) for c, x in d.get("composed_with", [])))
    if kind == "virtual_wheel":
        return VirtualWheelSource(d["center"], tuple(d["periphery"]),
                                  tuple((c, x) for c, x in d.get("composed_with", [])))
    if kind == "virtual_general":
        return VirtualGeneralSource(tuple(d["member_ids"]))
    if kind == "numeric":
        return NumericSource(d["index"])
    raise ParseError(f"unknown source kind {kind!r}")


def _virtual_records(structure: Structure, basis: StressBasis) -> list:
    """Synthesize virtual CellRecords from basis sources for the document."""
    out = []
    next_id = max((c.cell_id for c in structure.cells), default=0) + 1
    for src in basis.sources:
        if isinstance(src, VirtualWheelSource):
            n = len(src.periphery)
            mids = []
            for k in range(n):
                rim = structure.any_member_for_pair(src.periphery[k], src.periphery[(k + 1) % n])
                spoke = structure.any_member_for_pair(src.center, src.periphery[k])
                mids.extend(m.member_id for m in (rim, spoke) if m is not None)
            out.append(CellRecord(
                cell_id=next_id,
                node_ids=(src.center, *src.periphery),
                cell_type=None,
                member_ids=tuple(sorted(set(mids))),
                kind=VIRTUAL,
            ))
            next_id += 1
        elif isinstance(src, VirtualGeneralSource):
            nodes = sorted({n for m in src.member_ids for n in structure.members[m].nodes})
            out.append(CellRecord(
                cell_id=next_id,
                node_ids=tuple(nodes),
                cell_type=None,
                member_ids=tuple(src.member_ids),
                kind=VIRTUAL,
            ))
            next_id += 1
    return out


def document_dict(structure: Structure, basis: StressBasis | None = None, meta: dict | None = None) -> dict:
    cells = [
        {
            "cell_id": c.cell_id,
            "node_ids": list(c.node_ids),
            "cell_type": c.cell_type.value if c.cell_type else None,
            "member_ids": list(c.member_ids),
            "shared_member_ids": list(c.shared_member_ids),
            "removed_member_ids": list(c.removed_member_ids),
            "kind": c.kind,
        }
        for c in structure.cells
    ]
    if basis is not None:
        cells.extend(
            {
                "cell_id": c.cell_id,
                "node_ids": list(c.node_ids),
                "cell_type": None,
                "member_ids": list(c.member_ids),
                "shared_member_ids": [],
                "removed_member_ids": [],
                "kind": c.kind,
            }
            for c in _virtual_records(structure, basis)
        )
    self_stress = None
    if basis is not None:
        self_stress = {
            "dim": basis.dim,
            "member_ids": list(basis.member_ids),
            "basis": [[repr(float(x)) for x in basis.states[:, k]] for k in range(basis.dim)],
            "sources": [_source_dict(s) for s in basis.sources],
            "certified": bool(basis.certified),
        }
    return {
        "version": DOC_VERSION,
        "dimension": 2,
        "nodes": [{"id": nid, "x": p.x, "y": p.y} for nid, p in structure.nodes.items()],
        "members": [
            {"id": m.member_id, "nodes": list(m.nodes), "removed": m.removed, "group": m.group}
            for m in structure.members.values()
        ],
        "cells": cells,
        "self_stress": self_stress,
        "meta": dict(meta or {}) | {"rigid_claim": structure.rigid_claim},
    }


def save(structure: Structure, basis: StressBasis | None = None, meta: dict | None = None) -> bytes:
    doc = document_dict(structure, basis, meta)
    return json.dumps(doc, sort_keys=True, separators=(",", ":")).encode()


def _rebuild_bookkeeping(structure: Structure) -> None:
    """Recompute pair index, degrees, owners and multigraph from the history."""
    structure._active_pairs = {}
    structure._degree = {n: 0 for n in structure.nodes}
    for m in structure.members.values():
        if not m.removed:
            structure._active_pairs[m.nodes] = m.member_id
            for n in m.nodes:
                structure._degree[n] += 1
    structure._member_owner = {}
    structure.multigraph = []
    for rec in structure.cells:
        if rec.kind != ACTUAL:
            continue
        for mid in rec.shared_member_ids:
            owner = structure._member_owner.get(mid)
            if owner is not None:
                weight = 0 if structure.members[mid].removed else 1
                structure.multigraph.append(MultiEdge(owner, rec.cell_id, mid, weight))
        for mid in rec.member_ids:
            structure._member_owner.setdefault(mid, rec.cell_id)


def structure_from_dict(doc: dict) -> Structure:
    s = Structure()
    for nd in doc["nodes"]:
        s.nodes[int(nd["id"])] = Point(float(nd["x"]), float(nd["y"]))
    for md in doc["members"]:
        i, j = (int(x) for x in md["nodes"])
        pair = (i, j) if i < j else (j, i)
        s.members[int(md["id"])] = Member(int(md["id"]), pair, bool(md["removed"]),
                                          str(md.get("group", "unset")))
    for cd in doc["cells"]:
        if cd.get("kind", ACTUAL) != ACTUAL:
            continue
        ctype = CellType(cd["cell_type"]) if cd.get("cell_type") else None
        s.cells.append(CellRecord(
            cell_id=int(cd["cell_id"]),
            node_ids=tuple(int(x) for x in cd["node_ids"]),
            cell_type=ctype,
            member_ids=tuple(int(x) for x in cd["member_ids"]),
            shared_member_ids=tuple(int(x) for x in cd.get("shared_member_ids", [])),
            removed_member_ids=tuple(int(x) for x in cd.get("removed_member_ids", [])),
            kind=ACTUAL,
        ))
    s._next_node_id = max(s.nodes, default=0) + 1
    s._next_member_id = max(s.members, default=0) + 1
    s._next_cell_id = max((c.cell_id for c in s.cells), default=0) + 1
    s.rigid_claim = bool(doc.get("meta", {}).get("rigid_claim", True))
    _rebuild_bookkeeping(s)
    return s


def load(data: bytes):
    """Parse document bytes back into (Structure, StressBasis | None)."""
    try:
        doc = json.loads(data.decode() if isinstance(data, (bytes, bytearray)) else data)
    except (UnicodeDecodeError, json.JSONDecodeError) as err:
        raise ParseError(f"not a valid document: {err}") from err
    if not isinstance(doc, dict) or "version" not in doc:
        raise ParseError("missing version field")
    if doc["version"] != DOC_VERSION:
        raise VersionMismatch(f"document version {doc['version']}, expected {DOC_VERSION}")
    try:
        structure = structure_from_dict(doc)
        basis = None
        ss = doc.get("self_stress")
        if ss is not None:
            member_ids = [int(x) for x in ss["member_ids"]]
            cols = [np.array([float(x) for x in col]) for col in ss["basis"]]
            states = np.column_stack(cols) if cols else np.zeros((len(member_ids), 0))
            basis = StressBasis(
                member_ids,
                states,
                [_source_from_dict(d) for d in ss["sources"]],
                certified=bool(ss.get("certified", False)),
            )
    except (KeyError, TypeError, ValueError) as err:
        raise ParseError(f"malformed document: {err}") from err
    return structure, basis

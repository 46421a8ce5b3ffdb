"""Local HTTP/JSON service exposing the core to the design studio.

One writer at a time: mutations run under a lock against the live structure
and roll back from a snapshot on any validation error, so the server is
either fully applied or unchanged.  Every mutation response carries a
monotonically increasing revision number; clients may send their last seen
revision with a mutation to detect conflicts (409).
"""

from __future__ import annotations

import json
import mimetypes
import os
import threading
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from urllib.parse import parse_qs, urlparse

from ..errors import IncompleteBasis, TensegrityError
from ..geom import Point
from ..model import Structure, new_structure
from ..multiply import laman_bound, place_fusion_node, placement_lines
from ..stress import assemble_basis, nullspace_basis
from . import document
from .ops import apply_op, parse_removal
from .svg import render_svg

DEFAULT_PORT = 8732
_PAIR_NAMES = {"ab": (0, 1), "bc": (1, 2), "ac": (0, 2)}


class AppState:
    def __init__(self, structure: Structure | None = None):
        self.lock = threading.RLock()
        self.structure = structure if structure is not None else new_structure()
        self.revision = 0
        self.undo_stack: list = []
        self._basis_rev = -1
        self._basis = None
        self._basis_mode = "structural"

    # basis cache keyed by revision
    def basis(self):
        with self.lock:
            if self._basis_rev != self.revision:
                try:
                    self._basis = assemble_basis(self.structure)
                    self._basis_mode = "structural"
                except IncompleteBasis:
                    self._basis = nullspace_basis(self.structure)
                    self._basis_mode = "numeric"
                self._basis_rev = self.revision
            return self._basis, self._basis_mode

    def counts(self) -> dict:
        s = self.structure
        return {
            "nodes": s.n_active_nodes,
            "members": s.n_active_members,
            "cells": len(s.actual_cells()),
            "laman_bound": laman_bound(s),
        }

    def mutate(self, fn):
        """Apply fn(structure) atomically; returns its result."""
        with self.lock:
            token = self.structure.snapshot()
            try:
                result = fn(self.structure)
            except Exception:
                self.structure = self.structure.restore(token)
                raise
            self.undo_stack.append(token)
            self.revision += 1
            return result

    def whatif(self, fn):
        """Run fn against the structure and roll back unconditionally."""
        with self.lock:
            token = self.structure.snapshot()
            try:
                return fn(self.structure)
            finally:
                self.structure = self.structure.restore(token)

    def undo(self):
        with self.lock:
            if not self.undo_stack:
                raise ValueError("nothing to undo")
            token = self.undo_stack.pop()
            self.structure = self.structure.restore(token)
            self.revision += 1


class _Conflict(Exception):
    pass


def _delta_dict(delta) -> dict:
    return {
        "e_i": delta.e_i,
        "v_i": delta.v_i,
        "delta_dim": delta.delta_dim,
        "placement_sensitive": delta.placement_sensitive,
    }


def _record_dict(record) -> dict:
    return {
        "cell_id": record.cell_id,
        "node_ids": list(record.node_ids),
        "cell_type": record.cell_type.value if record.cell_type else None,
        "member_ids": list(record.member_ids),
        "shared_member_ids": list(record.shared_member_ids),
        "removed_member_ids": list(record.removed_member_ids),
        "kind": record.kind,
    }


def make_handler(state: AppState, static_dir: str | None = None):
    class Handler(BaseHTTPRequestHandler):
        protocol_version = "HTTP/1.1"

        def log_message(self, fmt, *args):  # quiet by default
            pass

        # --- plumbing -------------------------------------------------------

        def _send(self, code: int, payload, content_type="application/json"):
            body = payload if isinstance(payload, (bytes, bytearray)) else json.dumps(payload).encode()
            self.send_response(code)
            self.send_header("Content-Type", content_type)
            self.send_header("Content-Length", str(len(body)))
            self.send_header("Access-Control-Allow-Origin", "*")
            self.end_headers()
            self.wfile.write(body)

        def _error(self, code: int, err):
            self._send(code, {"error": type(err).__name__, "message": str(err)})

        def _read_body(self) -> dict:
            length = int(self.headers.get("Content-Length") or 0)
            if length == 0:
                return {}
            raw = self.rfile.read(length)
            try:
                data = json.loads(raw)
            except json.JSONDecodeError as exc:
                raise ValueError(f"invalid JSON body: {exc}") from exc
            if not isinstance(data, dict):
                raise ValueError("body must be a JSON object")
            return data

        def _check_revision(self, body: dict):
            expected = body.get("revision")
            if expected is not None and int(expected) != state.revision:
                raise _Conflict(f"revision {expected} != current {state.revision}")

        def do_OPTIONS(self):
            self.send_response(204)
            self.send_header("Access-Control-Allow-Origin", "*")
            self.send_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS")
            self.send_header("Access-Control-Allow-Headers", "Content-Type")
            self.send_header("Content-Length", "0")
            self.end_headers()

        # --- GET -------------------------------------------------------------

        def do_GET(self):
            url = urlparse(self.path)
            try:
                if url.path == "/api/structure":
                    basis, mode = state.basis()
                    doc = document.document_dict(state.structure, basis,
                                                 {"seed": None, "options": {}})
                    self._send(200, {"revision": state.revision, "mode": mode, "document": doc})
                elif url.path == "/api/selfstress":
                    basis, mode = state.basis()
                    q = parse_qs(url.query)
                    payload = {
                        "revision": state.revision,
                        "dim": basis.dim,
                        "mode": mode,
                        "sources": [document._source_dict(s) for s in basis.sources],
                    }
                    if "state" in q:
                        k = int(q["state"][0])
                        if not 0 <= k < basis.dim:
                            raise ValueError(f"state {k} out of range 0..{basis.dim - 1}")
                        payload["column"] = [float(x) for x in basis.column(k)]
                        payload["member_ids"] = list(basis.member_ids)
                    self._send(200, payload)
                elif url.path == "/api/svg":
                    q = parse_qs(url.query)
                    vec = None
                    if "state" in q:
                        basis, _ = state.basis()
                        k = int(q["state"][0])
                        if not 0 <= k < basis.dim:
                            raise ValueError(f"state {k} out of range 0..{basis.dim - 1}")
                        vec = basis.column(k)
                    svg = render_svg(state.structure, vec)
                    self._send(200, svg.encode(), content_type="image/svg+xml")
                elif static_dir and not url.path.startswith("/api/"):
                    self._serve_static(url.path)
                else:
                    self._send(404, {"error": "NotFound", "message": url.path})
            except (TensegrityError, ValueError, KeyError) as err:
                self._error(400, err)
            except BrokenPipeError:
                pass
            except Exception as err:  # pragma: no cover
                self._error(500, err)

        def _serve_static(self, path: str):
            rel = path.lstrip("/") or "index.html"
            full = os.path.normpath(os.path.join(static_dir, rel))
            if not full.startswith(os.path.normpath(static_dir)) or not os.path.isfile(full):
                self._send(404, {"error": "NotFound", "message": path})
                return
            ctype = mimetypes.guess_type(full)[0] or "application/octet-stream"
            with open(full, "rb") as fh:
                self._send(200, fh.read(), content_type=ctype)

        # --- POST --------------------------------------------------------------

        def do_POST(self):
            url = urlparse(self.path)
            try:
                body = self._read_body()
                handler = {
                    "/api/cells": self._post_cells,
                    "/api/fuse": self._post_fuse,
                    "/api/remove-member": self._post_remove,
                    "/api/place-node": self._post_place_node,
                    "/api/undo": self._post_undo,
                    "/api/whatif": self._post_whatif,
                }.get(url.path)
                if handler is None:
                    self._send(404, {"error": "NotFound", "message": url.path})
                    return
                handler(body)
            except _Conflict as err:
                self._send(409, {"error": "RevisionConflict", "message": str(err)})
            except (TensegrityError, ValueError, KeyError, TypeError) as err:
                self._error(400, err)
            except BrokenPipeError:
                pass
            except Exception as err:  # pragma: no cover
                self._error(500, err)

        def _post_cells(self, body, commit=True):
            self._check_revision(body)
            op = {"op": "cell", "anchors": body.get("anchors"),
                  "allow_mechanisms": body.get("allow_mechanisms", False)}
            runner = state.mutate if commit else state.whatif
            (_, (record, delta)), counts = runner(lambda s: (apply_op(s, op), state.counts()))
            self._send(200, {
                "revision": state.revision,
                "committed": commit,
                "delta": _delta_dict(delta),
                "cell": _record_dict(record),
                "counts": counts,
            })

        def _post_fuse(self, body, commit=True):
            self._check_revision(body)
            op = {"op": "fuse", "anchors": body.get("anchors"),
                  "remove": body.get("remove", []),
                  "allow_mechanisms": body.get("allow_mechanisms", False)}
            runner = state.mutate if commit else state.whatif
            (_, (record, delta)), counts = runner(lambda s: (apply_op(s, op), state.counts()))
            self._send(200, {
                "revision": state.revision,
                "committed": commit,
                "delta": _delta_dict(delta),
                "cell": _record_dict(record),
                "counts": counts,
            })

        def _post_remove(self, body, commit=True):
            self._check_revision(body)
            if "member_id" in body:
                op = {"op": "remove", "member": int(body["member_id"])}
            elif "pair" in body:
                op = {"op": "remove", "pair": [int(x) for x in body["pair"]]}
            else:
                raise ValueError("remove-member needs member_id or pair")

            def run(s):
                e0, v0 = s.n_active_members, s.n_active_nodes
                _, mid = apply_op(s, op)
                de = s.n_active_members - e0
                dv = s.n_active_nodes - v0
                return mid, de, dv, state.counts()

            runner = state.mutate if commit else state.whatif
            mid, de, dv, counts = runner(run)
            self._send(200, {
                "revision": state.revision,
                "committed": commit,
                "removed_member_id": mid,
                "delta": {"e_i": de, "v_i": dv, "delta_dim": de - 2 * dv,
                          "placement_sensitive": False},
                "counts": counts,
            })

        def _post_place_node(self, body):
            shared_raw = body.get("shared")
            if not isinstance(shared_raw, list) or len(shared_raw) != 3:
                raise ValueError("shared must list the three shared points")
            shared = tuple(Point(float(x), float(y)) for x, y in shared_raw)
            removed = []
            for item in body.get("removed", []):
                pair = item.get("pair")
                if isinstance(pair, str):
                    pair = _PAIR_NAMES[pair.lower()]
                removed.append((parse_removal(list(pair)), float(item["t"])))
            alpha = float(body.get("alpha", 1.0))
            fix = None
            if body.get("fix"):
                fix = (body["fix"]["coord"], float(body["fix"]["value"]))
            point = place_fusion_node(shared, removed, alpha, fix=fix)
            lines = placement_lines(shared, removed)
            payload = {"point": [point.x, point.y], "lines": []}
            for u, v, c in lines:
                norm = max((u * u + v * v) ** 0.5, 1e-30)
                payload["lines"].append({
                    "coeffs": [u, v, c],
                    "point": [point.x, point.y],
                    "direction": [-v / norm, u / norm],
                })
            self._send(200, payload)

        def _post_undo(self, body):
            self._check_revision(body)
            state.undo()
            self._send(200, {"revision": state.revision, "counts": state.counts()})

        def _post_whatif(self, body):
            action = body.get("action")
            inner = body.get("body", {})
            if action == "cells":
                self._post_cells(inner, commit=False)
            elif action == "fuse":
                self._post_fuse(inner, commit=False)
            elif action == "remove-member":
                self._post_remove(inner, commit=False)
            else:
                raise ValueError(f"unknown what-if action {action!r}")

    return Handler


def make_server(port: int = 0, structure: Structure | None = None,
                static_dir: str | None = None):
    """Bound (server, state) pair; port 0 picks an ephemeral port."""
    state = AppState(structure)
    server = ThreadingHTTPServer(("127.0.0.1", port), make_handler(state, static_dir))
    return server, state


def serve(port: int | None = None, structure: Structure | None = None,
          static_dir: str | None = None):
    """Blocking service loop; TENSEGRID_PORT provides the default port."""
    if port is None:
        port = int(os.environ.get("TENSEGRID_PORT", DEFAULT_PORT))
    if static_dir is None:
        candidate = os.path.join(os.getcwd(), "frontend", "dist")
        static_dir = candidate if os.path.isdir(candidate) else None
    server, _ = make_server(port, structure, static_dir)
    host, actual_port = server.server_address
    print(f"tensegrid service on http://{host}:{actual_port}/ (Ctrl-C to stop)")
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        pass
    finally:
        server.server_close()

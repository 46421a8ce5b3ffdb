"""Command-line interface.

Subcommands: generate, analyze, render, script, serve.  Exit codes: 0 on
success, 1 for user errors (bad flags, bad input files, validation), 2 on
internal errors or an oracle mismatch in `analyze`.
"""

from __future__ import annotations

import argparse
import json
import sys

from ..errors import IncompleteBasis, TensegrityError
from ..geom import Point
from ..growgen import GenerateOptions, Profile, RemovalPolicy, generate
from ..multiply import degrees_of_freedom, laman_bound
from ..stress import assemble_basis, nullspace_basis, span_residual
from . import document
from .ops import run_ops
from .svg import RenderStyle, render_svg


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(message)


def _build_parser() -> _Parser:
    parser = _Parser(prog="tensegrid", description="Planar tensegrity generation toolkit")
    sub = parser.add_subparsers(dest="command", required=True)

    g = sub.add_parser("generate", help="generate a structure from a profile")
    g.add_argument("--profile", required=True,
                   help="circle | ellipse | path to a polygon JSON file")
    g.add_argument("--radius", type=float, default=10.0)
    g.add_argument("--a", type=float, default=12.0, dest="semi_a")
    g.add_argument("--b", type=float, default=7.0, dest="semi_b")
    g.add_argument("--cells", type=int, default=None)
    g.add_argument("--budget", type=int, default=None, help="corner-node sample budget")
    g.add_argument("--mesh", choices=("tri", "quad", "mixed"), default="tri")
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--removals", default="none", help="none | every-k:K")
    g.add_argument("--out", required=True)

    a = sub.add_parser("analyze", help="report counts, bounds and the oracle cross-check")
    a.add_argument("doc")

    r = sub.add_parser("render", help="render the structure (optionally one state) to SVG")
    r.add_argument("doc")
    r.add_argument("--state", type=int, default=None)
    r.add_argument("--width-scale", type=float, default=None)
    r.add_argument("--out", required=True)

    s = sub.add_parser("script", help="replay adhesion/fusion ops and save the document")
    s.add_argument("ops")
    s.add_argument("--out", required=True)

    v = sub.add_parser("serve", help="run the local HTTP/JSON service")
    v.add_argument("--port", type=int, default=None)
    return parser


def _profile_from_args(args) -> Profile:
    name = args.profile.lower()
    if name == "circle":
        return Profile.circle(args.radius)
    if name == "ellipse":
        return Profile.ellipse(args.semi_a, args.semi_b)
    with open(args.profile) as fh:
        data = json.load(fh)
    pts = [Point(float(x), float(y)) for x, y in data["points"]]
    return Profile.polygon(pts)


def _removals_from_arg(text: str) -> RemovalPolicy:
    if text == "none":
        return RemovalPolicy.none()
    if text.startswith("every-k:"):
        return RemovalPolicy.every_kth_shared(int(text.split(":", 1)[1]))
    raise _UsageError(f"unknown removal policy {text!r}")


def _cmd_generate(args) -> int:
    profile = _profile_from_args(args)
    if args.cells is None and args.budget is None:
        raise _UsageError("generate needs --cells or --budget")
    options = GenerateOptions(
        cells=args.cells,
        node_budget=args.budget,
        mesh_kind=args.mesh,
        removals=_removals_from_arg(args.removals),
        seed=args.seed,
    )
    structure, basis, report = generate(profile, options)
    meta = {
        "seed": args.seed,
        "options": {
            "profile": args.profile,
            "cells": args.cells,
            "budget": args.budget,
            "mesh": args.mesh,
            "removals": args.removals,
        },
        "report": {
            "nullity": report.nullity,
            "df": report.df,
            "oracle_ok": report.oracle_ok,
            "interior_shared_nodes": report.interior_shared_nodes,
        },
    }
    with open(args.out, "wb") as fh:
        fh.write(document.save(structure, basis, meta))
    print(f"cells={report.n_cells} nodes={report.n_nodes} members={report.n_members} "
          f"states={basis.dim} oracle={'PASS' if report.oracle_ok else 'FAIL'}")
    return 0 if report.oracle_ok else 2


def _cmd_analyze(args) -> int:
    with open(args.doc, "rb") as fh:
        structure, basis = document.load(fh.read())
    oracle = nullspace_basis(structure)
    b = laman_bound(structure)
    df = degrees_of_freedom(structure, oracle.dim)
    print(f"nodes={structure.n_active_nodes} members={structure.n_active_members} "
          f"laman_bound={b} nullity={oracle.dim} df={df}")
    if basis is None or basis.dim == 0:
        print("basis: none stored")
        return 0
    counts: dict = {}
    for src in basis.sources:
        counts[src.kind] = counts.get(src.kind, 0) + 1
    print("basis sources: " + ", ".join(f"{k}={v}" for k, v in sorted(counts.items())))
    cross = max(span_residual(basis.states, oracle.states),
                span_residual(oracle.states, basis.states))
    ok = basis.dim == oracle.dim and cross <= 1e-8
    print(f"dim={basis.dim} cross_residual={cross:.2e} oracle={'PASS' if ok else 'FAIL'}")
    return 0 if ok else 2


def _cmd_render(args) -> int:
    with open(args.doc, "rb") as fh:
        structure, basis = document.load(fh.read())
    state = None
    if args.state is not None:
        if basis is None or not 0 <= args.state < basis.dim:
            raise _UsageError(f"state {args.state} out of range")
        state = basis.column(args.state)
    style = RenderStyle(width_scale=args.width_scale)
    with open(args.out, "w") as fh:
        fh.write(render_svg(structure, state, style))
    return 0


def _cmd_script(args) -> int:
    with open(args.ops) as fh:
        data = json.load(fh)
    ops = data.get("ops")
    if not isinstance(ops, list):
        raise _UsageError("ops file must hold {'ops': [...]}")
    from ..model import new_structure

    structure = new_structure()
    run_ops(structure, ops)
    try:
        basis = assemble_basis(structure)
    except IncompleteBasis:
        basis = nullspace_basis(structure)
    with open(args.out, "wb") as fh:
        fh.write(document.save(structure, basis, {"seed": None, "options": {"script": True}}))
    print(f"nodes={structure.n_active_nodes} members={structure.n_active_members} "
          f"states={basis.dim}")
    return 0


def _cmd_serve(args) -> int:
    from .server import serve

    serve(args.port)
    return 0


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        handler = {
            "generate": _cmd_generate,
            "analyze": _cmd_analyze,
            "render": _cmd_render,
            "script": _cmd_script,
            "serve": _cmd_serve,
        }[args.command]
        return handler(args)
    except _UsageError as err:
        print(f"error: {err}", file=sys.stderr)
        return 1
    except (TensegrityError, OSError, ValueError, json.JSONDecodeError) as err:
        print(f"error: {err}", file=sys.stderr)
        return 1
    except Exception as err:  # pragma: no cover - internal faults
        print(f"internal error: {err!r}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())

"""Walk through the three-cell construction step by step, printing the
dimension ledger and the final basis breakdown, and write an SVG per state."""

import pathlib
import sys

from tensegrid import adhere, assemble_basis, laman_bound, new_structure, nullspace_basis
from tensegrid.geom import Point
from tensegrid.shell import render_svg

OUT = pathlib.Path(sys.argv[1]) if len(sys.argv) > 1 else pathlib.Path("out/three_cell")


def main():
    s = new_structure()
    steps = [
        [Point(0, 0), Point(3, 0), Point(1.2, 1.4), Point(-1, 3)],
        [2, 3, Point(4, 3), Point(6, 1)],
        [3, 4, 5, Point(1.5, 5)],
    ]
    running = 0
    for k, anchors in enumerate(steps, start=1):
        record, delta = adhere(s, anchors)
        running = laman_bound(s)
        print(f"step {k}: +{delta.e_i} members, +{delta.v_i} nodes, "
              f"delta_dim={delta.delta_dim if k > 1 else '-'}  bound={running}")
    basis = assemble_basis(s)
    oracle = nullspace_basis(s)
    print(f"basis: {basis.dim} states ({', '.join(src.kind for src in basis.sources)})")
    print(f"oracle nullity: {oracle.dim}  certified: {basis.certified}")

    OUT.mkdir(parents=True, exist_ok=True)
    for k in range(basis.dim):
        path = OUT / f"state_{k}.svg"
        path.write_text(render_svg(s, basis.column(k)))
        print(f"wrote {path}")


if __name__ == "__main__":
    main()

"""Generate a small gallery: circular families with and without removals and
an elliptical structure, writing documents and SVG snapshots."""

import pathlib
import sys
import time

from tensegrid.growgen import GenerateOptions, Profile, circular_family, generate
from tensegrid.shell import render_svg, save
from tensegrid.shell.svg import RenderStyle

OUT = pathlib.Path(sys.argv[1]) if len(sys.argv) > 1 else pathlib.Path("out/gallery")


def main():
    OUT.mkdir(parents=True, exist_ok=True)

    s, b = circular_family(5, seed=0)
    (OUT / "circle20.json").write_bytes(save(s, b, {"seed": 0}))
    (OUT / "circle20.svg").write_text(render_svg(s, b.column(0), RenderStyle(width_scale=3.0)))
    print(f"circle 20 cells: {b.dim} states")

    t0 = time.time()
    s, b, report = generate(Profile.ellipse(12, 7),
                            GenerateOptions(cells=70, mesh_kind="tri", seed=7))
    (OUT / "ellipse70.json").write_bytes(save(s, b, {"seed": 7}))
    (OUT / "ellipse70.svg").write_text(render_svg(s, b.column(0)))
    print(f"ellipse 70 cells: {b.dim} states "
          f"({report.interior_shared_nodes} virtual), {time.time() - t0:.1f}s, "
          f"oracle {'ok' if report.oracle_ok else 'MISMATCH'}")


if __name__ == "__main__":
    main()

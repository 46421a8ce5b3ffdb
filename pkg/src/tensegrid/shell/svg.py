"""SVG rendering of a structure, optionally styled by a self-stress state.

Sign convention: positive densities are tension, drawn dashed and thin;
negative are compression, solid and thick.  Removed members are omitted.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..model import Structure


@dataclass(frozen=True)
class RenderStyle:
    tension_stroke: str = "#2471a3"
    compression_stroke: str = "#b03a2e"
    plain_stroke: str = "#515151"
    tension_width: float = 1.3
    compression_width: float = 3.2
    plain_width: float = 1.8
    tension_dash: str = "7 5"
    width_scale: float | None = None  # extra px per unit of |density| / max
    node_radius: float = 3.0
    node_fill: str = "#1c1c1c"
    scale: float = 40.0
    padding: float = 24.0


def render_svg(structure: Structure, state=None, style: RenderStyle = RenderStyle()) -> str:
    """One line per active member, one circle per active node."""
    member_ids = sorted(structure.active_member_ids())
    density = {}
    if state is not None:
        vec = np.asarray(state, dtype=float)
        if vec.shape[0] != len(member_ids):
            raise ValueError(f"state has {vec.shape[0]} entries for {len(member_ids)} members")
        density = dict(zip(member_ids, vec))
    nodes = {n: structure.nodes[n] for n in structure.active_node_ids()}
    if nodes:
        xs = [p.x for p in nodes.values()]
        ys = [p.y for p in nodes.values()]
        x0, x1 = min(xs), max(xs)
        y0, y1 = min(ys), max(ys)
    else:
        x0 = x1 = y0 = y1 = 0.0
    s, pad = style.scale, style.padding
    width = (x1 - x0) * s + 2 * pad
    height = (y1 - y0) * s + 2 * pad

    def tx(p):
        return p.x * s - x0 * s + pad

    def ty(p):  # flip y so larger model-y is up
        return (y1 - p.y) * s + pad

    wmax = max((abs(v) for v in density.values()), default=0.0)
    lines = [
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
        f'width="{width:.1f}" height="{height:.1f}" '
        f'viewBox="0 0 {width:.1f} {height:.1f}">'
    ]
    for mid in member_ids:
        m = structure.members[mid]
        pi, pj = structure.nodes[m.nodes[0]], structure.nodes[m.nodes[1]]
        attrs = f'x1="{tx(pi):.2f}" y1="{ty(pi):.2f}" x2="{tx(pj):.2f}" y2="{ty(pj):.2f}"'
        if state is None or wmax == 0.0:
            lines.append(
                f'<line class="member" data-member="{mid}" {attrs} '
                f'stroke="{style.plain_stroke}" stroke-width="{style.plain_width}" />'
            )
            continue
        w = density[mid]
        extra = (style.width_scale * abs(w) / wmax) if style.width_scale else 0.0
        if w > 0:
            lines.append(
                f'<line class="member tension" data-member="{mid}" {attrs} '
                f'stroke="{style.tension_stroke}" stroke-width="{style.tension_width + extra:.2f}" '
                f'stroke-dasharray="{style.tension_dash}" />'
            )
        else:
            lines.append(
                f'<line class="member compression" data-member="{mid}" {attrs} '
                f'stroke="{style.compression_stroke}" stroke-width="{style.compression_width + extra:.2f}" />'
            )
    for nid, p in nodes.items():
        lines.append(
            f'<circle class="node" data-node="{nid}" cx="{tx(p):.2f}" cy="{ty(p):.2f}" '
            f'r="{style.node_radius}" fill="{style.node_fill}" />'
        )
    lines.append("</svg>")
    return "\n".join(lines)

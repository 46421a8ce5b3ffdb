// Canvas painting. Mirrors the SVG convention of the service: tension
// (positive density) dashed and thin, compression solid and thick. Painting
// is skipped entirely when no 2D context is available (headless tests).

import { StudioState } from "./state";
import type { Transform } from "./view";
import { worldToScreen } from "./view";

const TENSION = "#2471a3";
const COMPRESSION = "#b03a2e";
const PLAIN = "#515151";
const NODE = "#1c1c1c";
const DRAFT = "#7d3c98";
const LINE = "#1e8449";

export class CanvasRenderer {
  private ctx: CanvasRenderingContext2D | null;

  constructor(private canvas: HTMLCanvasElement) {
    this.ctx = canvas.getContext ? canvas.getContext("2d") : null;
  }

  render(state: StudioState, t: Transform) {
    const ctx = this.ctx;
    if (!ctx) return;
    const { width, height } = this.canvas;
    ctx.clearRect(0, 0, width, height);
    if (!state.doc) return;

    const nodes = new Map(state.doc.nodes.map((n) => [n.id, n]));
    for (const m of state.doc.members) {
      if (m.removed) continue;
      const a = nodes.get(m.nodes[0]);
      const b = nodes.get(m.nodes[1]);
      if (!a || !b) continue;
      const [x1, y1] = worldToScreen(t, a.x, a.y);
      const [x2, y2] = worldToScreen(t, b.x, b.y);
      const w = state.columnDensity(m.id);
      ctx.beginPath();
      if (w === null || w === 0) {
        ctx.strokeStyle = PLAIN;
        ctx.lineWidth = 1.6;
        ctx.setLineDash([]);
      } else if (w > 0) {
        ctx.strokeStyle = TENSION;
        ctx.lineWidth = 1.2;
        ctx.setLineDash([7, 5]);
      } else {
        ctx.strokeStyle = COMPRESSION;
        ctx.lineWidth = 3.0;
        ctx.setLineDash([]);
      }
      const marked = state.removals.some(
        (p) => p[0] === m.nodes[0] && p[1] === m.nodes[1],
      );
      if (marked) {
        ctx.strokeStyle = "#e67e22";
        ctx.lineWidth = 4.0;
        ctx.setLineDash([3, 3]);
      }
      ctx.moveTo(x1, y1);
      ctx.lineTo(x2, y2);
      ctx.stroke();
    }
    ctx.setLineDash([]);

    const flash = state.flashCell === null
      ? new Set<number>()
      : new Set(state.doc.cells.find((c) => c.cell_id === state.flashCell)?.node_ids ?? []);
    for (const n of state.doc.nodes) {
      const [x, y] = worldToScreen(t, n.x, n.y);
      ctx.beginPath();
      ctx.fillStyle = flash.has(n.id) ? "#f1c40f" : NODE;
      ctx.arc(x, y, flash.has(n.id) ? 5 : 3.2, 0, 2 * Math.PI);
      ctx.fill();
    }

    // pending draft anchors
    state.anchors.forEach((a, i) => {
      const pos = state.anchorPosition(a);
      if (!pos) return;
      const [x, y] = worldToScreen(t, pos[0], pos[1]);
      ctx.beginPath();
      ctx.strokeStyle = state.errorAnchors.includes(i) ? "#c0392b" : DRAFT;
      ctx.lineWidth = 2;
      ctx.arc(x, y, 7, 0, 2 * Math.PI);
      ctx.stroke();
    });

    // fusion overlay: constraint line and draggable candidate
    if (state.preview) {
      if (state.preview.line) {
        const { point, direction } = state.preview.line;
        const span = (width + height) / Math.max(t.scale, 1e-9);
        const [x1, y1] = worldToScreen(
          t, point[0] - direction[0] * span, point[1] - direction[1] * span,
        );
        const [x2, y2] = worldToScreen(
          t, point[0] + direction[0] * span, point[1] + direction[1] * span,
        );
        ctx.beginPath();
        ctx.strokeStyle = LINE;
        ctx.lineWidth = 1.2;
        ctx.setLineDash([10, 6]);
        ctx.moveTo(x1, y1);
        ctx.lineTo(x2, y2);
        ctx.stroke();
        ctx.setLineDash([]);
      }
      const [cx, cy] = worldToScreen(t, state.preview.candidate[0], state.preview.candidate[1]);
      ctx.beginPath();
      ctx.fillStyle = LINE;
      ctx.arc(cx, cy, 6, 0, 2 * Math.PI);
      ctx.fill();
    }
  }
}

// The studio orchestrator: wires picking, drafting and the what-if loop to
// the HTTP service. The canvas renders only confirmed revisions plus the
// local draft overlay; every displayed stress number is a server response.

import { ApiClient, ApiError } from "./api";
import { CanvasRenderer } from "./canvas";
import { PanelElements, renderPanel } from "./panel";
import { StudioState } from "./state";
import type { Anchor, Pair } from "./types";
import {
  Transform,
  distToSegment,
  fitView,
  lineResidual,
  projectOntoLine,
  screenToWorld,
  zoomAt,
} from "./view";

const PICK_RADIUS_PX = 12;

export interface AppElements extends PanelElements {
  canvas: HTMLCanvasElement;
  commit: HTMLButtonElement;
  discard: HTMLButtonElement;
  preview: HTMLButtonElement;
  undo: HTMLButtonElement;
  modeCell: HTMLButtonElement;
  modeFuse: HTMLButtonElement;
  mechanisms: HTMLInputElement;
  status: HTMLElement;
}

export class StudioApp {
  state = new StudioState();
  transform: Transform = { scale: 40, offsetX: 300, offsetY: 300 };
  private renderer: CanvasRenderer;
  private api: ApiClient;
  private draggingCandidate = false;

  constructor(private els: AppElements, baseUrl: string) {
    this.api = new ApiClient(baseUrl);
    this.renderer = new CanvasRenderer(els.canvas);
    this.attach();
  }

  async init() {
    await this.refresh(true);
  }

  /** Re-fetch the confirmed structure and stress data (poll after mutation). */
  async refresh(fit = false) {
    const structure = await this.api.structure();
    this.state.doc = structure.document;
    this.state.revision = structure.revision;
    const dim = (await this.api.selfStress()).dim;
    if (this.state.activeColumn >= dim) this.state.activeColumn = 0;
    const stress = dim > 0
      ? await this.api.selfStress(this.state.activeColumn)
      : await this.api.selfStress();
    this.state.stress = stress;
    this.state.setColumn(stress);
    if (fit) this.fitToStructure();
    this.render();
  }

  fitToStructure() {
    const nodes = this.state.doc?.nodes ?? [];
    if (!nodes.length) return;
    const xs = nodes.map((n) => n.x);
    const ys = nodes.map((n) => n.y);
    this.transform = fitView(
      this.els.canvas.width || 900,
      this.els.canvas.height || 600,
      Math.min(...xs), Math.min(...ys), Math.max(...xs), Math.max(...ys),
    );
  }

  render() {
    this.renderer.render(this.state, this.transform);
    renderPanel(this.els, this.state);
    this.els.commit.disabled = this.state.mode === "cell"
      ? !this.state.canCommitCell()
      : !this.state.preview;
    this.els.preview.disabled = !this.state.canPreviewFusion();
    this.els.status.textContent =
      `${this.state.mode} draft: ${this.state.anchors.length}/4 anchors` +
      (this.state.mode === "fuse" ? `, ${this.state.removals.length} removals` : "");
  }

  setMode(mode: "cell" | "fuse") {
    this.state.mode = mode;
    this.state.clearDraft();
    this.render();
  }

  /** Node within picking distance of a world position, if any. */
  nodeAt(wx: number, wy: number): number | null {
    const radius = PICK_RADIUS_PX / this.transform.scale;
    let best: number | null = null;
    let bestDist = radius;
    for (const n of this.state.doc?.nodes ?? []) {
      const d = Math.hypot(n.x - wx, n.y - wy);
      if (d <= bestDist) {
        best = n.id;
        bestDist = d;
      }
    }
    return best;
  }

  memberAt(wx: number, wy: number): Pair | null {
    const radius = PICK_RADIUS_PX / this.transform.scale;
    for (const m of this.state.activeMembers()) {
      const a = this.state.nodeById(m.nodes[0]);
      const b = this.state.nodeById(m.nodes[1]);
      if (!a || !b) continue;
      if (distToSegment(wx, wy, a.x, a.y, b.x, b.y) <= radius) {
        return m.nodes;
      }
    }
    return null;
  }

  /** One picking gesture at world coordinates. */
  pickWorld(wx: number, wy: number) {
    const nodeId = this.nodeAt(wx, wy);
    if (this.state.mode === "fuse" && this.state.anchors.length >= 3 && nodeId === null) {
      // after the three shared anchors, clicks toggle removal picks
      const pair = this.memberAt(wx, wy);
      if (pair) this.state.toggleRemoval(pair[0], pair[1]);
      this.render();
      return;
    }
    const anchor: Anchor = nodeId !== null ? { node: nodeId } : { point: [wx, wy] };
    this.state.addAnchor(anchor);
    this.render();
  }

  pickScreen(sx: number, sy: number) {
    const [wx, wy] = screenToWorld(this.transform, sx, sy);
    const candidate = this.state.preview?.candidate;
    if (candidate) {
      const [cx, cy] = candidate;
      if (Math.hypot(cx - wx, cy - wy) * this.transform.scale <= PICK_RADIUS_PX) {
        this.draggingCandidate = true;
        return;
      }
    }
    this.pickWorld(wx, wy);
  }

  /** Drag the fusion candidate; a constraint line keeps it on the line. */
  dragCandidate(wx: number, wy: number) {
    const preview = this.state.preview;
    if (!preview) return;
    preview.candidate = preview.line
      ? projectOntoLine(preview.line.coeffs, wx, wy)
      : [wx, wy];
    this.render();
  }

  candidateLineResidual(): number | null {
    const p = this.state.preview;
    if (!p || !p.line) return null;
    return lineResidual(p.line.coeffs, p.candidate[0], p.candidate[1]);
  }

  async commitCell() {
    if (!this.state.canCommitCell()) return;
    try {
      const resp = await this.api.addCell(
        this.state.anchors, this.state.allowMechanisms, this.state.revision,
      );
      this.state.lastDelta = resp.delta;
      this.state.flashCell = resp.cell?.cell_id ?? null;
      this.state.clearDraft();
      await this.refresh();
    } catch (err) {
      this.surface(err);
    }
  }

  /** Ask the service for the placement point/line and the would-be delta. */
  async previewFusion() {
    if (!this.state.canPreviewFusion()) return;
    const shared = this.state.nodeAnchorIds().slice(0, 3);
    const coords = shared.map((id) => {
      const n = this.state.nodeById(id)!;
      return [n.x, n.y] as [number, number];
    });
    try {
      const removed = this.state.removals.map((pair) => {
        const member = this.state.memberForPair(pair[0], pair[1])!;
        const t = this.state.columnDensity(member.id);
        if (t === null || t === 0) {
          throw new ApiError(0, "NoDensity",
            `active state carries no density on member (${pair[0]}, ${pair[1]})`);
        }
        return { pair: this.state.removalIndexPair(pair), t };
      });
      const placed = await this.api.placeNode(coords, removed);
      const anchors: Anchor[] = [
        ...shared.map((id) => ({ node: id }) as Anchor),
        { point: placed.point },
      ];
      const what = await this.api.whatIf("fuse", {
        anchors,
        remove: this.state.removals,
      });
      this.state.preview = {
        candidate: placed.point,
        line: placed.lines.length > 0 ? placed.lines[0] : null,
        delta: what.delta,
      };
      this.state.error = null;
      this.render();
    } catch (err) {
      this.surface(err);
    }
  }

  async commitFusion() {
    const preview = this.state.preview;
    if (!preview) return;
    const shared = this.state.nodeAnchorIds().slice(0, 3);
    const anchors: Anchor[] = [
      ...shared.map((id) => ({ node: id }) as Anchor),
      { point: preview.candidate },
    ];
    try {
      const resp = await this.api.fuse(anchors, this.state.removals, this.state.revision);
      this.state.lastDelta = resp.delta;
      this.state.flashCell = resp.cell?.cell_id ?? null;
      this.state.clearDraft();
      await this.refresh();
      return resp.delta;
    } catch (err) {
      this.surface(err);
      return undefined;
    }
  }

  async undo() {
    try {
      await this.api.undo();
      this.state.clearDraft();
      this.state.lastDelta = null;
      await this.refresh();
    } catch (err) {
      this.surface(err);
    }
  }

  async selectColumn(k: number) {
    this.state.activeColumn = k;
    await this.refresh();
  }

  private surface(err: unknown) {
    if (err instanceof ApiError) {
      this.state.error = `${err.kind}: ${err.message}`;
      if (err.kind === "DegeneratePosition") {
        this.state.errorAnchors = this.state.flattestTriple();
      }
    } else {
      this.state.error = String(err);
    }
    this.render();
  }

  private attach() {
    const canvas = this.els.canvas;
    let panning = false;
    let lastX = 0;
    let lastY = 0;
    canvas.addEventListener("pointerdown", (ev) => {
      const rect = canvas.getBoundingClientRect();
      const sx = ev.clientX - rect.left;
      const sy = ev.clientY - rect.top;
      if (ev.button === 1 || ev.shiftKey) {
        panning = true;
        lastX = sx;
        lastY = sy;
        return;
      }
      this.pickScreen(sx, sy);
    });
    canvas.addEventListener("pointermove", (ev) => {
      const rect = canvas.getBoundingClientRect();
      const sx = ev.clientX - rect.left;
      const sy = ev.clientY - rect.top;
      if (panning) {
        this.transform = {
          ...this.transform,
          offsetX: this.transform.offsetX + sx - lastX,
          offsetY: this.transform.offsetY + sy - lastY,
        };
        lastX = sx;
        lastY = sy;
        this.render();
      } else if (this.draggingCandidate) {
        const [wx, wy] = screenToWorld(this.transform, sx, sy);
        this.dragCandidate(wx, wy);
      }
    });
    canvas.addEventListener("pointerup", () => {
      panning = false;
      this.draggingCandidate = false;
    });
    canvas.addEventListener("wheel", (ev) => {
      ev.preventDefault();
      const rect = canvas.getBoundingClientRect();
      this.transform = zoomAt(
        this.transform,
        ev.clientX - rect.left,
        ev.clientY - rect.top,
        Math.exp(-ev.deltaY / 400),
      );
      this.render();
    });
    this.els.commit.addEventListener("click", () => {
      if (this.state.mode === "cell") void this.commitCell();
      else void this.commitFusion();
    });
    this.els.preview.addEventListener("click", () => void this.previewFusion());
    this.els.discard.addEventListener("click", () => {
      this.state.clearDraft();
      this.render();
    });
    this.els.undo.addEventListener("click", () => void this.undo());
    this.els.modeCell.addEventListener("click", () => this.setMode("cell"));
    this.els.modeFuse.addEventListener("click", () => this.setMode("fuse"));
    this.els.mechanisms.addEventListener("change", () => {
      this.state.allowMechanisms = this.els.mechanisms.checked;
      this.render();
    });
    this.els.stateSelect.addEventListener("change", () => {
      void this.selectColumn(Number(this.els.stateSelect.value));
    });
  }
}

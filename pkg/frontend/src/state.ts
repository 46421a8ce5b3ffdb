// Client-side view state: the pending draft, the active basis column, and
// the last confirmed server payloads. Mutating the draft never touches the
// structure; only committed server responses update document/stress data.

import type {
  Anchor,
  Delta,
  DocumentData,
  MemberData,
  Pair,
  PlacementLine,
  SelfStressResponse,
} from "./types";

export type Mode = "cell" | "fuse";

export interface FusionPreview {
  candidate: [number, number];
  line: PlacementLine | null;
  delta: Delta;
}

export class StudioState {
  revision = -1;
  doc: DocumentData | null = null;
  stress: SelfStressResponse | null = null;
  activeColumn = 0;
  columnValues: Map<number, number> = new Map(); // member id -> density of active column

  mode: Mode = "cell";
  allowMechanisms = false;
  anchors: Anchor[] = [];
  removals: Pair[] = [];
  preview: FusionPreview | null = null;
  lastDelta: Delta | null = null;
  flashCell: number | null = null;
  error: string | null = null;
  errorAnchors: number[] = [];

  nodeById(id: number) {
    return this.doc?.nodes.find((n) => n.id === id) ?? null;
  }

  activeMembers(): MemberData[] {
    return this.doc?.members.filter((m) => !m.removed) ?? [];
  }

  memberForPair(i: number, j: number): MemberData | null {
    const key = i < j ? [i, j] : [j, i];
    return (
      this.activeMembers().find((m) => m.nodes[0] === key[0] && m.nodes[1] === key[1]) ?? null
    );
  }

  nodeAnchorIds(): number[] {
    return this.anchors.flatMap((a) => ("node" in a ? [a.node] : []));
  }

  anchorPosition(a: Anchor): [number, number] | null {
    if ("point" in a) return a.point;
    const n = this.nodeById(a.node);
    return n ? [n.x, n.y] : null;
  }

  addAnchor(a: Anchor): boolean {
    if (this.anchors.length >= 4) return false;
    if ("node" in a && this.nodeAnchorIds().includes(a.node)) return false;
    if (this.mode === "fuse" && this.anchors.length < 3 && !("node" in a)) {
      // fusion shares three existing nodes; free points only for the fourth
      return false;
    }
    this.anchors.push(a);
    this.error = null;
    this.errorAnchors = [];
    return true;
  }

  clearDraft() {
    this.anchors = [];
    this.removals = [];
    this.preview = null;
    this.error = null;
    this.errorAnchors = [];
  }

  structureEmpty(): boolean {
    return !this.doc || this.doc.nodes.length === 0;
  }

  /** A cell draft commits only with two existing-node anchors, unless the
   * structure is empty or mechanism mode is toggled on. */
  canCommitCell(): boolean {
    if (this.anchors.length !== 4) return false;
    if (this.structureEmpty() || this.allowMechanisms) return true;
    return this.nodeAnchorIds().length >= 2;
  }

  /** Removal picks live on the members joining the three shared anchors. */
  toggleRemoval(i: number, j: number): boolean {
    const shared = this.nodeAnchorIds().slice(0, 3);
    if (!shared.includes(i) || !shared.includes(j)) return false;
    if (!this.memberForPair(i, j)) return false;
    const key: Pair = i < j ? [i, j] : [j, i];
    const at = this.removals.findIndex((p) => p[0] === key[0] && p[1] === key[1]);
    if (at >= 0) this.removals.splice(at, 1);
    else this.removals.push(key);
    this.preview = null;
    return true;
  }

  /** Index pair of a removal within the shared-anchor triple (for place-node). */
  removalIndexPair(pair: Pair): Pair {
    const shared = this.nodeAnchorIds().slice(0, 3);
    const a = shared.indexOf(pair[0]);
    const b = shared.indexOf(pair[1]);
    return a < b ? [a, b] : [b, a];
  }

  canPreviewFusion(): boolean {
    return this.mode === "fuse" && this.nodeAnchorIds().length >= 3 && this.removals.length >= 1;
  }

  columnDensity(memberId: number): number | null {
    return this.columnValues.has(memberId) ? this.columnValues.get(memberId)! : null;
  }

  setColumn(stress: SelfStressResponse) {
    this.columnValues = new Map();
    if (stress.column && stress.member_ids) {
      stress.member_ids.forEach((mid, i) => this.columnValues.set(mid, stress.column![i]));
    }
  }

  /** Indices of the flattest anchor triple (for degenerate-position errors). */
  flattestTriple(): number[] {
    const pos = this.anchors.map((a) => this.anchorPosition(a));
    if (pos.some((p) => p === null) || pos.length < 3) return [];
    let best: number[] = [];
    let bestArea = Infinity;
    for (let i = 0; i < pos.length; i++)
      for (let j = i + 1; j < pos.length; j++)
        for (let k = j + 1; k < pos.length; k++) {
          const [a, b, c] = [pos[i]!, pos[j]!, pos[k]!];
          const area = Math.abs(
            (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0]),
          );
          if (area < bestArea) {
            bestArea = area;
            best = [i, j, k];
          }
        }
    return best;
  }
}

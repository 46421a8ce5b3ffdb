// Payload shapes of the HTTP/JSON service. The studio never computes stress
// itself: every number shown comes from one of these responses, tagged with
// the revision it belongs to.

export interface NodeData {
  id: number;
  x: number;
  y: number;
}

export interface MemberData {
  id: number;
  nodes: [number, number];
  removed: boolean;
  group: string;
}

export interface CellData {
  cell_id: number;
  node_ids: number[];
  cell_type: string | null;
  member_ids: number[];
  kind: string;
}

export interface DocumentData {
  nodes: NodeData[];
  members: MemberData[];
  cells: CellData[];
}

export interface StructureResponse {
  revision: number;
  mode: string;
  document: DocumentData;
}

export interface SourceTag {
  kind: string;
  cell_id?: number;
  center?: number;
  periphery?: number[];
  member_ids?: number[];
  index?: number;
}

export interface Delta {
  e_i: number;
  v_i: number;
  delta_dim: number;
  placement_sensitive: boolean;
}

export interface Counts {
  nodes: number;
  members: number;
  cells: number;
  laman_bound: number;
}

export interface MutationResponse {
  revision: number;
  committed: boolean;
  delta: Delta;
  cell?: CellData;
  counts: Counts;
}

export interface SelfStressResponse {
  revision: number;
  dim: number;
  mode: string;
  sources: SourceTag[];
  column?: number[];
  member_ids?: number[];
}

export interface PlacementLine {
  coeffs: [number, number, number];
  point: [number, number];
  direction: [number, number];
}

export interface PlaceNodeResponse {
  point: [number, number];
  lines: PlacementLine[];
}

export type Anchor = { node: number } | { point: [number, number] };

export type Pair = [number, number];

import type {
  Anchor,
  MutationResponse,
  Pair,
  PlaceNodeResponse,
  SelfStressResponse,
  StructureResponse,
} from "./types";

export class ApiError extends Error {
  constructor(
    public status: number,
    public kind: string,
    message: string,
  ) {
    super(message);
  }
}

async function asJson<T>(resp: Response): Promise<T> {
  const body = await resp.json().catch(() => ({}));
  if (!resp.ok) {
    throw new ApiError(resp.status, body.error ?? "HttpError", body.message ?? resp.statusText);
  }
  return body as T;
}

export class ApiClient {
  constructor(private base: string) {}

  private get<T>(path: string): Promise<T> {
    return fetch(this.base + path).then((r) => asJson<T>(r));
  }

  private post<T>(path: string, body: unknown): Promise<T> {
    return fetch(this.base + path, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(body),
    }).then((r) => asJson<T>(r));
  }

  structure(): Promise<StructureResponse> {
    return this.get("/api/structure");
  }

  selfStress(column?: number): Promise<SelfStressResponse> {
    const q = column === undefined ? "" : `?state=${column}`;
    return this.get(`/api/selfstress${q}`);
  }

  addCell(anchors: Anchor[], allowMechanisms: boolean, revision?: number): Promise<MutationResponse> {
    return this.post("/api/cells", { anchors, allow_mechanisms: allowMechanisms, revision });
  }

  fuse(anchors: Anchor[], remove: Pair[], revision?: number): Promise<MutationResponse> {
    return this.post("/api/fuse", { anchors, remove, revision });
  }

  whatIf(action: "cells" | "fuse" | "remove-member", body: unknown): Promise<MutationResponse> {
    return this.post("/api/whatif", { action, body });
  }

  placeNode(
    shared: [number, number][],
    removed: { pair: Pair; t: number }[],
    alpha = 1.0,
  ): Promise<PlaceNodeResponse> {
    return this.post("/api/place-node", { shared, removed, alpha });
  }

  removeMember(pair: Pair, revision?: number): Promise<MutationResponse> {
    return this.post("/api/remove-member", { pair, revision });
  }

  undo(): Promise<{ revision: number }> {
    return this.post("/api/undo", {});
  }
}

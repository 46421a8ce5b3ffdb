import { describe, expect, it } from "vitest";

import { StudioState } from "../src/state";
import type { DocumentData } from "../src/types";

function docWithSquare(): DocumentData {
  return {
    nodes: [
      { id: 1, x: 0, y: 0 },
      { id: 2, x: 1, y: 0 },
      { id: 3, x: 1, y: 1 },
      { id: 4, x: 0, y: 1 },
    ],
    members: [
      { id: 1, nodes: [1, 2], removed: false, group: "envelope" },
      { id: 2, nodes: [2, 3], removed: false, group: "envelope" },
      { id: 3, nodes: [3, 4], removed: false, group: "envelope" },
      { id: 4, nodes: [1, 4], removed: false, group: "envelope" },
      { id: 5, nodes: [1, 3], removed: false, group: "spoke" },
      { id: 6, nodes: [2, 4], removed: true, group: "spoke" },
    ],
    cells: [],
  };
}

describe("cell draft rules", () => {
  it("never commits with fewer than two node anchors on a non-empty structure", () => {
    const s = new StudioState();
    s.doc = docWithSquare();
    s.addAnchor({ node: 1 });
    s.addAnchor({ point: [5, 5] });
    s.addAnchor({ point: [6, 5] });
    s.addAnchor({ point: [5, 6] });
    expect(s.canCommitCell()).toBe(false);
    s.allowMechanisms = true; // mechanism mode opts in
    expect(s.canCommitCell()).toBe(true);
  });

  it("commits with two node anchors", () => {
    const s = new StudioState();
    s.doc = docWithSquare();
    s.addAnchor({ node: 1 });
    s.addAnchor({ node: 2 });
    s.addAnchor({ point: [0.5, -1] });
    s.addAnchor({ point: [1.5, -1.2] });
    expect(s.canCommitCell()).toBe(true);
  });

  it("allows four free points on an empty structure", () => {
    const s = new StudioState();
    s.doc = { nodes: [], members: [], cells: [] };
    for (const p of [[0, 0], [1, 0], [1, 1], [0, 1]] as [number, number][]) {
      expect(s.addAnchor({ point: p })).toBe(true);
    }
    expect(s.canCommitCell()).toBe(true);
  });

  it("caps anchors at four and rejects duplicate nodes", () => {
    const s = new StudioState();
    s.doc = docWithSquare();
    expect(s.addAnchor({ node: 1 })).toBe(true);
    expect(s.addAnchor({ node: 1 })).toBe(false);
    s.addAnchor({ node: 2 });
    s.addAnchor({ point: [4, 4] });
    s.addAnchor({ point: [5, 4] });
    expect(s.addAnchor({ point: [6, 4] })).toBe(false);
  });
});

describe("fusion draft rules", () => {
  it("requires node anchors for the shared triple", () => {
    const s = new StudioState();
    s.doc = docWithSquare();
    s.mode = "fuse";
    expect(s.addAnchor({ point: [0.2, 0.2] })).toBe(false);
    expect(s.addAnchor({ node: 1 })).toBe(true);
    expect(s.addAnchor({ node: 2 })).toBe(true);
    expect(s.addAnchor({ node: 3 })).toBe(true);
    expect(s.addAnchor({ point: [2, -1] })).toBe(true); // fourth may be free
  });

  it("toggles removals only on members joining the shared triple", () => {
    const s = new StudioState();
    s.doc = docWithSquare();
    s.mode = "fuse";
    s.addAnchor({ node: 1 });
    s.addAnchor({ node: 2 });
    s.addAnchor({ node: 3 });
    expect(s.toggleRemoval(1, 2)).toBe(true);
    expect(s.removals).toEqual([[1, 2]]);
    expect(s.toggleRemoval(2, 1)).toBe(true); // toggle off, order-insensitive
    expect(s.removals).toEqual([]);
    expect(s.toggleRemoval(3, 4)).toBe(false); // node 4 not in the triple
    expect(s.toggleRemoval(2, 4)).toBe(false); // member removed already
  });

  it("maps removal pairs onto shared-triple index pairs", () => {
    const s = new StudioState();
    s.doc = docWithSquare();
    s.mode = "fuse";
    s.addAnchor({ node: 2 });
    s.addAnchor({ node: 3 });
    s.addAnchor({ node: 1 });
    expect(s.removalIndexPair([2, 3])).toEqual([0, 1]);
    expect(s.removalIndexPair([1, 3])).toEqual([1, 2]);
    expect(s.removalIndexPair([1, 2])).toEqual([0, 2]);
  });
});

describe("column densities and error hints", () => {
  it("stores the active column by member id", () => {
    const s = new StudioState();
    s.setColumn({
      revision: 1, dim: 1, mode: "structural", sources: [],
      column: [1, -2], member_ids: [1, 5],
    });
    expect(s.columnDensity(1)).toBe(1);
    expect(s.columnDensity(5)).toBe(-2);
    expect(s.columnDensity(99)).toBeNull();
  });

  it("identifies the flattest anchor triple", () => {
    const s = new StudioState();
    s.doc = { nodes: [], members: [], cells: [] };
    s.addAnchor({ point: [0, 0] });
    s.addAnchor({ point: [1, 0] });
    s.addAnchor({ point: [2, 1e-9] }); // nearly collinear with the first two
    s.addAnchor({ point: [1, 5] });
    expect(s.flattestTriple()).toEqual([0, 1, 2]);
  });
});

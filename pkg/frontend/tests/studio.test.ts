// Scripted UI test: a real instance of the service is spawned and the studio
// DOM is driven through the same handlers the pointer events call. The panel
// must track the server's self-stress ledger exactly.

import { ChildProcess, spawn } from "node:child_process";
import { connect, createServer } from "node:net";
import path from "node:path";
import { afterAll, beforeAll, describe, expect, it } from "vitest";

import { AppElements, StudioApp } from "../src/app";
import { worldToScreen } from "../src/view";

const REPO_ROOT = path.resolve(__dirname, "..", "..");

function freePort(): Promise<number> {
  return new Promise((resolve, reject) => {
    const srv = createServer();
    srv.listen(0, "127.0.0.1", () => {
      const addr = srv.address();
      if (addr && typeof addr === "object") {
        const port = addr.port;
        srv.close(() => resolve(port));
      } else {
        reject(new Error("no port"));
      }
    });
  });
}

function portOpen(port: number): Promise<boolean> {
  return new Promise((resolve) => {
    const sock = connect({ port, host: "127.0.0.1" }, () => {
      sock.destroy();
      resolve(true);
    });
    sock.on("error", () => resolve(false));
  });
}

async function waitForService(port: number, tries = 100): Promise<void> {
  for (let i = 0; i < tries; i++) {
    if (await portOpen(port)) return;
    await new Promise((r) => setTimeout(r, 100));
  }
  throw new Error("service did not come up");
}

function scaffold(): AppElements {
  document.body.innerHTML = `
    <canvas id="canvas" width="960" height="640"></canvas>
    <button id="commit"></button><button id="discard"></button>
    <button id="preview"></button><button id="undo"></button>
    <button id="mode-cell"></button><button id="mode-fuse"></button>
    <input type="checkbox" id="mechanisms" />
    <span id="status"></span>
    <div id="stress-dim"></div><div id="stress-sources"></div>
    <div id="ledger"></div><div id="revision"></div><div id="error"></div>
    <select id="state-select"></select>`;
  const grab = (id: string) => document.getElementById(id)! as HTMLElement;
  return {
    canvas: grab("canvas") as HTMLCanvasElement,
    commit: grab("commit") as HTMLButtonElement,
    discard: grab("discard") as HTMLButtonElement,
    preview: grab("preview") as HTMLButtonElement,
    undo: grab("undo") as HTMLButtonElement,
    modeCell: grab("mode-cell") as HTMLButtonElement,
    modeFuse: grab("mode-fuse") as HTMLButtonElement,
    mechanisms: grab("mechanisms") as HTMLInputElement,
    status: grab("status"),
    dim: grab("stress-dim"),
    sources: grab("stress-sources"),
    ledger: grab("ledger"),
    revision: grab("revision"),
    error: grab("error"),
    stateSelect: grab("state-select") as HTMLSelectElement,
  };
}

let proc: ChildProcess;
let base: string;

beforeAll(async () => {
  const port = await freePort();
  base = `http://127.0.0.1:${port}`;
  proc = spawn("python3", ["-m", "tensegrid.shell.cli", "serve", "--port", String(port)], {
    cwd: REPO_ROOT,
    stdio: "ignore",
  });
  await waitForService(port);
});

afterAll(() => {
  proc?.kill();
});

describe("studio against the live service", () => {
  it("drafts the three-cell sequence and tracks the ledger to dim 4", async () => {
    const els = scaffold();
    const app = new StudioApp(els, base);
    await app.init();
    expect(app.state.revision).toBe(0);

    // first cell: four canvas points (empty structure commits freely)
    for (const p of [[0, 0], [3, 0], [1.2, 1.4], [-1, 3]] as [number, number][]) {
      app.pickWorld(p[0], p[1]);
    }
    expect(app.state.canCommitCell()).toBe(true);
    await app.commitCell();
    expect(els.dim.textContent).toBe("1");
    expect(els.sources.textContent).toBe("1 cell");
    expect(app.state.lastDelta?.delta_dim).toBe(-2); // 6 - 2*4: first-cell bookkeeping

    // second cell: snap onto nodes 2 and 3 through the screen-pick path
    for (const w of [[3, 0], [1.2, 1.4]] as [number, number][]) {
      const [sx, sy] = worldToScreen(app.transform, w[0], w[1]);
      app.pickScreen(sx, sy);
    }
    expect(app.state.nodeAnchorIds()).toEqual([2, 3]);
    app.pickWorld(4, 3);
    app.pickWorld(6, 1);
    await app.commitCell();
    expect(app.state.lastDelta?.delta_dim).toBe(1);
    expect(els.dim.textContent).toBe("2");
    expect(els.sources.textContent).toBe("2 cell");

    // third cell: three shared nodes and one fresh point
    app.pickWorld(1.2, 1.4);
    app.pickWorld(-1, 3);
    app.pickWorld(4, 3);
    app.pickWorld(1.5, 5);
    expect(app.state.nodeAnchorIds()).toEqual([3, 4, 5]);
    await app.commitCell();
    expect(app.state.lastDelta?.delta_dim).toBe(2);

    // the self-stress panel reads dim 4 with 3 cell + 1 virtual sources
    expect(els.dim.textContent).toBe("4");
    expect(els.sources.textContent).toBe("3 cell + 1 virtual");
    expect(els.revision.textContent).toBe("3");
    expect(els.stateSelect.options.length).toBe(4);
  });

  it("previews fusion with the placement line and commits the previewed delta", async () => {
    const els = scaffold();
    const app = new StudioApp(els, base);
    await app.init();
    expect(els.dim.textContent).toBe("4"); // structure from the previous test

    // view the third cell's state: it carries density on both removal picks
    const cellThree = app.state.stress!.sources.findIndex(
      (s) => s.kind === "cell" && s.cell_id === 3,
    );
    await app.selectColumn(cellThree);

    app.setMode("fuse");
    app.pickWorld(1.2, 1.4); // node 3
    app.pickWorld(-1, 3); // node 4
    app.pickWorld(4, 3); // node 5
    expect(app.state.nodeAnchorIds()).toEqual([3, 4, 5]);
    expect(app.state.toggleRemoval(3, 4)).toBe(true);
    expect(app.state.toggleRemoval(3, 5)).toBe(true);

    const revisionBefore = app.state.revision;
    await app.previewFusion();
    expect(app.state.error).toBeNull();
    const preview = app.state.preview!;
    expect(preview.line).not.toBeNull(); // two removals pin the node to a line
    expect(preview.delta.delta_dim).toBe(-1);
    expect(preview.delta.placement_sensitive).toBe(true);
    expect(app.state.revision).toBe(revisionBefore); // what-if committed nothing
    const structure = await fetch(`${base}/api/structure`).then((r) => r.json());
    expect(structure.revision).toBe(revisionBefore);

    // dragging keeps the candidate on the line
    app.dragCandidate(9.5, -4.2);
    expect(app.candidateLineResidual()!).toBeLessThan(1e-9);
    const dragged = [...preview.candidate];

    const committed = await app.commitFusion();
    expect(committed).toEqual(preview.delta); // commit matches the preview
    expect(els.ledger.textContent).toContain("Δdim=-1");
    expect(els.dim.textContent).toBe("3");
    // the committed document holds the dragged candidate as the newest node
    const doc = (await fetch(`${base}/api/structure`).then((r) => r.json())).document;
    const newest = doc.nodes[doc.nodes.length - 1];
    expect(newest.x).toBeCloseTo(dragged[0], 9);
    expect(newest.y).toBeCloseTo(dragged[1], 9);
    const removedCount = doc.members.filter((m: { removed: boolean }) => m.removed).length;
    expect(removedCount).toBe(2);
  });

  it("surfaces degenerate drafts inline without committing", async () => {
    const els = scaffold();
    const app = new StudioApp(els, base);
    await app.init();
    const revision = app.state.revision;
    app.pickWorld(20, 20);
    app.pickWorld(21, 21);
    app.pickWorld(22, 22); // collinear with the first two
    app.pickWorld(20, 25);
    app.state.allowMechanisms = true; // isolate the degeneracy error
    await app.commitCell();
    expect(els.error.textContent).toContain("DegeneratePosition");
    expect(app.state.errorAnchors).toEqual([0, 1, 2]); // the offending triple
    expect(app.state.revision).toBe(revision);
  });

  it("undo returns the canvas to the prior revision's document", async () => {
    const els = scaffold();
    const app = new StudioApp(els, base);
    await app.init();
    const before = await fetch(`${base}/api/structure`).then((r) => r.json());
    app.pickWorld(1.2, 1.4); // node 3
    app.pickWorld(0, 0); // node 1
    app.pickWorld(-4, -2);
    app.pickWorld(-3, -4);
    await app.commitCell();
    expect(app.state.doc!.nodes.length).toBe(before.document.nodes.length + 2);
    await app.undo();
    const after = await fetch(`${base}/api/structure`).then((r) => r.json());
    expect(after.document).toEqual(before.document);
    expect(app.state.doc).toEqual(before.document);
  });
});

import { AppElements, StudioApp } from "./app";

function grab<T extends HTMLElement>(id: string): T {
  const el = document.getElementById(id);
  if (!el) throw new Error(`missing element #${id}`);
  return el as T;
}

export function mount(baseUrl: string): StudioApp {
  const els: AppElements = {
    canvas: grab<HTMLCanvasElement>("canvas"),
    commit: grab<HTMLButtonElement>("commit"),
    discard: grab<HTMLButtonElement>("discard"),
    preview: grab<HTMLButtonElement>("preview"),
    undo: grab<HTMLButtonElement>("undo"),
    modeCell: grab<HTMLButtonElement>("mode-cell"),
    modeFuse: grab<HTMLButtonElement>("mode-fuse"),
    mechanisms: grab<HTMLInputElement>("mechanisms"),
    status: grab("status"),
    dim: grab("stress-dim"),
    sources: grab("stress-sources"),
    ledger: grab("ledger"),
    revision: grab("revision"),
    error: grab("error"),
    stateSelect: grab<HTMLSelectElement>("state-select"),
  };
  const app = new StudioApp(els, baseUrl);
  void app.init();
  return app;
}

declare global {
  interface Window {
    studio?: StudioApp;
  }
}

if (typeof document !== "undefined" && document.getElementById("canvas")) {
  window.studio = mount(window.location.origin);
}

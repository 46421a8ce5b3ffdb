// Self-stress panel: dimension, source breakdown, basis column selector and
// the step ledger. All values come straight from server responses.

import { StudioState } from "./state";
import type { SourceTag } from "./types";

export function sourceSummary(sources: SourceTag[]): string {
  let cells = 0;
  let virtual = 0;
  let numeric = 0;
  for (const s of sources) {
    if (s.kind === "cell") cells += 1;
    else if (s.kind.startsWith("virtual")) virtual += 1;
    else numeric += 1;
  }
  const parts: string[] = [];
  if (cells) parts.push(`${cells} cell`);
  if (virtual) parts.push(`${virtual} virtual`);
  if (numeric) parts.push(`${numeric} numeric`);
  return parts.join(" + ") || "none";
}

export function sourceLabel(s: SourceTag, index: number): string {
  if (s.kind === "cell") return `cell ${s.cell_id}`;
  if (s.kind === "virtual_wheel") return `wheel @ node ${s.center}`;
  if (s.kind === "virtual_general") return `virtual (${s.member_ids?.length ?? 0} members)`;
  return `numeric ${index}`;
}

export interface PanelElements {
  dim: HTMLElement;
  sources: HTMLElement;
  ledger: HTMLElement;
  revision: HTMLElement;
  error: HTMLElement;
  stateSelect: HTMLSelectElement;
}

export function renderPanel(els: PanelElements, state: StudioState) {
  if (state.stress) {
    els.dim.textContent = String(state.stress.dim);
    els.sources.textContent = sourceSummary(state.stress.sources);
    const options = state.stress.sources
      .map((s, i) => `<option value="${i}">${i}: ${sourceLabel(s, i)}</option>`)
      .join("");
    if (els.stateSelect.innerHTML !== options) {
      els.stateSelect.innerHTML = options;
    }
    els.stateSelect.value = String(state.activeColumn);
  } else {
    els.dim.textContent = "-";
    els.sources.textContent = "none";
  }
  els.revision.textContent = String(state.revision);
  if (state.lastDelta) {
    const d = state.lastDelta;
    els.ledger.textContent =
      `Δe=${d.e_i} Δv=${d.v_i} Δdim=${d.delta_dim}` +
      (d.placement_sensitive ? " (placement-sensitive)" : "");
  } else {
    els.ledger.textContent = "";
  }
  els.error.textContent = state.error ?? "";
}

// Session state and its serialization.
//
// All edits go through pure functions returning new state; the draft
// model never replaces the applied one until applyDraft.  A serialized
// session restores to a state that issues byte-identical requests, so a
// replay against the same service version reproduces identical charts.

import type { LayeredModel, SweepSettings } from "./types.js";

export interface SessionState {
  draft: LayeredModel;
  applied: LayeredModel | null;
  dirty: boolean;
  device: string | null;
  height: number;
  frequencies: number[] | null; // multi-frequency selection, null = default
  sweep: SweepSettings;
}

const SESSION_VERSION = 1;

export function newSession(): SessionState {
  return {
    draft: {
      sigma_S_per_m: [0.1, 0.001, 0.01],
      mu_r: [1.0, 1.01, 1.005],
      thickness_m: [1.5, 1.0],
    },
    applied: null,
    dirty: true,
    device: null,
    height: 0.9,
    frequencies: null,
    sweep: { axis: "height", start: 0.0, stop: 3.0, step: 0.05, points: 61 },
  };
}

function cloneModel(m: LayeredModel): LayeredModel {
  return {
    sigma_S_per_m: [...m.sigma_S_per_m],
    mu_r: [...m.mu_r],
    thickness_m: [...m.thickness_m],
  };
}

export function editLayer(s: SessionState, index: number,
                          field: "sigma" | "mu_r" | "thickness",
                          value: number): SessionState {
  const draft = cloneModel(s.draft);
  if (field === "sigma") draft.sigma_S_per_m[index] = value;
  else if (field === "mu_r") draft.mu_r[index] = value;
  else draft.thickness_m[index] = value;
  return { ...s, draft, dirty: true };
}

export function addLayer(s: SessionState): SessionState {
  const draft = cloneModel(s.draft);
  const last = draft.sigma_S_per_m.length - 1;
  draft.sigma_S_per_m.push(draft.sigma_S_per_m[last] ?? 0.01);
  draft.mu_r.push(draft.mu_r[last] ?? 1.0);
  draft.thickness_m.push(1.0);
  return { ...s, draft, dirty: true };
}

export function removeLayer(s: SessionState, index: number): SessionState {
  const draft = cloneModel(s.draft);
  draft.sigma_S_per_m.splice(index, 1);
  draft.mu_r.splice(index, 1);
  draft.thickness_m.splice(Math.min(index, draft.thickness_m.length - 1), 1);
  return { ...s, draft, dirty: true };
}

export function applyDraft(s: SessionState): SessionState {
  return { ...s, applied: cloneModel(s.draft), dirty: false };
}

export function selectDevice(s: SessionState, device: string): SessionState {
  return { ...s, device, frequencies: null };
}

export function setSweep(s: SessionState,
                         sweep: Partial<SweepSettings>): SessionState {
  return { ...s, sweep: { ...s.sweep, ...sweep } };
}

export function setHeight(s: SessionState, height: number): SessionState {
  return { ...s, height };
}

// ---------------------------------------------------------------------------
// Request bodies (the single source for every chart request)
// ---------------------------------------------------------------------------

export function sweepRequestBody(s: SessionState): Record<string, unknown> | null {
  if (!s.applied || !s.device) return null;
  const base: Record<string, unknown> = {
    model: s.applied,
    device: s.device,
    height: s.sweep.axis === "height" ? 0.0 : s.height,
    axis: s.sweep.axis,
    start: s.sweep.start,
    stop: s.sweep.stop,
  };
  if (s.sweep.axis === "height") base.step = s.sweep.step;
  else base.points = s.sweep.points;
  if (s.frequencies) base.frequencies = s.frequencies;
  return base;
}

export function diagnosticsRequestBody(s: SessionState): Record<string, unknown> | null {
  if (!s.applied || !s.device) return null;
  const body: Record<string, unknown> = {
    model: s.applied, device: s.device, height: s.height,
  };
  if (s.frequencies) body.frequencies = s.frequencies;
  return body;
}

export function doiRequestBody(s: SessionState): Record<string, unknown> | null {
  const body = diagnosticsRequestBody(s);
  if (body) body.curves = true;
  return body;
}

// ---------------------------------------------------------------------------
// Serialization
// ---------------------------------------------------------------------------

export function serializeSession(s: SessionState): string {
  return JSON.stringify({ version: SESSION_VERSION, state: s }, null, 2);
}

export function restoreSession(text: string): SessionState {
  const parsed = JSON.parse(text) as { version: number; state: SessionState };
  if (parsed.version !== SESSION_VERSION) {
    throw new Error(`unsupported session version ${parsed.version}`);
  }
  const s = parsed.state;
  return {
    ...newSession(),
    ...s,
    draft: cloneModel(s.draft),
    applied: s.applied ? cloneModel(s.applied) : null,
    sweep: { ...newSession().sweep, ...s.sweep },
  };
}

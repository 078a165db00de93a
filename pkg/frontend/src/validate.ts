// Draft validation mirroring the service's layered-model invariants, so
// problems flag inline before any request is made.  The service remains
// the authority: its 422 responses surface verbatim.

import type { LayeredModel } from "./types.js";

export interface FieldIssue {
  field: "sigma" | "mu_r" | "thickness" | "model";
  index: number | null;
  message: string;
}

export function validateModel(model: LayeredModel): FieldIssue[] {
  const issues: FieldIssue[] = [];
  const n = model.sigma_S_per_m.length;
  if (n < 1) {
    issues.push({ field: "model", index: null,
                  message: "model must have at least one layer" });
  }
  if (model.mu_r.length !== n) {
    issues.push({ field: "mu_r", index: null,
                  message: `mu_r has ${model.mu_r.length} entries, expected ${n}` });
  }
  if (model.thickness_m.length !== Math.max(n - 1, 0)) {
    issues.push({
      field: "thickness", index: null,
      message: `thickness has ${model.thickness_m.length} entries, expected ${Math.max(n - 1, 0)}`,
    });
  }
  model.sigma_S_per_m.forEach((s, i) => {
    if (!Number.isFinite(s)) {
      issues.push({ field: "sigma", index: i, message: "must be finite" });
    } else if (s < 0) {
      issues.push({ field: "sigma", index: i,
                    message: "conductivity must be non-negative" });
    }
  });
  model.mu_r.forEach((m, i) => {
    if (!Number.isFinite(m)) {
      issues.push({ field: "mu_r", index: i, message: "must be finite" });
    } else if (m <= 0) {
      issues.push({ field: "mu_r", index: i,
                    message: "relative permeability must be positive" });
    }
  });
  model.thickness_m.forEach((d, i) => {
    if (!Number.isFinite(d)) {
      issues.push({ field: "thickness", index: i, message: "must be finite" });
    } else if (d <= 0) {
      issues.push({ field: "thickness", index: i,
                    message: "thickness must be positive" });
    }
  });
  return issues;
}

export function layerDepths(model: LayeredModel): number[] {
  const z = [0];
  for (const d of model.thickness_m) z.push(z[z.length - 1] + d);
  return z;
}

import { describe, expect, it } from "vitest";

import { addLayer, applyDraft, diagnosticsRequestBody, doiRequestBody,
         editLayer, newSession, removeLayer, restoreSession, selectDevice,
         serializeSession, setHeight, setSweep,
         sweepRequestBody } from "../src/session.js";

function configured() {
  let s = newSession();
  s = applyDraft(s);
  s = selectDevice(s, "Dualem-21H");
  s = setHeight(s, 0.9);
  return s;
}

describe("draft editing", () => {
  it("edits never touch the applied model until applyDraft", () => {
    let s = applyDraft(newSession());
    const before = JSON.stringify(s.applied);
    s = editLayer(s, 1, "sigma", 2.0);
    expect(s.dirty).toBe(true);
    expect(JSON.stringify(s.applied)).toBe(before);
    expect(s.draft.sigma_S_per_m[1]).toBe(2.0);
    s = applyDraft(s);
    expect(s.applied!.sigma_S_per_m[1]).toBe(2.0);
    expect(s.dirty).toBe(false);
  });

  it("add/remove layer keep the arrays consistent", () => {
    let s = newSession();
    s = addLayer(s);
    expect(s.draft.sigma_S_per_m).toHaveLength(4);
    expect(s.draft.thickness_m).toHaveLength(3);
    s = removeLayer(s, 0);
    expect(s.draft.sigma_S_per_m).toHaveLength(3);
    expect(s.draft.thickness_m).toHaveLength(2);
  });
});

describe("request bodies", () => {
  it("no requests before a device and an applied model exist", () => {
    expect(sweepRequestBody(newSession())).toBeNull();
    expect(diagnosticsRequestBody(applyDraft(newSession()))).toBeNull();
  });

  it("height sweep body carries the applied model and step", () => {
    const body = sweepRequestBody(configured())!;
    expect(body).toMatchObject({
      device: "Dualem-21H", axis: "height", start: 0, stop: 3, step: 0.05,
    });
    expect(body.model).toEqual({
      sigma_S_per_m: [0.1, 0.001, 0.01],
      mu_r: [1.0, 1.01, 1.005],
      thickness_m: [1.5, 1.0],
    });
    expect(body).not.toHaveProperty("points");
  });

  it("frequency sweep body uses points, not step", () => {
    let s = configured();
    s = setSweep(s, { axis: "frequency", start: 30, stop: 93000 });
    const body = sweepRequestBody(s)!;
    expect(body).toMatchObject({ axis: "frequency", points: 61,
                                 height: 0.9 });
    expect(body).not.toHaveProperty("step");
  });

  it("doi body asks for the cumulative curves", () => {
    expect(doiRequestBody(configured())).toMatchObject({ curves: true });
  });
});

describe("session serialization", () => {
  it("round-trips to identical request bodies (replay invariant)", () => {
    let s = configured();
    s = editLayer(s, 1, "sigma", 2.0);
    s = applyDraft(s);
    s = setSweep(s, { axis: "frequency", start: 30, stop: 93000 });
    const restored = restoreSession(serializeSession(s));
    expect(sweepRequestBody(restored)).toEqual(sweepRequestBody(s));
    expect(diagnosticsRequestBody(restored))
      .toEqual(diagnosticsRequestBody(s));
    expect(doiRequestBody(restored)).toEqual(doiRequestBody(s));
    expect(restored.dirty).toBe(s.dirty);
  });

  it("rejects unknown versions", () => {
    expect(() => restoreSession('{"version": 99, "state": {}}'))
      .toThrow(/version/);
  });
});

import { describe, expect, it } from "vitest";

import { betaSeries, extent, linearScale, logScale, logTicks, markers,
         polylinePath, responseSeries, ticks } from "../src/charts.js";
import type { ResponseTable, SkinBetaTable } from "../src/types.js";

const COLUMNS = ["orientation", "spacing_m", "frequency_Hz", "height_m",
                 "Q_raw", "P_raw", "Q_mS_per_m", "P_device_unit"];

function heightSweepTable(): ResponseTable {
  const rows: (string | number)[][] = [];
  for (const h of [0.0, 0.5, 1.0]) {
    for (const rho of [0.5, 2.0]) {
      rows.push(["HCP", rho, 9000, h, 1e-4 * rho + h * 1e-6, -2e-5,
                 17.0 * rho - h, -0.02]);
    }
  }
  return { columns: COLUMNS, p_unit: "ppt", rows };
}

describe("responseSeries", () => {
  it("groups one series per configuration with x along the sweep", () => {
    const series = responseSeries(heightSweepTable(), "height", "Q", "mS/m");
    expect(series).toHaveLength(2);
    expect(series[0].label).toContain("HCP 0.5 m");
    expect(series[0].x).toEqual([0.0, 0.5, 1.0]);
    // mS/m devices chart the apparent-conductivity column verbatim
    expect(series[1].y).toEqual([34.0, 33.5, 33.0]);
  });

  it("ppm devices chart Q_raw scaled to ppm and P as delivered", () => {
    const table = heightSweepTable();
    table.p_unit = "ppm";
    const q = responseSeries(table, "height", "Q", "ppm");
    expect(q[0].y[0]).toBeCloseTo(1e-4 * 0.5 * 1e6, 10);
    const p = responseSeries(table, "height", "P", "ppm");
    expect(p[0].y[0]).toBe(-0.02);
  });

  it("frequency sweeps key the series by height instead", () => {
    const rows: (string | number)[][] = [];
    for (const f of [1000, 10000]) {
      for (const h of [0.2, 0.9]) {
        rows.push(["HCP", 1.66, f, h, 1e-5, -1e-6, 1.0, -1.0]);
      }
    }
    const series = responseSeries({ columns: COLUMNS, p_unit: "ppm", rows },
                                  "frequency", "Q", "ppm");
    expect(series).toHaveLength(2);
    expect(series.map((s) => s.label)).toEqual(
      ["HCP 1.66 m h=0.2 m", "HCP 1.66 m h=0.9 m"]);
    expect(series[0].x).toEqual([1000, 10000]);
  });
});

describe("markers", () => {
  it("picks the sample nearest the operating height", () => {
    const series = responseSeries(heightSweepTable(), "height", "Q", "mS/m");
    const m = markers(series, 0.6);
    expect(m).toHaveLength(2);
    expect(m[0].x).toBe(0.5);
  });
});

describe("betaSeries", () => {
  it("extracts frequency/beta pairs per configuration", () => {
    const table: SkinBetaTable = {
      columns: ["orientation", "spacing_m", "frequency_Hz", "height_m",
                "delta_m", "beta"],
      rows: [["HCP", 1.66, 1000, 0.9, 100.0, 0.0166],
             ["HCP", 1.66, 10000, 0.9, 30.0, 0.055]],
    };
    const series = betaSeries(table);
    expect(series).toHaveLength(1);
    expect(series[0].x).toEqual([1000, 10000]);
    expect(series[0].y).toEqual([0.0166, 0.055]);
  });
});

describe("svg scaffolding", () => {
  it("scales and paths are consistent", () => {
    const sx = linearScale([0, 10], [0, 100]);
    expect(sx(5)).toBe(50);
    const sy = logScale([1, 100], [0, 100]);
    expect(sy(10)).toBeCloseTo(50);
    expect(polylinePath([0, 10], [1, 100], sx, sy))
      .toBe("M0.00,0.00 L100.00,100.00");
  });

  it("extent handles degenerate input", () => {
    expect(extent([])).toEqual([0, 1]);
    expect(extent([3, 3])).toEqual([2, 4]);
    expect(extent([1, NaN, 5])).toEqual([1, 5]);
  });

  it("tick helpers produce round values inside the domain", () => {
    const t = ticks([0, 3]);
    expect(t[0]).toBeGreaterThanOrEqual(0);
    expect(t[t.length - 1]).toBeLessThanOrEqual(3);
    expect(logTicks([30, 93000])).toEqual([100, 1000, 10000]);
  });
});

// Pure chart assembly: service payload rows -> per-configuration series
// -> SVG path strings.  No numerical post-processing beyond picking the
// column that carries the requested unit.

import type { ResponseTable, SkinBetaTable } from "./types.js";

export interface Series {
  label: string;
  x: number[];
  y: number[];
}

export interface Marker {
  label: string;
  x: number;
  y: number;
}

const COL = {
  orientation: 0, spacing: 1, frequency: 2, height: 3,
  q_raw: 4, p_raw: 5, q_msm: 6, p_device: 7,
};

function pick(row: (string | number)[], component: "Q" | "P",
              qUnit: string): number {
  if (component === "P") return row[COL.p_device] as number;
  if (qUnit === "ppm") return 1e6 * (row[COL.q_raw] as number);
  return row[COL.q_msm] as number;
}

/** One series per device configuration, x along the swept axis. */
export function responseSeries(table: ResponseTable,
                               axis: "height" | "frequency",
                               component: "Q" | "P",
                               qUnit: string): Series[] {
  const xcol = axis === "height" ? COL.height : COL.frequency;
  const keyOf = (row: (string | number)[]) => {
    const parts = [row[COL.orientation], `${row[COL.spacing]} m`];
    if (axis === "height") parts.push(`${row[COL.frequency]} Hz`);
    else parts.push(`h=${row[COL.height]} m`);
    return parts.join(" ");
  };
  const series = new Map<string, Series>();
  for (const row of table.rows) {
    const key = keyOf(row);
    let s = series.get(key);
    if (!s) {
      s = { label: key, x: [], y: [] };
      series.set(key, s);
    }
    s.x.push(row[xcol] as number);
    s.y.push(pick(row, component, qUnit));
  }
  return [...series.values()];
}

/** Sample nearest the operating height, one marker per series. */
export function markers(series: Series[], x0: number): Marker[] {
  return series
    .filter((s) => s.x.length > 0)
    .map((s) => {
      let best = 0;
      for (let i = 1; i < s.x.length; i++) {
        if (Math.abs(s.x[i] - x0) < Math.abs(s.x[best] - x0)) best = i;
      }
      return { label: s.label, x: s.x[best], y: s.y[best] };
    });
}

/** Induction-number-vs-frequency series from the skin/beta table. */
export function betaSeries(table: SkinBetaTable): Series[] {
  const columns = table.columns;
  const fcol = columns.indexOf("frequency_Hz");
  const bcol = columns.indexOf("beta");
  const ocol = columns.indexOf("orientation");
  const rcol = columns.indexOf("spacing_m");
  const series = new Map<string, Series>();
  for (const row of table.rows) {
    const key = `${row[ocol]} ${row[rcol]} m`;
    let s = series.get(key);
    if (!s) {
      s = { label: key, x: [], y: [] };
      series.set(key, s);
    }
    s.x.push(row[fcol] as number);
    s.y.push(row[bcol] as number);
  }
  return [...series.values()];
}

// ---------------------------------------------------------------------------
// SVG scaffolding
// ---------------------------------------------------------------------------

export interface Box {
  width: number;
  height: number;
  pad: number;
}

export interface Scale {
  (value: number): number;
}

export function extent(values: number[]): [number, number] {
  let lo = Infinity;
  let hi = -Infinity;
  for (const v of values) {
    if (Number.isFinite(v)) {
      lo = Math.min(lo, v);
      hi = Math.max(hi, v);
    }
  }
  if (lo === Infinity) return [0, 1];
  if (lo === hi) return [lo - 1, hi + 1];
  return [lo, hi];
}

export function linearScale(domain: [number, number],
                            range: [number, number]): Scale {
  const [d0, d1] = domain;
  const [r0, r1] = range;
  return (v) => r0 + ((v - d0) / (d1 - d0)) * (r1 - r0);
}

export function logScale(domain: [number, number],
                         range: [number, number]): Scale {
  const d0 = Math.log10(domain[0]);
  const d1 = Math.log10(domain[1]);
  const [r0, r1] = range;
  return (v) => r0 + ((Math.log10(v) - d0) / (d1 - d0)) * (r1 - r0);
}

export function polylinePath(xs: number[], ys: number[], sx: Scale,
                             sy: Scale): string {
  const parts: string[] = [];
  for (let i = 0; i < xs.length; i++) {
    const cmd = i === 0 ? "M" : "L";
    parts.push(`${cmd}${sx(xs[i]).toFixed(2)},${sy(ys[i]).toFixed(2)}`);
  }
  return parts.join(" ");
}

export function ticks(domain: [number, number], count = 5): number[] {
  const [lo, hi] = domain;
  const raw = (hi - lo) / Math.max(count, 1);
  const mag = 10 ** Math.floor(Math.log10(raw));
  const step = [1, 2, 5, 10].map((m) => m * mag)
    .find((s) => (hi - lo) / s <= count) ?? mag * 10;
  const first = Math.ceil(lo / step) * step;
  const out: number[] = [];
  for (let v = first; v <= hi + 1e-12; v += step) out.push(+v.toPrecision(12));
  return out;
}

export function logTicks(domain: [number, number]): number[] {
  const lo = Math.ceil(Math.log10(domain[0]));
  const hi = Math.floor(Math.log10(domain[1]));
  const out: number[] = [];
  for (let e = lo; e <= hi; e++) out.push(10 ** e);
  return out;
}

// Shapes of the service payloads; the UI is a pure presenter of these.

export interface LayeredModel {
  sigma_S_per_m: number[];
  mu_r: number[];
  thickness_m: number[];
}

export interface DeviceRow {
  orientation: string;
  spacings_m: number[];
  frequency_Hz?: number;
  frequency_range_Hz?: [number, number];
}

export interface DeviceEntry {
  manufacturer: string;
  name: string;
  rows: DeviceRow[];
  q_unit: string;
  p_unit: string;
  default_frequencies_Hz?: number[];
  seed?: boolean;
}

/** Rows of the response tables emitted by /forward and /sweep; column
 * order matches the `columns` field:
 * orientation, spacing_m, frequency_Hz, height_m, Q_raw, P_raw,
 * Q_mS_per_m, P_device_unit. */
export interface ResponseTable {
  columns: string[];
  p_unit: string;
  rows: (string | number)[][];
}

export interface SkinBetaTable {
  columns: string[];
  rows: (string | number)[][];
}

export interface DoiRow {
  orientation: string;
  spacing_m: number;
  frequency_Hz: number;
  height_m: number;
  doi_m: number | null;
  tau: number;
  reached: boolean;
  max_cumulative: number;
  depths_m?: number[];
  cumulative?: number[];
}

export interface SensitivityTable {
  columns: string[];
  rows: number[][];
}

export interface SweepSettings {
  axis: "height" | "frequency";
  start: number;
  stop: number;
  step: number;    // height axis
  points: number;  // frequency axis
}

// Typed client over the JSON service.  Every number the UI displays is
// fetched through these calls; nothing is recomputed client-side.

import type { DeviceEntry, DoiRow, ResponseTable, SensitivityTable,
              SkinBetaTable } from "./types.js";

export class ApiError extends Error {
  constructor(public status: number, message: string) {
    super(message);
  }
}

async function parseError(resp: Response): Promise<never> {
  let detail = resp.statusText;
  try {
    const body = await resp.json();
    detail = body.detail ?? body.error?.message ?? detail;
  } catch {
    // keep the status text
  }
  throw new ApiError(resp.status, detail);
}

export class ApiClient {
  constructor(public base: string = "") {}

  private async postJson<T>(path: string,
                            body: Record<string, unknown>): Promise<T> {
    const resp = await fetch(this.base + path, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(body),
    });
    if (!resp.ok) await parseError(resp);
    return resp.json() as Promise<T>;
  }

  async devices(): Promise<DeviceEntry[]> {
    const resp = await fetch(this.base + "/devices");
    if (!resp.ok) await parseError(resp);
    const body = await resp.json();
    return body.devices as DeviceEntry[];
  }

  sweep(body: Record<string, unknown>): Promise<ResponseTable> {
    return this.postJson<ResponseTable>("/sweep", body);
  }

  /** CSV export straight from the service: identical bytes to the CLI's
   * output for the same request (single code path). */
  async sweepCsv(body: Record<string, unknown>): Promise<string> {
    const resp = await fetch(this.base + "/sweep", {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify({ ...body, format: "csv" }),
    });
    if (!resp.ok) await parseError(resp);
    return resp.text();
  }

  forward(body: Record<string, unknown>): Promise<ResponseTable> {
    return this.postJson<ResponseTable>("/forward", body);
  }

  diagnostics(body: Record<string, unknown>): Promise<SkinBetaTable> {
    return this.postJson<SkinBetaTable>("/diagnostics", body);
  }

  sensitivity(body: Record<string, unknown>): Promise<SensitivityTable> {
    return this.postJson<SensitivityTable>("/diagnostics", body);
  }

  async doi(body: Record<string, unknown>): Promise<DoiRow[]> {
    const out = await this.postJson<{ rows: DoiRow[] }>("/doi", body);
    return out.rows;
  }
}

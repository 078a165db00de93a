// DOM wiring: one SessionState drives the panels; every number shown is
// fetched from the service.  In-flight requests carry a sequence token;
// stale responses are discarded (latest edit wins).

import { ApiClient, ApiError } from "./api.js";
import { betaSeries, extent, linearScale, logScale, logTicks, markers,
         polylinePath, responseSeries, ticks, type Series } from "./charts.js";
import { applyDraft, addLayer, diagnosticsRequestBody, doiRequestBody,
         editLayer, newSession, removeLayer, restoreSession, selectDevice,
         serializeSession, setHeight, setSweep, sweepRequestBody,
         type SessionState } from "./session.js";
import type { DeviceEntry } from "./types.js";
import { validateModel } from "./validate.js";

// service base: same-origin by default, overridable for split-origin
// dev setups via ?service=http://host:port
const serviceBase = typeof location !== "undefined"
  ? new URLSearchParams(location.search).get("service") ?? ""
  : "";
const api = new ApiClient(serviceBase);
let session: SessionState = newSession();
let devices: DeviceEntry[] = [];
let requestToken = 0;

const PALETTE = ["#0b6e99", "#c2562c", "#3a8f4d", "#8352a3", "#b4852a",
                 "#647486", "#a53860", "#2a9d8f"];

function el<K extends keyof HTMLElementTagNameMap>(
    tag: K, attrs: Record<string, string> = {},
    ...children: (Node | string)[]): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  for (const [k, v] of Object.entries(attrs)) node.setAttribute(k, v);
  node.append(...children);
  return node;
}

function banner(message: string, retry?: () => void) {
  const box = document.getElementById("banner")!;
  box.textContent = "";
  if (!message) return;
  box.append(el("span", {}, message));
  if (retry) {
    const btn = el("button", {}, "retry");
    btn.addEventListener("click", () => retry());
    box.append(" ", btn);
  }
}

// ---------------------------------------------------------------------------
// SVG chart rendering
// ---------------------------------------------------------------------------

function svgChart(series: Series[], opts: {
  xLog?: boolean; title: string; xLabel: string; yLabel: string;
  markerX?: number; hline?: number;
}): SVGSVGElement {
  const W = 460, H = 280, P = 44;
  const svg = document.createElementNS("http://www.w3.org/2000/svg", "svg");
  svg.setAttribute("viewBox", `0 0 ${W} ${H}`);
  svg.setAttribute("class", "chart");
  const xs = series.flatMap((s) => s.x);
  const ys = series.flatMap((s) => s.y);
  if (opts.hline !== undefined) ys.push(opts.hline);
  const xd = extent(xs);
  const yd = extent(ys);
  const sx = opts.xLog ? logScale(xd, [P, W - 8]) : linearScale(xd, [P, W - 8]);
  const sy = linearScale(yd, [H - P, 10]);

  const mk = (tag: string, attrs: Record<string, string>, text?: string) => {
    const node = document.createElementNS("http://www.w3.org/2000/svg", tag);
    for (const [k, v] of Object.entries(attrs)) node.setAttribute(k, v);
    if (text) node.textContent = text;
    svg.append(node);
    return node;
  };

  for (const t of opts.xLog ? logTicks(xd) : ticks(xd)) {
    const x = sx(t);
    mk("line", { x1: `${x}`, y1: `${H - P}`, x2: `${x}`, y2: `${H - P + 4}`,
                 stroke: "#888" });
    mk("text", { x: `${x}`, y: `${H - P + 15}`, "text-anchor": "middle",
                 "font-size": "9" }, String(t));
  }
  for (const t of ticks(yd)) {
    const y = sy(t);
    mk("line", { x1: `${P - 4}`, y1: `${y}`, x2: `${P}`, y2: `${y}`,
                 stroke: "#888" });
    mk("text", { x: `${P - 6}`, y: `${y + 3}`, "text-anchor": "end",
                 "font-size": "9" }, t.toPrecision(3).replace(/\.?0+$/, ""));
  }
  mk("rect", { x: `${P}`, y: "10", width: `${W - 8 - P}`,
               height: `${H - P - 10}`, fill: "none", stroke: "#bbb" });
  mk("text", { x: `${W / 2}`, y: `${H - 6}`, "text-anchor": "middle",
               "font-size": "10" }, opts.xLabel);
  mk("text", { x: "12", y: `${H / 2}`, "font-size": "10",
               transform: `rotate(-90 12 ${H / 2})`,
               "text-anchor": "middle" }, opts.yLabel);
  mk("text", { x: `${W / 2}`, y: "10", "text-anchor": "middle",
               "font-size": "11", "font-weight": "bold" }, opts.title);

  if (opts.hline !== undefined) {
    mk("line", { x1: `${P}`, y1: `${sy(opts.hline)}`, x2: `${W - 8}`,
                 y2: `${sy(opts.hline)}`, stroke: "#555",
                 "stroke-dasharray": "5 3" });
  }
  series.forEach((s, i) => {
    mk("path", { d: polylinePath(s.x, s.y, sx, sy), fill: "none",
                 stroke: PALETTE[i % PALETTE.length], "stroke-width": "1.5" });
  });
  if (opts.markerX !== undefined) {
    for (const [i, m] of markers(series, opts.markerX).entries()) {
      mk("circle", { cx: `${sx(m.x)}`, cy: `${sy(m.y)}`, r: "3.2",
                     fill: PALETTE[i % PALETTE.length] });
    }
  }
  const legend = el("div", { class: "legend" });
  series.forEach((s, i) => {
    legend.append(el("span", { style: `color:${PALETTE[i % PALETTE.length]}` },
                     `— ${s.label} `));
  });
  const wrap = document.createElementNS("http://www.w3.org/2000/svg",
                                        "foreignObject");
  void wrap;  // legend rendered outside the svg by the caller
  (svg as unknown as { legend?: HTMLElement }).legend = legend;
  return svg;
}

// ---------------------------------------------------------------------------
// Panels
// ---------------------------------------------------------------------------

function renderModelEditor() {
  const host = document.getElementById("model-editor")!;
  host.textContent = "";
  const issues = validateModel(session.draft);
  const table = el("table", { class: "layers" });
  table.append(el("tr", {},
    el("th", {}, "#"), el("th", {}, "sigma (S/m)"), el("th", {}, "mu_r"),
    el("th", {}, "thickness (m)"), el("th", {}, "")));
  const n = session.draft.sigma_S_per_m.length;
  for (let i = 0; i < n; i++) {
    const row = el("tr");
    row.append(el("td", {}, String(i + 1)));
    for (const [field, value] of [
      ["sigma", session.draft.sigma_S_per_m[i]],
      ["mu_r", session.draft.mu_r[i]],
      ["thickness", i < n - 1 ? session.draft.thickness_m[i] : NaN],
    ] as const) {
      const cell = el("td");
      if (field === "thickness" && i === n - 1) {
        cell.append("(half-space)");
      } else {
        const input = el("input", { type: "number", step: "any",
                                    value: String(value) });
        const bad = issues.find((p) => p.field === field && p.index === i);
        if (bad) {
          input.classList.add("invalid");
          input.title = bad.message;
        }
        input.addEventListener("change", () => {
          session = editLayer(session, i, field, Number(input.value));
          renderModelEditor();
        });
        cell.append(input);
      }
      row.append(cell);
    }
    const rm = el("button", {}, "x");
    rm.addEventListener("click", () => {
      session = removeLayer(session, i);
      renderModelEditor();
    });
    row.append(el("td", {}, rm));
    table.append(row);
  }
  host.append(table);
  const structural = issues.filter((p) => p.index === null);
  for (const p of structural) {
    host.append(el("div", { class: "issue" }, p.message));
  }
  const add = el("button", {}, "add layer");
  add.addEventListener("click", () => {
    session = addLayer(session);
    renderModelEditor();
  });
  const apply = el("button", { class: "primary" },
                   session.dirty ? "apply draft" : "applied");
  apply.addEventListener("click", () => {
    if (validateModel(session.draft).length) {
      banner("fix the flagged model fields first");
      return;
    }
    session = applyDraft(session);
    banner("");
    renderModelEditor();
    void refreshAll();
  });
  const save = el("button", {}, "save session");
  save.addEventListener("click", () => {
    const blob = new Blob([serializeSession(session)],
                          { type: "application/json" });
    const a = el("a", { href: URL.createObjectURL(blob),
                        download: "session.json" });
    a.click();
  });
  const load = el("input", { type: "file", accept: ".json" });
  load.addEventListener("change", async () => {
    const file = load.files?.[0];
    if (!file) return;
    session = restoreSession(await file.text());
    renderAllControls();
    void refreshAll();
  });
  host.append(el("div", { class: "row" }, add, apply, save, load));
}

function renderDevicePanel() {
  const host = document.getElementById("device-panel")!;
  host.textContent = "";
  const select = el("select");
  select.append(el("option", { value: "" }, "select device"));
  for (const d of devices) {
    const opt = el("option", { value: d.name },
                   `${d.manufacturer} ${d.name}`);
    if (d.name === session.device) opt.setAttribute("selected", "selected");
    select.append(opt);
  }
  select.addEventListener("change", () => {
    session = selectDevice(session, select.value || "");
    renderDevicePanel();
    void refreshAll();
  });
  const height = el("input", { type: "number", step: "0.05",
                               value: String(session.height) });
  height.addEventListener("change", () => {
    session = setHeight(session, Number(height.value));
    void refreshAll();
  });
  const axis = el("select");
  for (const a of ["height", "frequency"]) {
    const opt = el("option", { value: a }, `${a} sweep`);
    if (a === session.sweep.axis) opt.setAttribute("selected", "selected");
    axis.append(opt);
  }
  axis.addEventListener("change", () => {
    const isFreq = axis.value === "frequency";
    session = setSweep(session, isFreq
      ? { axis: "frequency", start: 30, stop: 93000 }
      : { axis: "height", start: 0, stop: 3 });
    void refreshAll();
  });
  host.append(
    el("div", { class: "row" }, el("label", {}, "device "), select),
    el("div", { class: "row" }, el("label", {}, "operating height (m) "),
       height),
    el("div", { class: "row" }, axis),
  );
  const entry = devices.find((d) => d.name === session.device);
  if (entry) {
    const info = entry.rows.map((r) => {
      const f = r.frequency_Hz !== undefined
        ? `${r.frequency_Hz} Hz`
        : `${r.frequency_range_Hz![0]}-${r.frequency_range_Hz![1]} Hz`;
      return `${r.orientation}: ${r.spacings_m.join(", ")} m @ ${f}`;
    }).join(" | ");
    host.append(el("div", { class: "hint" },
                   `${info} — Q in ${entry.q_unit}, P in ${entry.p_unit}`));
  }
}

function chartInto(hostId: string, series: Series[],
                   opts: Parameters<typeof svgChart>[1]) {
  const host = document.getElementById(hostId)!;
  host.textContent = "";
  if (!series.length) return;
  const svg = svgChart(series, opts);
  host.append(svg);
  const legend = (svg as unknown as { legend?: HTMLElement }).legend;
  if (legend) host.append(legend);
}

async function refreshResponses(token: number) {
  const body = sweepRequestBody(session);
  const host = document.getElementById("response-panel")!;
  if (!body) {
    host.classList.add("empty");
    return;
  }
  host.classList.remove("empty");
  const entry = devices.find((d) => d.name === session.device)!;
  const table = await api.sweep(body);
  if (token !== requestToken) return; // stale
  const axis = session.sweep.axis;
  const qSeries = responseSeries(table, axis, "Q", entry.q_unit);
  const pSeries = responseSeries(table, axis, "P", entry.q_unit);
  const xLabel = axis === "height" ? "height (m)" : "frequency (Hz)";
  const markerX = axis === "height" ? session.height : undefined;
  chartInto("chart-q", qSeries, {
    title: `Quadrature (${entry.q_unit})`, xLabel,
    yLabel: `Q (${entry.q_unit})`, xLog: axis === "frequency", markerX,
  });
  chartInto("chart-p", pSeries, {
    title: `In-phase (${entry.p_unit})`, xLabel,
    yLabel: `P (${entry.p_unit})`, xLog: axis === "frequency", markerX,
  });
  const exportBtn = document.getElementById("export-csv")!;
  exportBtn.onclick = async () => {
    const csv = await api.sweepCsv(body);
    const blob = new Blob([csv], { type: "text/csv" });
    const a = el("a", { href: URL.createObjectURL(blob),
                        download: "sweep.csv" });
    a.click();
  };
}

async function refreshDiagnostics(token: number) {
  const body = diagnosticsRequestBody(session);
  if (!body) return;
  const table = await api.diagnostics(body);
  if (token !== requestToken) return;
  const host = document.getElementById("diag-table")!;
  host.textContent = "";
  const t = el("table", { class: "diag" });
  t.append(el("tr", {}, ...table.columns.map((c) => el("th", {}, c))));
  for (const row of table.rows) {
    t.append(el("tr", {}, ...row.map((v, i) => el(
      "td", {},
      typeof v === "number" && table.columns[i] === "delta_m"
        ? v.toFixed(1)
        : typeof v === "number" && table.columns[i] === "beta"
          ? v.toFixed(3) : String(v)))));
  }
  host.append(t);
  const entry = devices.find((d) => d.name === session.device);
  if (entry?.rows.some((r) => r.frequency_range_Hz)) {
    // induction numbers across the whole frequency band, 0.02 threshold
    const range = entry.rows[0].frequency_range_Hz!;
    const freqs: number[] = [];
    for (let i = 0; i < 41; i++) {
      freqs.push(range[0] * (range[1] / range[0]) ** (i / 40));
    }
    const wide = await api.diagnostics({ ...body, frequencies: freqs });
    if (token !== requestToken) return;
    chartInto("chart-beta", betaSeries(wide), {
      title: "Induction number", xLabel: "frequency (Hz)", yLabel: "beta",
      xLog: true, hline: 0.02,
    });
  } else {
    document.getElementById("chart-beta")!.textContent = "";
  }
}

async function refreshDoi(token: number) {
  const body = doiRequestBody(session);
  if (!body) return;
  const rows = await api.doi(body);
  if (token !== requestToken) return;
  const host = document.getElementById("doi-table")!;
  host.textContent = "";
  const t = el("table", { class: "diag" });
  t.append(el("tr", {},
    el("th", {}, "configuration"), el("th", {}, "DOI (m)"),
    el("th", {}, "tau")));
  for (const r of rows) {
    t.append(el("tr", {},
      el("td", {}, `${r.orientation} ${r.spacing_m} m @ ${r.frequency_Hz} Hz`),
      el("td", {}, r.reached && r.doi_m !== null
        ? r.doi_m.toFixed(1)
        : `not reached (max ${r.max_cumulative.toFixed(3)})`),
      el("td", {}, r.tau.toFixed(4))));
  }
  host.append(t);
  const curves: Series[] = rows
    .filter((r) => r.depths_m && r.cumulative)
    .map((r) => ({
      label: `${r.orientation} ${r.spacing_m} m @ ${r.frequency_Hz} Hz`,
      x: r.depths_m!, y: r.cumulative!,
    }));
  chartInto("chart-doi", curves, {
    title: "Cumulative sensitivity", xLabel: "depth (m)",
    yLabel: "fraction", hline: rows[0]?.tau,
  });
}

async function refreshAll() {
  const token = ++requestToken;
  banner("");
  try {
    await Promise.all([refreshResponses(token), refreshDiagnostics(token),
                       refreshDoi(token)]);
  } catch (err) {
    if (err instanceof ApiError) {
      banner(`service error ${err.status}: ${err.message}`,
             () => void refreshAll());
    } else {
      banner(`request failed: ${String(err)}`, () => void refreshAll());
    }
  }
}

function renderAllControls() {
  renderModelEditor();
  renderDevicePanel();
}

export async function start() {
  try {
    devices = await api.devices();
  } catch (err) {
    banner(`cannot reach the service: ${String(err)}`, () => void start());
    return;
  }
  renderAllControls();
}

if (typeof document !== "undefined" && document.getElementById("app")) {
  void start();
}

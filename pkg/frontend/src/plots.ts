import {
  BoundsRow,
  Report,
  findReport,
  loadBounds,
  loadReports,
  loadRunConstants,
  loadTrajectory,
} from "./schema.js";
import { SchemaError } from "./csv.js";
import { Chart, padDomain } from "./svg.js";

export type PlotKind = "decay" | "envelope" | "absorbing" | "contraction";

export interface RenderResult {
  svg: string;
  /** Integrated area where measured exceeds predicted (envelope kind only). */
  violationArea?: number;
}

const num = (v: unknown): number | null =>
  typeof v === "number" && Number.isFinite(v) ? v : null;

/** Provenance caption: the run's constants echo (alpha, f1, Gamma, beta, ...). */
function constantsCaption(src: Record<string, unknown>, extra = ""): string {
  const parts: string[] = [];
  const push = (label: string, key: string) => {
    const v = num(src[key]);
    if (v !== null) parts.push(`${label}=${Number(v.toPrecision(6))}`);
  };
  push("alpha", "alpha");
  push("f1", "f1_norm");
  push("Gamma", "Gamma");
  push("beta", "beta");
  push("C2", "C2");
  const joined = parts.join("  ");
  return extra ? `${joined}  ${extra}` : joined;
}

export function renderDecay(inDir: string): RenderResult {
  const rows = loadTrajectory(inDir);
  if (rows.length === 0) throw new SchemaError("trajectory.csv: no samples");
  const constants = loadRunConstants(inDir);
  const tMax = rows[rows.length - 1].t;
  const norms = rows.map((r) => r.normH);
  const chart = new Chart({
    title: "State norm decay with jump markers",
    caption: constantsCaption(constants, `samples=${rows.length}`),
    xLabel: "t",
    yLabel: "|u(t)|_H",
    xDomain: [rows[0].t, tMax],
    yDomain: padDomain(Math.min(...norms, 0), Math.max(...norms)),
  });
  // continuous stretches split at jump rows (left limit followed by the
  // post-jump sample at the same time)
  let segment: [number, number][] = [];
  for (let i = 0; i < rows.length; i++) {
    const r = rows[i];
    segment.push([r.t, r.normH]);
    const next = rows[i + 1];
    if (next && next.t === r.t && r.isImpulse) {
      chart.line(segment, "#1f77b4", { width: 1.8 });
      chart.line([[r.t, r.normH], [next.t, next.normH]], "#d62728", {
        dash: "3,3",
        width: 1.4,
      });
      chart.marker(r.t, r.normH, "#d62728", 2.6);
      chart.marker(next.t, next.normH, "#d62728", 2.6);
      segment = [];
    }
  }
  chart.line(segment, "#1f77b4", { width: 1.8, label: "|u|_H" });
  return { svg: chart.toString() };
}

function envelopeRows(inDir: string): BoundsRow[] {
  const rows = loadBounds(inDir).filter(
    (r) => r.theoremId === "energy_envelope" && r.series === 0,
  );
  if (rows.length === 0) {
    throw new SchemaError("bounds.csv: no energy_envelope rows");
  }
  return rows.sort((a, b) => a.t - b.t);
}

/** Trapezoid integral of max(0, measured - predicted) over the sample grid. */
export function violationArea(rows: { t: number; measured: number; predicted: number }[]): number {
  let area = 0;
  for (let i = 1; i < rows.length; i++) {
    const dt = rows[i].t - rows[i - 1].t;
    const a = Math.max(0, rows[i - 1].measured - rows[i - 1].predicted);
    const b = Math.max(0, rows[i].measured - rows[i].predicted);
    area += 0.5 * (a + b) * dt;
  }
  return area;
}

export function renderEnvelope(inDir: string): RenderResult {
  const rows = envelopeRows(inDir);
  const report = findReport(loadReports(inDir), "energy_envelope");
  const area = violationArea(rows);
  const ys = rows.flatMap((r) => [r.measured, r.predicted]);
  const chart = new Chart({
    title: "Measured norm vs predicted envelope",
    caption: constantsCaption(
      report.params,
      `verdict=${report.verdict}  max_violation=${report.max_violation.toExponential(2)}  violation_area=${area.toExponential(2)}`,
    ),
    xLabel: "t",
    yLabel: "|u(t)|_H",
    xDomain: [rows[0].t, rows[rows.length - 1].t],
    yDomain: padDomain(0, Math.max(...ys)),
  });
  // shade stretches where the measured curve pokes above the bound
  let upper: [number, number][] = [];
  let lower: [number, number][] = [];
  const flush = () => {
    if (upper.length > 1) chart.region(upper, lower, "rgba(214,39,40,0.35)");
    upper = [];
    lower = [];
  };
  for (const r of rows) {
    if (r.measured > r.predicted) {
      upper.push([r.t, r.measured]);
      lower.push([r.t, r.predicted]);
    } else {
      flush();
    }
  }
  flush();
  chart.line(rows.map((r) => [r.t, r.predicted] as [number, number]), "#2ca02c", {
    dash: "6,3",
    label: "predicted bound",
  });
  chart.line(rows.map((r) => [r.t, r.measured] as [number, number]), "#1f77b4", {
    label: "measured",
  });
  return { svg: chart.toString(), violationArea: area };
}

export function renderAbsorbing(inDir: string): RenderResult {
  const rows = loadTrajectory(inDir);
  const report = findReport(loadReports(inDir), "absorbing_set");
  const radius = num(report.params.radius);
  const entry = num(report.params.entry_time);
  if (radius === null || entry === null) {
    throw new SchemaError(
      "reports.json: absorbing_set params must carry radius and entry_time",
    );
  }
  const norms = rows.map((r) => r.normH);
  const chart = new Chart({
    title: "Absorbing-set entry",
    caption: constantsCaption(
      report.params,
      `radius=${Number(radius.toPrecision(6))}  entry_time=${Number(entry.toPrecision(6))}  verdict=${report.verdict}`,
    ),
    xLabel: "t",
    yLabel: "|u(t)|_H",
    xDomain: [rows[0].t, rows[rows.length - 1].t],
    yDomain: padDomain(0, Math.max(...norms, radius * 1.1)),
  });
  chart.line(rows.map((r) => [r.t, r.normH] as [number, number]), "#1f77b4", {
    label: "|u|_H",
  });
  chart.hline(radius, "#2ca02c", "ball radius");
  chart.vline(entry, "#9467bd", "entry time");
  return { svg: chart.toString() };
}

export function renderContraction(inDir: string): RenderResult {
  const all = loadBounds(inDir).filter(
    (r) => r.theoremId === "two_solution_contraction",
  );
  if (all.length === 0) {
    throw new SchemaError("bounds.csv: no two_solution_contraction rows");
  }
  const reports = loadReports(inDir).filter(
    (r) => r.theorem_id === "two_solution_contraction",
  );
  const params = reports.length > 0 ? reports[0].params : {};
  const seriesIds = [...new Set(all.map((r) => r.series))].sort((a, b) => a - b);
  const positives = all
    .flatMap((r) => [r.measured, r.predicted])
    .filter((v) => v > 0);
  if (positives.length === 0) {
    throw new SchemaError("bounds.csv: contraction gaps are all zero");
  }
  const yMin = Math.min(...positives);
  const yMax = Math.max(...positives);
  const tMax = Math.max(...all.map((r) => r.t));
  const chart = new Chart({
    title: "Two-solution gap vs contraction bound (log scale)",
    caption: constantsCaption(params, `pairs=${seriesIds.length}`),
    xLabel: "t",
    yLabel: "|u1(t) - u2(t)|_H",
    xDomain: [0, tMax],
    yDomain: [yMin * 0.8, yMax * 1.25],
    yLog: true,
  });
  const palette = ["#1f77b4", "#ff7f0e", "#2ca02c", "#9467bd", "#8c564b",
                   "#e377c2", "#7f7f7f", "#bcbd22", "#17becf", "#d62728"];
  for (const s of seriesIds) {
    const rows = all.filter((r) => r.series === s).sort((a, b) => a.t - b.t);
    const color = palette[s % palette.length];
    const first = s === seriesIds[0];
    chart.line(
      rows.filter((r) => r.measured > 0).map((r) => [r.t, r.measured] as [number, number]),
      color,
      { label: first ? "measured gap" : undefined },
    );
    chart.line(
      rows.filter((r) => r.predicted > 0).map((r) => [r.t, r.predicted] as [number, number]),
      color,
      { dash: "5,3", width: 1.1, label: first ? "bound" : undefined },
    );
  }
  return { svg: chart.toString() };
}

export function render(kind: PlotKind, inDir: string): RenderResult {
  switch (kind) {
    case "decay":
      return renderDecay(inDir);
    case "envelope":
      return renderEnvelope(inDir);
    case "absorbing":
      return renderAbsorbing(inDir);
    case "contraction":
      return renderContraction(inDir);
    default:
      throw new SchemaError(`unknown plot kind ${kind as string}`);
  }
}

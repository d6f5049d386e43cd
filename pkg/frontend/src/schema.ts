import { existsSync, readFileSync } from "node:fs";
import { join } from "node:path";

import { SchemaError, readCsv, requireColumns, toNumber } from "./csv.js";

export interface TrajectoryRow {
  t: number;
  normH: number;
  normV: number;
  isImpulse: boolean;
}

export interface BoundsRow {
  theoremId: string;
  series: number;
  t: number;
  measured: number;
  predicted: number;
}

export interface Report {
  theorem_id: string;
  verdict: string;
  max_violation: number;
  tolerance: number;
  predicted: number[];
  measured: number[];
  t: number[] | null;
  params: Record<string, unknown>;
  note: string;
}

export function loadTrajectory(dir: string): TrajectoryRow[] {
  const path = join(dir, "trajectory.csv");
  const table = readCsv(path);
  const col = requireColumns(table, ["t", "norm_H", "norm_V", "is_impulse"], path);
  return table.rows.map((r) => ({
    t: toNumber(r[col.t], path, "t"),
    normH: toNumber(r[col.norm_H], path, "norm_H"),
    normV: toNumber(r[col.norm_V], path, "norm_V"),
    isImpulse: r[col.is_impulse] === "1",
  }));
}

export function loadBounds(dir: string): BoundsRow[] {
  const path = join(dir, "bounds.csv");
  const table = readCsv(path);
  const col = requireColumns(
    table,
    ["theorem_id", "series", "t", "measured", "predicted"],
    path,
  );
  return table.rows.map((r) => ({
    theoremId: r[col.theorem_id],
    series: toNumber(r[col.series], path, "series"),
    t: toNumber(r[col.t], path, "t"),
    measured: toNumber(r[col.measured], path, "measured"),
    predicted: toNumber(r[col.predicted], path, "predicted"),
  }));
}

export function loadReports(dir: string): Report[] {
  const path = join(dir, "reports.json");
  let parsed: unknown;
  try {
    parsed = JSON.parse(readFileSync(path, "utf8"));
  } catch (err) {
    throw new SchemaError(`${path}: ${(err as Error).message}`);
  }
  if (!Array.isArray(parsed)) {
    throw new SchemaError(`${path}: expected a JSON array of reports`);
  }
  for (const [i, rep] of parsed.entries()) {
    for (const key of ["theorem_id", "verdict", "max_violation", "params"]) {
      if (!(key in (rep as object))) {
        throw new SchemaError(`${path}: report ${i} missing key ${key}`);
      }
    }
  }
  return parsed as Report[];
}

/** Constants echo from run.json when present (simulate-only directories). */
export function loadRunConstants(dir: string): Record<string, unknown> {
  const path = join(dir, "run.json");
  if (!existsSync(path)) return {};
  try {
    const parsed = JSON.parse(readFileSync(path, "utf8"));
    return (parsed.constants ?? {}) as Record<string, unknown>;
  } catch (err) {
    throw new SchemaError(`${path}: ${(err as Error).message}`);
  }
}

export function findReport(reports: Report[], theoremId: string): Report {
  const rep = reports.find((r) => r.theorem_id === theoremId);
  if (!rep) {
    throw new SchemaError(
      `reports.json: no ${theoremId} report; found ${reports.map((r) => r.theorem_id).join(", ")}`,
    );
  }
  return rep;
}

import { readFileSync } from "node:fs";

/** Input file/schema problems; the CLI maps these to a nonzero exit. */
export class SchemaError extends Error {}

export interface Table {
  columns: string[];
  rows: string[][];
}

/** Parse a CSV with optional leading `#` comment lines (the versioned header). */
export function parseCsv(text: string, source: string): Table {
  const lines = text.split(/\r?\n/).filter((l) => l.length > 0);
  const body = lines.filter((l) => !l.startsWith("#"));
  if (body.length === 0) {
    throw new SchemaError(`${source}: no header row found`);
  }
  const columns = body[0].split(",");
  const rows = body.slice(1).map((l) => l.split(","));
  for (const [i, row] of rows.entries()) {
    if (row.length !== columns.length) {
      throw new SchemaError(
        `${source}: row ${i + 2} has ${row.length} fields, expected ${columns.length}`,
      );
    }
  }
  return { columns, rows };
}

export function readCsv(path: string): Table {
  let text: string;
  try {
    text = readFileSync(path, "utf8");
  } catch {
    throw new SchemaError(`input file not found: ${path}`);
  }
  return parseCsv(text, path);
}

/** Map required column names to indices, listing every missing one. */
export function requireColumns(
  table: Table,
  required: string[],
  source: string,
): Record<string, number> {
  const missing = required.filter((c) => !table.columns.includes(c));
  if (missing.length > 0) {
    throw new SchemaError(
      `${source}: missing column(s) ${missing.join(", ")}; found ${table.columns.join(", ")}`,
    );
  }
  const index: Record<string, number> = {};
  for (const c of required) index[c] = table.columns.indexOf(c);
  return index;
}

export function toNumber(raw: string, source: string, column: string): number {
  const v = Number(raw);
  if (!Number.isFinite(v)) {
    throw new SchemaError(`${source}: non-numeric value ${raw!} in column ${column}`);
  }
  return v;
}

import { writeFileSync } from "node:fs";
import { exit } from "node:process";

import { SchemaError } from "./csv.js";
import { PlotKind, render } from "./plots.js";

const KINDS: PlotKind[] = ["decay", "envelope", "absorbing", "contraction"];

function usage(): never {
  console.error(
    "usage: main.js --kind decay|envelope|absorbing|contraction --in <dir> --out <file.svg>",
  );
  exit(2);
}

function parseArgs(argv: string[]): { kind: PlotKind; inDir: string; out: string } {
  let kind: string | undefined;
  let inDir: string | undefined;
  let out: string | undefined;
  for (let i = 0; i < argv.length; i++) {
    const a = argv[i];
    if (a === "--kind") kind = argv[++i];
    else if (a === "--in") inDir = argv[++i];
    else if (a === "--out") out = argv[++i];
    else usage();
  }
  if (!kind || !inDir || !out) usage();
  if (!KINDS.includes(kind as PlotKind)) {
    console.error(`unknown --kind ${kind}; expected one of ${KINDS.join(", ")}`);
    exit(2);
  }
  return { kind: kind as PlotKind, inDir, out };
}

export function main(argv: string[]): number {
  const { kind, inDir, out } = parseArgs(argv);
  try {
    const result = render(kind, inDir);
    writeFileSync(out, result.svg);
    const extra =
      result.violationArea !== undefined
        ? ` violation_area=${result.violationArea.toExponential(3)}`
        : "";
    console.log(`${kind} -> ${out}${extra}`);
    return 0;
  } catch (err) {
    if (err instanceof SchemaError) {
      console.error(`schema error: ${err.message}`);
      return 2;
    }
    throw err;
  }
}

exit(main(process.argv.slice(2)));

#!/usr/bin/env node
/** plot --kind scaling --in recurrence.csv --out fig1.svg */

import * as fs from "fs";
import * as path from "path";

import { SchemaError } from "./csv";
import { FigureSpec, render } from "./figures";

function parseArgs(argv: string[]): FigureSpec & { out: string } {
  const opts: Record<string, string> = {};
  for (let i = 0; i < argv.length; i += 2) {
    const key = argv[i];
    const val = argv[i + 1];
    if (!key.startsWith("--") || val === undefined) {
      throw new SchemaError(`cannot parse arguments near '${key}'`);
    }
    opts[key.slice(2)] = val;
  }
  const kind = opts["kind"] as FigureSpec["kind"];
  if (!["scaling", "remainder", "entropy", "returnmap"].includes(kind)) {
    throw new SchemaError(`--kind must be scaling|remainder|entropy|returnmap, got '${kind}'`);
  }
  if (!opts["in"] || !opts["out"]) {
    throw new SchemaError("--in CSV and --out IMAGE are required");
  }
  const spec: FigureSpec & { out: string } = {
    kind,
    input: opts["in"],
    out: opts["out"],
  };
  if (opts["bound-exp"] !== undefined) {
    spec.boundExp = Number(opts["bound-exp"]);
  }
  if (opts["bound-c"] !== undefined) {
    spec.boundC = Number(opts["bound-c"]);
  }
  if (opts["slack"] !== undefined) {
    spec.slack = Number(opts["slack"]);
  }
  return spec;
}

export function main(argv: string[]): number {
  try {
    const spec = parseArgs(argv);
    const svg = render(spec);
    fs.mkdirSync(path.dirname(path.resolve(spec.out)), { recursive: true });
    fs.writeFileSync(spec.out, svg + "\n");
    return 0;
  } catch (err) {
    if (err instanceof SchemaError) {
      console.error(`schema error: ${err.message}`);
      return 2;
    }
    console.error(String(err));
    return 1;
  }
}

if (require.main === module) {
  process.exit(main(process.argv.slice(2)));
}

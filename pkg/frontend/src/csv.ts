/** Strict CSV reading for the lab's artifact schemas. */

import * as fs from "fs";

export class SchemaError extends Error {}

export interface Table {
  header: string[];
  rows: number[][];
  raw: string[][];
}

/** Parse a comma-separated file; every declared column must be present. */
export function readCsv(path: string, required: string[]): Table {
  let text: string;
  try {
    text = fs.readFileSync(path, "utf-8");
  } catch (err) {
    throw new SchemaError(`cannot read CSV ${path}: ${err}`);
  }
  const lines = text.split(/\r?\n/).filter((l) => l.trim().length > 0);
  if (lines.length === 0) {
    throw new SchemaError(`empty CSV: ${path}`);
  }
  const header = lines[0].split(",").map((s) => s.trim());
  for (const col of required) {
    if (!header.includes(col)) {
      throw new SchemaError(`CSV ${path} lacks required column '${col}'`);
    }
  }
  if (lines.length === 1) {
    throw new SchemaError(`CSV ${path} has a header but no data rows`);
  }
  const raw = lines.slice(1).map((l) => l.split(",").map((s) => s.trim()));
  const rows = raw.map((parts, i) => {
    if (parts.length !== header.length) {
      throw new SchemaError(`CSV ${path} row ${i + 2} has ${parts.length} fields, expected ${header.length}`);
    }
    return parts.map((p) => {
      const v = Number(p);
      return Number.isFinite(v) ? v : NaN;
    });
  });
  return { header, rows, raw };
}

export function column(table: Table, name: string): number[] {
  const idx = table.header.indexOf(name);
  if (idx < 0) {
    throw new SchemaError(`missing column '${name}'`);
  }
  return table.rows.map((r) => r[idx]);
}

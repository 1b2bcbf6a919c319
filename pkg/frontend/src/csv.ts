/**
 * Reader and validator for the solver's snapshot CSV schema:
 * x, M_0..M_K, rho, U, theta, q (one row per cell, ascending x).
 */

import { readFileSync } from "node:fs";
import Papa from "papaparse";

export class SchemaError extends Error {
  constructor(
    message: string,
    readonly missing: string[],
    readonly unexpected: string[],
  ) {
    super(
      `${message}; missing columns: [${missing.join(", ")}], ` +
        `unexpected columns: [${unexpected.join(", ")}]`,
    );
  }
}

export class GridMismatchError extends Error {}

export interface Snapshot {
  /** source path, for error messages */
  path: string;
  x: number[];
  /** column name -> values, same length as x */
  columns: Record<string, number[]>;
  /** highest transported moment index K */
  kMax: number;
}

const MACRO_COLUMNS = ["rho", "U", "theta", "q"];

function expectedColumns(kMax: number): string[] {
  const moments = Array.from({ length: kMax + 1 }, (_, j) => `M_${j}`);
  return ["x", ...moments, ...MACRO_COLUMNS];
}

/** Infer K from the header by counting consecutive M_j columns. */
function inferKMax(fields: string[]): number {
  let k = -1;
  while (fields.includes(`M_${k + 1}`)) k += 1;
  return k;
}

export function parseSnapshot(path: string): Snapshot {
  const text = readFileSync(path, "utf8");
  const parsed = Papa.parse<Record<string, number>>(text, {
    header: true,
    dynamicTyping: true,
    skipEmptyLines: true,
  });
  if (parsed.errors.length > 0) {
    const first = parsed.errors[0];
    throw new Error(`${path}: CSV parse error at row ${first.row}: ${first.message}`);
  }
  const fields = parsed.meta.fields ?? [];
  const kMax = inferKMax(fields);
  const expected = expectedColumns(kMax);
  const missing = expected.filter((c) => !fields.includes(c));
  const unexpected = fields.filter((c) => !expected.includes(c));
  if (kMax < 0 || missing.length > 0 || unexpected.length > 0) {
    throw new SchemaError(`${path}: snapshot schema mismatch`, missing, unexpected);
  }

  const columns: Record<string, number[]> = {};
  for (const field of fields) columns[field] = [];
  for (const row of parsed.data) {
    for (const field of fields) {
      const value = row[field];
      if (typeof value !== "number" || !Number.isFinite(value)) {
        throw new Error(`${path}: non-numeric value in column ${field}`);
      }
      columns[field].push(value);
    }
  }
  if (columns.x.length === 0) {
    throw new Error(`${path}: no data rows`);
  }
  const { x, ...rest } = columns;
  return { path, x, columns: rest, kMax };
}

/** All curves in one figure must live on exactly the same cell centers. */
export function assertSameGrid(a: Snapshot, b: Snapshot): void {
  if (a.x.length !== b.x.length) {
    throw new GridMismatchError(
      `grid mismatch: ${a.path} has ${a.x.length} cells, ${b.path} has ${b.x.length}`,
    );
  }
  for (let i = 0; i < a.x.length; i++) {
    if (a.x[i] !== b.x[i]) {
      throw new GridMismatchError(
        `grid mismatch at row ${i}: ${a.path} x=${a.x[i]} vs ${b.path} x=${b.x[i]}`,
      );
    }
  }
}

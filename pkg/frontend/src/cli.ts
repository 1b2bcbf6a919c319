/**
 * CLI for the figure pipeline.
 *
 * Usage:
 *   qbmm-figures --input EQMOM=path/to/eqmom.csv [--input QMOM=...] \
 *                [--oracle path/to/oracle.csv] --out figure.svg
 *
 * Exit codes: 0 success, 1 schema/grid mismatch or bad usage.
 */

import { parseArgs } from "node:util";

import { GridMismatchError, SchemaError } from "./csv.js";
import { renderComparison, sidecarPath, type CurveInput } from "./figure.js";

export function main(argv: string[]): number {
  let parsed;
  try {
    parsed = parseArgs({
      args: argv,
      options: {
        input: { type: "string", multiple: true },
        oracle: { type: "string" },
        out: { type: "string" },
        width: { type: "string" },
      },
    });
  } catch (err) {
    console.error(`usage error: ${(err as Error).message}`);
    return 1;
  }
  const { values } = parsed;
  if (!values.out || !values.input || values.input.length === 0) {
    console.error("usage: --input LABEL=CSV [--input ...] [--oracle CSV] --out SVG");
    return 1;
  }
  const inputs: CurveInput[] = [];
  for (const spec of values.input) {
    const eq = spec.indexOf("=");
    if (eq <= 0) {
      console.error(`usage error: --input expects LABEL=PATH, got ${spec}`);
      return 1;
    }
    inputs.push({ label: spec.slice(0, eq), path: spec.slice(eq + 1) });
  }
  try {
    const summary = renderComparison({
      inputs,
      oracle: values.oracle,
      output: values.out,
      width: values.width ? Number(values.width) : undefined,
    });
    console.log(JSON.stringify({ svg: values.out, sidecar: sidecarPath(values.out), ...summary }, null, 2));
    return 0;
  } catch (err) {
    if (err instanceof SchemaError || err instanceof GridMismatchError) {
      console.error(err.message);
      return 1;
    }
    console.error(`error: ${(err as Error).message}`);
    return 1;
  }
}

if (import.meta.url === `file://${process.argv[1]}`) {
  process.exit(main(process.argv.slice(2)));
}

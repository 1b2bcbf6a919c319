/**
 * Three-panel comparison figure (rho, U, theta vs x) rendered as a
 * deterministic SVG, plus a machine-readable JSON sidecar so numeric
 * comparisons never require reading pixels.
 */

import { writeFileSync } from "node:fs";
import { scaleLinear, type ScaleLinear } from "d3";

import { assertSameGrid, parseSnapshot, type Snapshot } from "./csv.js";

export interface CurveInput {
  /** legend label, e.g. "EQMOM" */
  label: string;
  path: string;
}

export interface FigureSpec {
  inputs: CurveInput[];
  /** reference-solution CSV (same schema and grid); drawn dashed */
  oracle?: string;
  /** output SVG path; the sidecar is written next to it with .json */
  output: string;
  width?: number;
  panelHeight?: number;
}

export interface CurveSummary {
  peak_density: number;
  peak_x: number;
  /** mean |rho - rho_oracle|; present only when an oracle is given */
  l1_error_rho?: number;
}

export interface FigureSummary {
  cells: number;
  x_lo: number;
  x_hi: number;
  panels: string[];
  curves: Record<string, CurveSummary>;
}

const PANELS: { column: string; label: string }[] = [
  { column: "rho", label: "density" },
  { column: "U", label: "velocity" },
  { column: "theta", label: "temperature" },
];

const COLORS = ["#d62728", "#1f77b4", "#2ca02c", "#9467bd"];
const MARGIN = { top: 28, right: 16, bottom: 34, left: 56 };

function meanAbsDiff(a: number[], b: number[]): number {
  let total = 0;
  for (let i = 0; i < a.length; i++) total += Math.abs(a[i] - b[i]);
  return total / a.length;
}

function summarize(curves: Map<string, Snapshot>, oracle?: Snapshot): FigureSummary {
  const any = oracle ?? curves.values().next().value!;
  const summary: FigureSummary = {
    cells: any.x.length,
    x_lo: any.x[0],
    x_hi: any.x[any.x.length - 1],
    panels: PANELS.map((p) => p.column),
    curves: {},
  };
  for (const [label, snap] of curves) {
    const rho = snap.columns.rho;
    let peak = 0;
    for (let i = 1; i < rho.length; i++) if (rho[i] > rho[peak]) peak = i;
    const entry: CurveSummary = { peak_density: rho[peak], peak_x: snap.x[peak] };
    if (oracle) entry.l1_error_rho = meanAbsDiff(rho, oracle.columns.rho);
    summary.curves[label] = entry;
  }
  return summary;
}

function linePath(x: number[], y: number[], sx: ScaleLinear<number, number>, sy: ScaleLinear<number, number>): string {
  const parts: string[] = [];
  for (let i = 0; i < x.length; i++) {
    parts.push(`${i === 0 ? "M" : "L"}${sx(x[i]).toFixed(3)},${sy(y[i]).toFixed(3)}`);
  }
  return parts.join("");
}

function axisTicks(scale: ScaleLinear<number, number>, count: number): number[] {
  return scale.ticks(count);
}

function renderSvg(
  curves: Map<string, Snapshot>,
  oracle: Snapshot | undefined,
  width: number,
  panelHeight: number,
): string {
  const totalHeight = PANELS.length * panelHeight;
  const innerW = width - MARGIN.left - MARGIN.right;
  const innerH = panelHeight - MARGIN.top - MARGIN.bottom;
  const any = oracle ?? curves.values().next().value!;
  const sx = scaleLinear()
    .domain([any.x[0], any.x[any.x.length - 1]])
    .range([0, innerW]);

  const parts: string[] = [
    `<svg xmlns="http://www.w3.org/2000/svg" width="${width}" height="${totalHeight}" ` +
      `viewBox="0 0 ${width} ${totalHeight}" font-family="sans-serif" font-size="11">`,
    `<rect width="${width}" height="${totalHeight}" fill="white"/>`,
  ];

  PANELS.forEach((panel, pi) => {
    const top = pi * panelHeight + MARGIN.top;
    const series: { label: string; y: number[]; color: string; dashed: boolean }[] = [];
    let ci = 0;
    for (const [label, snap] of curves) {
      series.push({ label, y: snap.columns[panel.column], color: COLORS[ci % COLORS.length], dashed: false });
      ci += 1;
    }
    if (oracle) series.push({ label: "exact", y: oracle.columns[panel.column], color: "#333333", dashed: true });

    let lo = Infinity;
    let hi = -Infinity;
    for (const s of series) {
      for (const v of s.y) {
        if (v < lo) lo = v;
        if (v > hi) hi = v;
      }
    }
    const pad = (hi - lo || 1) * 0.05;
    const sy = scaleLinear().domain([lo - pad, hi + pad]).range([innerH, 0]);

    parts.push(`<g transform="translate(${MARGIN.left},${top})">`);
    parts.push(`<rect width="${innerW}" height="${innerH}" fill="none" stroke="#999"/>`);
    for (const t of axisTicks(sx, 5)) {
      const px = sx(t).toFixed(3);
      parts.push(`<line x1="${px}" y1="${innerH}" x2="${px}" y2="${innerH + 4}" stroke="#999"/>`);
      parts.push(`<text x="${px}" y="${innerH + 16}" text-anchor="middle">${t}</text>`);
    }
    for (const t of axisTicks(sy, 4)) {
      const py = sy(t).toFixed(3);
      parts.push(`<line x1="-4" y1="${py}" x2="0" y2="${py}" stroke="#999"/>`);
      parts.push(`<text x="-8" y="${py}" dy="0.32em" text-anchor="end">${Number(t.toPrecision(6))}</text>`);
    }
    for (const s of series) {
      const dash = s.dashed ? ` stroke-dasharray="5,3"` : "";
      parts.push(
        `<path d="${linePath(any.x, s.y, sx, sy)}" fill="none" stroke="${s.color}" stroke-width="1.4"${dash}/>`,
      );
    }
    parts.push(`<text x="4" y="-8" font-weight="bold">${panel.label} (${panel.column})</text>`);
    // legend on the first panel only
    if (pi === 0) {
      series.forEach((s, si) => {
        const lx = innerW - 110;
        const ly = 8 + 16 * si;
        const dash = s.dashed ? ` stroke-dasharray="5,3"` : "";
        parts.push(`<line x1="${lx}" y1="${ly}" x2="${lx + 22}" y2="${ly}" stroke="${s.color}" stroke-width="1.4"${dash}/>`);
        parts.push(`<text x="${lx + 28}" y="${ly}" dy="0.32em">${s.label}</text>`);
      });
    }
    parts.push(`<text x="${innerW / 2}" y="${innerH + 30}" text-anchor="middle">x</text>`);
    parts.push("</g>");
  });

  parts.push("</svg>");
  return parts.join("\n");
}

export function sidecarPath(output: string): string {
  return output.replace(/\.svg$/, "") + ".json";
}

/**
 * Render the comparison figure and write the SVG plus its JSON sidecar.
 * All inputs (and the oracle) must share the snapshot schema and x-grid.
 */
export function renderComparison(spec: FigureSpec): FigureSummary {
  if (spec.inputs.length === 0) {
    throw new Error("at least one input CSV is required");
  }
  const curves = new Map<string, Snapshot>();
  for (const input of spec.inputs) {
    curves.set(input.label, parseSnapshot(input.path));
  }
  const oracle = spec.oracle ? parseSnapshot(spec.oracle) : undefined;
  const all = [...curves.values(), ...(oracle ? [oracle] : [])];
  for (let i = 1; i < all.length; i++) assertSameGrid(all[0], all[i]);

  const summary = summarize(curves, oracle);
  const svg = renderSvg(curves, oracle, spec.width ?? 760, spec.panelHeight ?? 240);
  writeFileSync(spec.output, svg);
  writeFileSync(sidecarPath(spec.output), JSON.stringify(summary, null, 2) + "\n");
  return summary;
}

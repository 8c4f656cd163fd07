/**
 * The three figure kinds.  Input files are never modified; output is a
 * deterministic SVG string.
 */

import {
  ASYMPTOTIC_COLUMNS,
  ConstantRow,
  ReferenceConstants,
  SWEEP_COLUMNS,
  SchemaError,
  Table,
  readConstantsCsv,
  readConstantsSidecar,
  readCsv,
  requireColumns,
} from "./csv";
import { HEIGHT, MARGIN, Svg, WIDTH, linearScale, logScale } from "./svg";

export type PlotKind = "rate_loglog" | "constants_bracket" | "asymptotic_trend";

export interface PlotSpec {
  inputs: string[];
  kind: PlotKind;
  out: string;
  /** sidecar path; defaults to `<first input>.constants.json` */
  constantsPath?: string;
}

const COLORS = {
  upper: "#c0392b",
  lower: "#2471a3",
  envelope: "#7f8c8d",
  band: "#f5b041",
  signed: "#2471a3",
  abs: "#c0392b",
  reference: "#7f8c8d",
  oracle: "#229954",
};

function envelope(kappa: number, c: number): number {
  return c * Math.sqrt(Math.log1p(kappa) / kappa);
}

function renderRateLoglog(spec: PlotSpec): string {
  const path = spec.inputs[0];
  const table = readCsv(path);
  requireColumns(path, table, SWEEP_COLUMNS);
  const refs = readConstantsSidecar(spec.constantsPath ?? path + ".constants.json");
  const rows = [...table.rows].sort((a, b) => a.kappa - b.kappa);

  const kLo = rows[0].kappa;
  const kHi = rows[rows.length - 1].kappa;
  const yVals: number[] = [];
  for (const r of rows) {
    yVals.push(
      r.upper_mean + 3 * r.upper_stderr,
      Math.max(r.lower_mean - 3 * r.lower_stderr, 1e-12),
      envelope(r.kappa, refs.upper_bracket_constant),
      envelope(r.kappa, refs.lower_bracket_constant)
    );
  }
  const yLo = Math.min(...yVals) / 1.4;
  const yHi = Math.max(...yVals) * 1.4;

  const xs = logScale(kLo / 1.3, kHi * 1.3, MARGIN.left, WIDTH - MARGIN.right);
  const ys = logScale(yLo, yHi, HEIGHT - MARGIN.bottom, MARGIN.top);

  const svg = new Svg("Wasserstein-1 brackets vs rescaling parameter");
  svg.axes(xs, ys, "kappa", "distance bracket");

  for (const c of [refs.lower_bracket_constant, refs.upper_bracket_constant]) {
    const pts: Array<[number, number]> = [];
    const steps = 64;
    for (let i = 0; i <= steps; i++) {
      const k = kLo * Math.pow(kHi / kLo, i / steps);
      pts.push([xs(k), ys(envelope(k, c))]);
    }
    svg.polyline(pts, COLORS.envelope, 1, "5 4");
  }

  const upperPts: Array<[number, number]> = [];
  const lowerPts: Array<[number, number]> = [];
  for (const r of rows) {
    const px = xs(r.kappa);
    upperPts.push([px, ys(r.upper_mean)]);
    lowerPts.push([px, ys(r.lower_mean)]);
    svg.errorBar(
      px,
      ys(Math.max(r.upper_mean - 3 * r.upper_stderr, 1e-12)),
      ys(r.upper_mean + 3 * r.upper_stderr),
      COLORS.upper
    );
    svg.errorBar(
      px,
      ys(Math.max(r.lower_mean - 3 * r.lower_stderr, 1e-12)),
      ys(r.lower_mean + 3 * r.lower_stderr),
      COLORS.lower
    );
  }
  svg.polyline(upperPts, COLORS.upper);
  svg.polyline(lowerPts, COLORS.lower);
  for (const [x, y] of upperPts) svg.circle(x, y, 2.5, COLORS.upper);
  for (const [x, y] of lowerPts) svg.circle(x, y, 2.5, COLORS.lower);

  svg.legend([
    ["coupling upper bound", COLORS.upper],
    ["functional lower bound", COLORS.lower],
    [
      `envelope c*sqrt(ln(1+k)/k), c in {${refs.lower_bracket_constant}, ${refs.upper_bracket_constant}}`,
      COLORS.envelope,
    ],
  ]);
  return svg.toString();
}

function renderConstantsBracket(spec: PlotSpec): string {
  const rows: ConstantRow[] = [];
  for (const path of spec.inputs) {
    rows.push(...readConstantsCsv(path));
  }
  if (rows.length === 0) throw new SchemaError("no constant rows across inputs");

  const vals: number[] = [];
  for (const r of rows) {
    vals.push(r.bracket_low, r.bracket_high, r.mean - 3 * r.stderr, r.mean + 3 * r.stderr);
  }
  const lo = Math.min(...vals);
  const hi = Math.max(...vals);
  const pad = 0.1 * (hi - lo || 1);
  const ys = linearScale(lo - pad, hi + pad, HEIGHT - MARGIN.bottom, MARGIN.top);
  const xs = linearScale(-0.5, rows.length - 0.5, MARGIN.left, WIDTH - MARGIN.right);

  const svg = new Svg("Constant estimates with reference brackets");
  svg.axes(xs, ys, "", "value");
  rows.forEach((r, i) => {
    const px = xs(i);
    const half = (xs(0.35) - xs(-0.35)) / 2;
    svg.rect(
      px - half,
      ys(r.bracket_high),
      2 * half,
      Math.abs(ys(r.bracket_low) - ys(r.bracket_high)),
      COLORS.band,
      0.35
    );
    svg.errorBar(px, ys(r.mean - 3 * r.stderr), ys(r.mean + 3 * r.stderr), "#333", 5);
    svg.circle(px, ys(r.mean), 3.5, "#333");
    svg.text(px, HEIGHT - MARGIN.bottom + 18, r.name, 10, "middle");
  });
  svg.legend([
    ["estimate (3 se bars)", "#333"],
    ["reference bracket", COLORS.band],
  ]);
  return svg.toString();
}

function renderAsymptoticTrend(spec: PlotSpec): string {
  const path = spec.inputs[0];
  const table = readCsv(path);
  requireColumns(path, table, ASYMPTOTIC_COLUMNS);
  const refs = readConstantsSidecar(spec.constantsPath ?? path + ".constants.json");
  const rows = [...table.rows].sort((a, b) => a.n - b.n);

  const nLo = rows[0].n;
  const nHi = rows[rows.length - 1].n;
  const yCand = [
    refs.reference_value,
    refs.tail_oracle_limit,
    ...rows.map((r) => r.signed_mean + 3 * r.signed_stderr),
    ...rows.map((r) => r.abs_mean + 3 * r.abs_stderr),
    ...rows.map((r) => r.tail_oracle),
  ];
  const yLo = Math.min(...yCand) * 0.9;
  const yHi = Math.max(...yCand) * 1.08;

  const xs = logScale(nLo / 1.3, nHi * 1.3, MARGIN.left, WIDTH - MARGIN.right);
  const ys = linearScale(yLo, yHi, HEIGHT - MARGIN.bottom, MARGIN.top);

  const svg = new Svg("Scaled maximum of iid bridge maxima");
  svg.axes(xs, ys, "number of cells N", "E[max] / sqrt(ln N)");

  for (const [value, label, color] of [
    [refs.reference_value, "reference sqrt(2)", COLORS.reference],
    [refs.tail_oracle_limit, "tail oracle 1/sqrt(2)", COLORS.oracle],
  ] as Array<[number, string, string]>) {
    svg.line(xs(nLo / 1.3), ys(value), xs(nHi * 1.3), ys(value), color, 1, "6 4");
    svg.text(xs(nHi * 1.3) - 4, ys(value) - 5, label, 10, "end", color);
  }

  const signedPts: Array<[number, number]> = [];
  const absPts: Array<[number, number]> = [];
  for (const r of rows) {
    const px = xs(r.n);
    signedPts.push([px, ys(r.signed_mean)]);
    absPts.push([px, ys(r.abs_mean)]);
    svg.errorBar(px, ys(r.signed_mean - 3 * r.signed_stderr), ys(r.signed_mean + 3 * r.signed_stderr), COLORS.signed);
    svg.errorBar(px, ys(r.abs_mean - 3 * r.abs_stderr), ys(r.abs_mean + 3 * r.abs_stderr), COLORS.abs);
  }
  svg.polyline(signedPts, COLORS.signed);
  svg.polyline(absPts, COLORS.abs);
  for (const [x, y] of signedPts) svg.circle(x, y, 2.5, COLORS.signed);
  for (const [x, y] of absPts) svg.circle(x, y, 2.5, COLORS.abs);

  svg.legend([
    ["one-sided maxima", COLORS.signed],
    ["two-sided maxima", COLORS.abs],
  ]);
  return svg.toString();
}

export function render(spec: PlotSpec): string {
  if (spec.inputs.length === 0) {
    throw new SchemaError("no input CSV given");
  }
  switch (spec.kind) {
    case "rate_loglog":
      return renderRateLoglog(spec);
    case "constants_bracket":
      return renderConstantsBracket(spec);
    case "asymptotic_trend":
      return renderAsymptoticTrend(spec);
    default:
      throw new SchemaError(`unknown plot kind '${spec.kind}'`);
  }
}

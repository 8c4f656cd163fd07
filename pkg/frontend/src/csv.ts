/**
 * CSV input handling: comment-aware parsing and per-plot-kind schema checks.
 *
 * The producer writes UTF-8 comma-separated files with optional leading
 * `#` metadata lines and one header row; all data cells are plain numbers.
 */

import * as fs from "fs";
import Papa from "papaparse";

export class SchemaError extends Error {}

export type Row = Record<string, number>;

export interface Table {
  columns: string[];
  rows: Row[];
}

export function readCsv(path: string): Table {
  const raw = fs.readFileSync(path, "utf-8");
  const body = raw
    .split(/\r?\n/)
    .filter((line) => line.length > 0 && !line.startsWith("#"))
    .join("\n");
  const parsed = Papa.parse<Record<string, string>>(body, {
    header: true,
    skipEmptyLines: true,
  });
  if (parsed.errors.length > 0) {
    throw new SchemaError(`${path}: CSV parse error: ${parsed.errors[0].message}`);
  }
  const columns = parsed.meta.fields ?? [];
  const rows: Row[] = parsed.data.map((rec, i) => {
    const row: Row = {};
    for (const col of columns) {
      const value = Number(rec[col]);
      if (!Number.isFinite(value)) {
        throw new SchemaError(
          `${path}: row ${i + 1}, column '${col}' is not a finite number: '${rec[col]}'`
        );
      }
      row[col] = value;
    }
    return row;
  });
  if (rows.length === 0) {
    throw new SchemaError(`${path}: no data rows`);
  }
  return { columns, rows };
}

export function requireColumns(path: string, table: Table, needed: string[]): void {
  for (const col of needed) {
    if (!table.columns.includes(col)) {
      throw new SchemaError(`${path}: missing required column '${col}'`);
    }
  }
}

export const SWEEP_COLUMNS = [
  "kappa",
  "upper_mean",
  "upper_stderr",
  "lower_mean",
  "lower_stderr",
  "envelope",
  "ratio_upper",
  "ratio_lower",
];

export const CONSTANTS_COLUMNS = [
  "name",
  "mean",
  "stderr",
  "n",
  "bracket_low",
  "bracket_high",
];

export const ASYMPTOTIC_COLUMNS = [
  "n",
  "signed_mean",
  "signed_stderr",
  "abs_mean",
  "abs_stderr",
  "tail_oracle",
];

/** The constants CSV has a non-numeric first column; parse it separately. */
export interface ConstantRow {
  name: string;
  mean: number;
  stderr: number;
  n: number;
  bracket_low: number;
  bracket_high: number;
}

export function readConstantsCsv(path: string): ConstantRow[] {
  const raw = fs.readFileSync(path, "utf-8");
  const body = raw
    .split(/\r?\n/)
    .filter((line) => line.length > 0 && !line.startsWith("#"))
    .join("\n");
  const parsed = Papa.parse<Record<string, string>>(body, {
    header: true,
    skipEmptyLines: true,
  });
  const columns = parsed.meta.fields ?? [];
  for (const col of CONSTANTS_COLUMNS) {
    if (!columns.includes(col)) {
      throw new SchemaError(`${path}: missing required column '${col}'`);
    }
  }
  return parsed.data.map((rec, i) => {
    const numeric = (col: string): number => {
      const v = Number(rec[col]);
      if (!Number.isFinite(v)) {
        throw new SchemaError(
          `${path}: row ${i + 1}, column '${col}' is not a finite number: '${rec[col]}'`
        );
      }
      return v;
    };
    return {
      name: rec["name"] ?? "",
      mean: numeric("mean"),
      stderr: numeric("stderr"),
      n: numeric("n"),
      bracket_low: numeric("bracket_low"),
      bracket_high: numeric("bracket_high"),
    };
  });
}

export interface ReferenceConstants {
  upper_bracket_constant: number;
  lower_bracket_constant: number;
  reference_value: number;
  tail_oracle_limit: number;
}

/**
 * Reference constants are re-read from the sidecar the producer writes next
 * to each CSV, never hard-coded here.
 */
export function readConstantsSidecar(path: string): ReferenceConstants {
  if (!fs.existsSync(path)) {
    throw new SchemaError(
      `missing constants sidecar '${path}' (expected next to the input CSV)`
    );
  }
  const data = JSON.parse(fs.readFileSync(path, "utf-8"));
  for (const key of [
    "upper_bracket_constant",
    "lower_bracket_constant",
    "reference_value",
    "tail_oracle_limit",
  ]) {
    if (typeof data[key] !== "number") {
      throw new SchemaError(`${path}: missing numeric field '${key}'`);
    }
  }
  return data as ReferenceConstants;
}

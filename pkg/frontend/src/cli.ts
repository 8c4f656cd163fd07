#!/usr/bin/env node
/**
 * fcltmc-plots: render figures from fcltmc CSV output.
 *
 *   fcltmc-plots <input.csv> [more.csv ...] --kind rate_loglog|constants_bracket|asymptotic_trend \
 *       --out figure.svg [--constants sidecar.json]
 *
 * Exit codes: 0 rendered, 1 schema/data error (message names the offending
 * column or file), 2 usage error.
 */

import * as fs from "fs";
import { SchemaError } from "./csv";
import { PlotKind, PlotSpec, render } from "./render";

const KINDS: PlotKind[] = ["rate_loglog", "constants_bracket", "asymptotic_trend"];

function parseArgs(argv: string[]): PlotSpec {
  const inputs: string[] = [];
  let kind: string | undefined;
  let out: string | undefined;
  let constantsPath: string | undefined;
  for (let i = 0; i < argv.length; i++) {
    const tok = argv[i];
    if (tok === "--kind") kind = argv[++i];
    else if (tok === "--out") out = argv[++i];
    else if (tok === "--constants") constantsPath = argv[++i];
    else if (tok.startsWith("--")) throw new UsageError(`unknown flag '${tok}'`);
    else inputs.push(tok);
  }
  if (inputs.length === 0) throw new UsageError("no input CSV given");
  if (!kind) throw new UsageError("--kind is required");
  if (!KINDS.includes(kind as PlotKind)) {
    throw new UsageError(`--kind must be one of ${KINDS.join(", ")}, got '${kind}'`);
  }
  if (!out) throw new UsageError("--out is required");
  return { inputs, kind: kind as PlotKind, out, constantsPath };
}

class UsageError extends Error {}

export function main(argv: string[]): number {
  try {
    const spec = parseArgs(argv);
    const svg = render(spec);
    fs.writeFileSync(spec.out, svg, "utf-8");
    process.stdout.write(`wrote ${spec.out} (${svg.length} bytes)\n`);
    return 0;
  } catch (err) {
    if (err instanceof UsageError) {
      process.stderr.write(`usage error: ${err.message}\n`);
      return 2;
    }
    if (err instanceof SchemaError) {
      process.stderr.write(`schema error: ${err.message}\n`);
      return 1;
    }
    process.stderr.write(`error: ${(err as Error).message}\n`);
    return 1;
  }
}

if (require.main === module) {
  process.exit(main(process.argv.slice(2)));
}

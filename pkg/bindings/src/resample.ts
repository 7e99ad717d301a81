/**
 * Array-in/array-out bridge to the resampling CLI.
 *
 * The feature matrix is written once as CSV, the `mcccr resample` subcommand
 * runs in a subprocess, and the output file plus its provenance sidecar are
 * parsed back. Floats survive both directions bit-exactly (shortest
 * round-trip decimal in both runtimes), so a fixed seed gives outputs
 * identical to driving the CLI by hand.
 */

import { execFile } from "node:child_process";
import { mkdtemp, readFile, rm, writeFile } from "node:fs/promises";
import { tmpdir } from "node:os";
import { join } from "node:path";
import { promisify } from "node:util";

const execFileAsync = promisify(execFile);

export type Matrix = ReadonlyArray<ReadonlyArray<number>>;

export interface ResampleOptions {
  method: "mc-ccr" | "smote-all" | "none";
  seed?: number;
  /** method parameters: energy, p, ratio, cleaning, selection, decomposition, k */
  params?: Record<string, number | string>;
  standardize?: boolean;
  /** interpreter running the core package; defaults to $MCCCR_PYTHON or python3 */
  python?: string;
}

export interface ResampleResult {
  features: number[][];
  labels: number[];
  /** row indices of synthetic instances in the returned arrays */
  syntheticRows: number[];
  countsBefore: Record<string, number>;
  countsAfter: Record<string, number>;
}

const FLAG_NAMES = new Set([
  "energy", "p", "ratio", "cleaning", "selection", "decomposition", "k",
]);

export function toCsv(features: Matrix, labels: ArrayLike<number>): string {
  if (features.length !== labels.length) {
    throw new RangeError(
      `labels length ${labels.length} does not match ${features.length} rows`,
    );
  }
  if (features.length === 0) throw new RangeError("empty dataset");
  const m = features[0].length;
  const lines: string[] = [];
  const header: string[] = [];
  for (let j = 0; j < m; j++) header.push(`f${j}`);
  header.push("label");
  lines.push(header.join(","));
  for (let i = 0; i < features.length; i++) {
    const row = features[i];
    if (row.length !== m) {
      throw new RangeError(`row ${i} has ${row.length} columns, expected ${m}`);
    }
    for (const v of row) {
      if (!Number.isFinite(v)) throw new RangeError(`non-finite feature value ${v}`);
    }
    lines.push(row.map(formatFloat).join(",") + "," + String(labels[i]));
  }
  return lines.join("\n") + "\n";
}

/** Shortest round-trip decimal with a trailing .0 for integral values,
 * matching the writer on the other side. */
function formatFloat(x: number): string {
  const s = String(x);
  return Number.isInteger(x) && !s.includes("e") && !s.includes(".")
    ? `${s}.0`
    : s;
}

export function parseCsv(text: string): { features: number[][]; labels: number[] } {
  const lines = text.split("\n").filter((line) => line.trim().length > 0);
  const features: number[][] = [];
  const labels: number[] = [];
  for (const line of lines.slice(1)) {
    const cells = line.split(",");
    const label = Number(cells[cells.length - 1]);
    if (!Number.isInteger(label)) {
      throw new RangeError(`non-integer label ${cells[cells.length - 1]!}`);
    }
    features.push(cells.slice(0, -1).map(Number));
    labels.push(label);
  }
  return { features, labels };
}

export async function resample(
  features: Matrix,
  labels: ArrayLike<number>,
  options: ResampleOptions,
): Promise<ResampleResult> {
  const python = options.python ?? process.env.MCCCR_PYTHON ?? "python3";
  const dir = await mkdtemp(join(tmpdir(), "mcccr-"));
  try {
    const inputPath = join(dir, "input.csv");
    const outputPath = join(dir, "output.csv");
    await writeFile(inputPath, toCsv(features, labels), "utf8");

    const args = [
      "-m", "mcccr", "resample",
      "--input", inputPath,
      "--output", outputPath,
      "--method", options.method,
      "--seed", String(options.seed ?? 0),
    ];
    for (const [key, value] of Object.entries(options.params ?? {})) {
      if (!FLAG_NAMES.has(key)) throw new RangeError(`unknown parameter ${key}`);
      args.push(`--${key}`, String(value));
    }
    if (options.standardize) args.push("--standardize");

    try {
      await execFileAsync(python, args);
    } catch (err) {
      const stderr = (err as { stderr?: string }).stderr ?? String(err);
      throw new Error(`resample failed: ${stderr.trim()}`);
    }

    const output = parseCsv(await readFile(outputPath, "utf8"));
    const provenance = JSON.parse(
      await readFile(`${outputPath}.provenance.json`, "utf8"),
    ) as {
      synthetic_rows: number[];
      counts_before: Record<string, number>;
      counts_after: Record<string, number>;
    };
    return {
      features: output.features,
      labels: output.labels,
      syntheticRows: provenance.synthetic_rows,
      countsBefore: provenance.counts_before,
      countsAfter: provenance.counts_after,
    };
  } finally {
    await rm(dir, { recursive: true, force: true });
  }
}

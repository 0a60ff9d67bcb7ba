/**
 * Strict reader for the sweep CSV schema.
 *
 * Header: n,runs,median_B,q25_B,q75_B,truncated_frac,slope_context
 * Empty numeric cells mean "censored" and parse to null.  The
 * slope_context cell repeats the harness fit on every row as
 * key=value pairs joined by semicolons.
 */

export interface SweepRow {
  n: number;
  runs: number;
  medianB: number | null;
  q25B: number | null;
  q75B: number | null;
  truncatedFrac: number;
  slopeContext: string;
}

export const SWEEP_HEADER = [
  "n",
  "runs",
  "median_B",
  "q25_B",
  "q75_B",
  "truncated_frac",
  "slope_context",
] as const;

function parseNumber(cell: string, column: string, line: number): number {
  const value = Number(cell);
  if (cell === "" || !Number.isFinite(value)) {
    throw new Error(`sweep csv line ${line}: column ${column} is not a number: "${cell}"`);
  }
  return value;
}

function parseOptional(cell: string, column: string, line: number): number | null {
  if (cell === "") return null;
  return parseNumber(cell, column, line);
}

export function parseSweepCsv(text: string): SweepRow[] {
  const lines = text.split("\n").filter((l) => l.length > 0);
  if (lines.length === 0) {
    throw new Error("sweep csv: file is empty");
  }
  const header = lines[0]!.split(",");
  for (let i = 0; i < SWEEP_HEADER.length; i++) {
    if (header[i] !== SWEEP_HEADER[i]) {
      throw new Error(
        `sweep csv: missing or misplaced column ${SWEEP_HEADER[i]} (got "${header[i] ?? ""}")`,
      );
    }
  }
  const rows: SweepRow[] = [];
  for (let i = 1; i < lines.length; i++) {
    const cells = lines[i]!.split(",");
    if (cells.length !== SWEEP_HEADER.length) {
      throw new Error(`sweep csv line ${i + 1}: expected ${SWEEP_HEADER.length} cells`);
    }
    rows.push({
      n: parseNumber(cells[0]!, "n", i + 1),
      runs: parseNumber(cells[1]!, "runs", i + 1),
      medianB: parseOptional(cells[2]!, "median_B", i + 1),
      q25B: parseOptional(cells[3]!, "q25_B", i + 1),
      q75B: parseOptional(cells[4]!, "q75_B", i + 1),
      truncatedFrac: parseNumber(cells[5]!, "truncated_frac", i + 1),
      slopeContext: cells[6]!,
    });
  }
  if (rows.length === 0) {
    throw new Error("sweep csv: no data rows");
  }
  return rows;
}

/** key=value;... -> map; empty context -> empty map. */
export function parseSlopeContext(context: string): Map<string, string> {
  const out = new Map<string, string>();
  if (!context) return out;
  for (const item of context.split(";")) {
    const eq = item.indexOf("=");
    if (eq > 0) out.set(item.slice(0, eq), item.slice(eq + 1));
  }
  return out;
}

/** The harness-computed slope carried in the CSV, if any. */
export function harnessSlope(rows: SweepRow[]): number | null {
  const ctx = parseSlopeContext(rows[0]!.slopeContext);
  const slope = ctx.get("slope");
  return slope === undefined ? null : Number(slope);
}

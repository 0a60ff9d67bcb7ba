/**
 * Readers for the JSONL record schemas (run records and lemma rows).
 * Validation is field-by-field with named errors; these readers never
 * recompute simulation results, only aggregate what the files carry.
 */

export interface RunRecord {
  runIndex: number;
  seed: number;
  n: number;
  blockage: number | null;
  particlesUsed: number;
  truncated: boolean;
  escapedCount: number;
  rightmost: number;
  counts: number[];
  countsCapped: boolean;
}

export interface LemmaRow {
  n: number;
  site: number;
  qualifying: number;
  successes: number;
  frequency: number | null;
  se: number | null;
  bound: number | null;
  passed: boolean | null;
  inconclusive: boolean;
}

function need(obj: Record<string, unknown>, field: string, line: number): unknown {
  if (!(field in obj)) {
    throw new Error(`jsonl line ${line}: missing field ${field}`);
  }
  return obj[field];
}

function asNumber(value: unknown, field: string, line: number): number {
  if (typeof value !== "number" || !Number.isFinite(value)) {
    throw new Error(`jsonl line ${line}: field ${field} is not a number`);
  }
  return value;
}

function parseLines(text: string): Record<string, unknown>[] {
  const rows: Record<string, unknown>[] = [];
  const lines = text.split("\n");
  for (let i = 0; i < lines.length; i++) {
    const line = lines[i]!.trim();
    if (!line) continue;
    let parsed: unknown;
    try {
      parsed = JSON.parse(line);
    } catch {
      throw new Error(`jsonl line ${i + 1}: not valid JSON`);
    }
    if (typeof parsed !== "object" || parsed === null || Array.isArray(parsed)) {
      throw new Error(`jsonl line ${i + 1}: not an object`);
    }
    rows.push(parsed as Record<string, unknown>);
  }
  if (rows.length === 0) {
    throw new Error("jsonl: no records");
  }
  return rows;
}

export function parseRunRecords(text: string): RunRecord[] {
  return parseLines(text).map((obj, idx) => {
    const line = idx + 1;
    const blockage = need(obj, "B", line);
    const profile = need(obj, "profile_summary", line) as Record<string, unknown>;
    if (typeof profile !== "object" || profile === null) {
      throw new Error(`jsonl line ${line}: field profile_summary is not an object`);
    }
    const counts = need(profile, "counts", line);
    if (!Array.isArray(counts)) {
      throw new Error(`jsonl line ${line}: field profile_summary.counts is not an array`);
    }
    return {
      runIndex: asNumber(need(obj, "run_index", line), "run_index", line),
      seed: asNumber(need(obj, "seed", line), "seed", line),
      n: asNumber(need(obj, "n", line), "n", line),
      blockage: blockage === null ? null : asNumber(blockage, "B", line),
      particlesUsed: asNumber(need(obj, "particles_used", line), "particles_used", line),
      truncated: Boolean(need(obj, "truncated", line)),
      escapedCount: asNumber(need(obj, "escaped_count", line), "escaped_count", line),
      rightmost: asNumber(need(profile, "rightmost", line), "profile_summary.rightmost", line),
      counts: counts.map((c, k) => asNumber(c, `profile_summary.counts[${k}]`, line)),
      countsCapped: Boolean(profile["counts_capped"]),
    };
  });
}

export function parseLemmaRows(text: string): LemmaRow[] {
  return parseLines(text).map((obj, idx) => {
    const line = idx + 1;
    const freq = need(obj, "frequency", line);
    const se = need(obj, "se", line);
    const bound = need(obj, "bound", line);
    const passed = need(obj, "passed", line);
    return {
      n: asNumber(need(obj, "n", line), "n", line),
      site: asNumber(need(obj, "site", line), "site", line),
      qualifying: asNumber(need(obj, "qualifying", line), "qualifying", line),
      successes: asNumber(need(obj, "successes", line), "successes", line),
      frequency: freq === null ? null : asNumber(freq, "frequency", line),
      se: se === null ? null : asNumber(se, "se", line),
      bound: bound === null ? null : asNumber(bound, "bound", line),
      passed: passed === null ? null : Boolean(passed),
      inconclusive: Boolean(need(obj, "inconclusive", line)),
    };
  });
}

/** Saturation frequency of one site, grouped by capacity. */
export function saturationByCapacity(
  records: RunRecord[],
  site: number,
): Map<number, { runs: number; hits: number; frequency: number }> {
  const grouped = new Map<number, { runs: number; hits: number; frequency: number }>();
  for (const rec of records) {
    let cell = grouped.get(rec.n);
    if (!cell) {
      cell = { runs: 0, hits: 0, frequency: 0 };
      grouped.set(rec.n, cell);
    }
    cell.runs += 1;
    if (rec.blockage === site) cell.hits += 1;
  }
  for (const cell of grouped.values()) {
    cell.frequency = cell.hits / cell.runs;
  }
  return grouped;
}

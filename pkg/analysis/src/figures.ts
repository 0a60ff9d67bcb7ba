/**
 * The four figure kinds rendered from harness output files.
 *
 * Each figure is a pure function of its parsed inputs and returns the
 * SVG text plus a plain-text parameter sidecar; rendering the same
 * files twice yields identical bytes.  Figures only aggregate what the
 * files carry - nothing is re-simulated.  The growth figure duplicates
 * the log-median least-squares fit for annotation; the harness fit
 * embedded in the CSV stays authoritative and is echoed alongside.
 */

import { harnessSlope, SweepRow } from "./csv.js";
import { logLeastSquares } from "./fit.js";
import { LemmaRow, RunRecord, saturationByCapacity } from "./jsonl.js";
import { Chart, extentOf } from "./svg.js";

export type FigureKind = "B-vs-n" | "S-decay" | "profile" | "lemma-frequency";

export interface FigureResult {
  svg: string;
  sidecar: string;
}

function sidecarText(kind: FigureKind, entries: Array<[string, string | number]>): string {
  const lines = [`kind=${kind}`];
  for (const [key, value] of entries) {
    lines.push(`${key}=${String(value)}`);
  }
  return lines.join("\n") + "\n";
}

/** log(median blockage position) against capacity, slope annotated. */
export function figureBlockageGrowth(rows: SweepRow[]): FigureResult {
  const usable = rows.filter(
    (r) => r.medianB !== null && r.medianB > 0 && r.truncatedFrac <= 0.5,
  );
  if (usable.length === 0) {
    throw new Error("B-vs-n: no usable rows (positive medians, truncation <= 50%)");
  }
  const xs = usable.map((r) => r.n);
  const ys = usable.map((r) => Math.log(r.medianB!));
  const fit = logLeastSquares(
    usable.map((r) => r.n),
    usable.map((r) => r.medianB!),
  );
  const chart = new Chart(
    extentOf(xs),
    extentOf(ys),
    "Median blockage position grows exponentially in capacity",
    "capacity n",
    "ln(median blockage position)",
  );
  const color = chart.nextColor();
  chart.points(
    xs.map((x, i) => [x, ys[i]!] as [number, number]),
    color,
  );
  const entries: Array<[string, string | number]> = [["points", usable.length]];
  if (fit) {
    const lineColor = chart.nextColor();
    chart.line(
      xs.map((x) => [x, fit.intercept + fit.slope * x] as [number, number]),
      lineColor,
      true,
    );
    chart.annotate(`fitted slope ${fit.slope.toPrecision(4)} per unit n`);
    entries.push(["slope", fit.slope], ["intercept", fit.intercept]);
  } else {
    chart.annotate("fewer than two usable rows: points only");
    entries.push(["slope", "none"]);
  }
  const harness = harnessSlope(rows);
  if (harness !== null) {
    entries.push(["harness_slope", harness]);
  }
  for (const r of usable) {
    entries.push([`median_n${r.n}`, r.medianB!]);
  }
  return { svg: chart.render(), sidecar: sidecarText("B-vs-n", entries) };
}

/** log saturation frequency of one site against capacity. */
export function figureSaturationDecay(records: RunRecord[], site: number): FigureResult {
  const grouped = saturationByCapacity(records, site);
  const ns = [...grouped.keys()].sort((a, b) => a - b);
  const positive = ns.filter((n) => grouped.get(n)!.frequency > 0);
  const zeros = ns.filter((n) => grouped.get(n)!.frequency === 0);
  if (positive.length === 0) {
    throw new Error(`S-decay: site ${site} never saturated in the supplied records`);
  }
  const xs = positive;
  const ys = positive.map((n) => Math.log(grouped.get(n)!.frequency));
  const chart = new Chart(
    extentOf(ns),
    extentOf(ys),
    `Saturation frequency of site ${site} decays with capacity`,
    "capacity n",
    `ln(frequency of first blockage at site ${site})`,
  );
  const color = chart.nextColor();
  chart.points(
    xs.map((x, i) => [x, ys[i]!] as [number, number]),
    color,
  );
  const fit = logLeastSquares(
    positive,
    positive.map((n) => grouped.get(n)!.frequency),
  );
  const entries: Array<[string, string | number]> = [
    ["site", site],
    ["points", positive.length],
  ];
  if (fit) {
    chart.line(
      xs.map((x) => [x, fit.intercept + fit.slope * x] as [number, number]),
      chart.nextColor(),
      true,
    );
    chart.annotate(`fitted decay ${fit.slope.toPrecision(4)} per unit n`);
    entries.push(["decay_slope", fit.slope]);
  } else {
    entries.push(["decay_slope", "none"]);
  }
  if (zeros.length) {
    chart.annotate(`zero-frequency capacities omitted: ${zeros.join(" ")}`, 1);
  }
  for (const n of ns) {
    const cell = grouped.get(n)!;
    entries.push([`frequency_n${n}`, `${cell.hits}/${cell.runs}=${cell.frequency}`]);
  }
  return { svg: chart.render(), sidecar: sidecarText("S-decay", entries) };
}

/** Mean occupancy per site (relative to capacity) at blockage time. */
export function figureProfile(records: RunRecord[]): FigureResult {
  const finished = records.filter((r) => r.blockage !== null);
  if (finished.length === 0) {
    throw new Error("profile: no runs reached a blockage");
  }
  const byN = new Map<number, RunRecord[]>();
  for (const rec of finished) {
    const bucket = byN.get(rec.n);
    if (bucket) bucket.push(rec);
    else byN.set(rec.n, [rec]);
  }
  const series: Array<{ n: number; means: number[] }> = [];
  for (const n of [...byN.keys()].sort((a, b) => a - b)) {
    const bucket = byN.get(n)!;
    const frontiers = bucket.map((r) => Math.min(r.rightmost, r.counts.length - 1));
    const span = Math.min(medianOf(frontiers), 4096);
    const means: number[] = [];
    for (let k = 0; k <= span; k++) {
      let total = 0;
      for (const rec of bucket) {
        total += k < rec.counts.length ? rec.counts[k]! : 0;
      }
      means.push(total / bucket.length / n);
    }
    series.push({ n, means });
  }
  const maxLen = Math.max(...series.map((s) => s.means.length));
  const allValues = series.flatMap((s) => s.means);
  const chart = new Chart(
    { min: 0, max: maxLen - 1 },
    { min: 0, max: Math.max(1, ...allValues) },
    "Occupancy at blockage time stays well below capacity",
    "site",
    "mean count / capacity",
  );
  chart.hline(1.0, "#888", "capacity");
  const entries: Array<[string, string | number]> = [["runs", finished.length]];
  series.forEach((s, idx) => {
    const color = chart.nextColor();
    chart.line(
      s.means.map((m, k) => [k, m] as [number, number]),
      color,
    );
    chart.seriesLabel(`n=${s.n}`, color, idx);
    const overall = s.means.reduce((a, b) => a + b, 0) / s.means.length;
    entries.push([`mean_relative_occupancy_n${s.n}`, overall]);
    entries.push([`sites_plotted_n${s.n}`, s.means.length]);
  });
  return { svg: chart.render(), sidecar: sidecarText("profile", entries) };
}

/** Conditional upon-arrival freeze frequency rows with the half line. */
export function figureLemmaFrequency(rows: LemmaRow[]): FigureResult {
  const usable = rows.filter((r) => r.frequency !== null && r.se !== null);
  if (usable.length === 0) {
    throw new Error("lemma-frequency: no conclusive rows");
  }
  const xs = usable.map((r) => r.n);
  const lows = usable.map((r) => r.frequency! - 4 * r.se!);
  const highs = usable.map((r) => r.frequency! + 4 * r.se!);
  const chart = new Chart(
    extentOf(xs),
    { min: Math.min(0.4, ...lows), max: Math.max(0.6, ...highs) },
    "Upon-arrival freeze frequency in the half-capacity regime",
    "capacity n",
    "conditional frequency",
  );
  chart.hline(0.5, "#888", "one half");
  const color = chart.nextColor();
  usable.forEach((r, i) => {
    chart.line(
      [
        [r.n, lows[i]!],
        [r.n, highs[i]!],
      ],
      color,
    );
  });
  chart.points(
    usable.map((r) => [r.n, r.frequency!] as [number, number]),
    color,
    4.5,
  );
  const entries: Array<[string, string | number]> = [["rows", usable.length]];
  for (const r of usable) {
    entries.push([
      `n${r.n}`,
      `site=${r.site} qualifying=${r.qualifying} frequency=${r.frequency} bound=${r.bound}`,
    ]);
  }
  const inconclusive = rows.filter((r) => r.inconclusive).map((r) => r.n);
  if (inconclusive.length) {
    chart.annotate(`inconclusive capacities: ${inconclusive.join(" ")}`, 1);
    entries.push(["inconclusive", inconclusive.join(" ")]);
  }
  return { svg: chart.render(), sidecar: sidecarText("lemma-frequency", entries) };
}

function medianOf(values: number[]): number {
  const sorted = [...values].sort((a, b) => a - b);
  const mid = Math.floor(sorted.length / 2);
  return sorted.length % 2 ? sorted[mid]! : Math.floor((sorted[mid - 1]! + sorted[mid]!) / 2);
}

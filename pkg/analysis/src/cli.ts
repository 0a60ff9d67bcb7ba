/**
 * Render one figure from harness output files.
 *
 *   node dist/cli.js --kind B-vs-n --out growth.svg sweep.csv
 *   node dist/cli.js --kind S-decay --site 1 --out decay.svg runs_n2.jsonl runs_n3.jsonl ...
 *   node dist/cli.js --kind profile --out profile.svg runs_n4.jsonl
 *   node dist/cli.js --kind lemma-frequency --out lemma.svg lemma.jsonl
 *
 * Writes the SVG to --out and the fitted parameters to <out>.params.txt.
 */

import { readFileSync, writeFileSync } from "node:fs";
import { parseArgs } from "node:util";

import { parseSweepCsv } from "./csv.js";
import {
  FigureKind,
  FigureResult,
  figureBlockageGrowth,
  figureLemmaFrequency,
  figureProfile,
  figureSaturationDecay,
} from "./figures.js";
import { parseLemmaRows, parseRunRecords } from "./jsonl.js";

const KINDS: FigureKind[] = ["B-vs-n", "S-decay", "profile", "lemma-frequency"];

export function renderFromFiles(kind: FigureKind, inputs: string[], site: number): FigureResult {
  if (inputs.length === 0) {
    throw new Error("no input files given");
  }
  const texts = inputs.map((p) => readFileSync(p, "utf-8"));
  switch (kind) {
    case "B-vs-n":
      if (texts.length !== 1) throw new Error("B-vs-n expects exactly one sweep CSV");
      return figureBlockageGrowth(parseSweepCsv(texts[0]!));
    case "S-decay":
      return figureSaturationDecay(texts.flatMap(parseRunRecords), site);
    case "profile":
      return figureProfile(texts.flatMap(parseRunRecords));
    case "lemma-frequency":
      if (texts.length !== 1) throw new Error("lemma-frequency expects one lemma JSONL");
      return figureLemmaFrequency(parseLemmaRows(texts[0]!));
  }
}

export function sidecarPath(out: string): string {
  return `${out}.params.txt`;
}

export function main(argv: string[]): number {
  let parsed;
  try {
    parsed = parseArgs({
      args: argv,
      allowPositionals: true,
      options: {
        kind: { type: "string" },
        out: { type: "string" },
        site: { type: "string", default: "1" },
      },
    });
  } catch (err) {
    console.error(String(err instanceof Error ? err.message : err));
    return 1;
  }
  const kind = parsed.values.kind as FigureKind | undefined;
  const out = parsed.values.out;
  if (!kind || !KINDS.includes(kind) || !out) {
    console.error(`usage: --kind {${KINDS.join("|")}} --out FILE [--site K] inputs...`);
    return 1;
  }
  const site = Number(parsed.values.site);
  if (!Number.isInteger(site) || site < 0) {
    console.error(`--site must be a nonnegative integer, got ${parsed.values.site}`);
    return 1;
  }
  try {
    const result = renderFromFiles(kind, parsed.positionals, site);
    writeFileSync(out, result.svg, "utf-8");
    writeFileSync(sidecarPath(out), result.sidecar, "utf-8");
    console.log(`${kind} -> ${out} (+ ${sidecarPath(out)})`);
    return 0;
  } catch (err) {
    console.error(String(err instanceof Error ? err.message : err));
    return 1;
  }
}

if (process.argv[1] && process.argv[1].endsWith("cli.js")) {
  process.exit(main(process.argv.slice(2)));
}

/**
 * Secondary acceptance: render all four figure kinds from the primary
 * acceptance artifacts and check the annotated slope against the
 * harness fit to three significant figures.
 *
 * Run the primary suite first (pytest in the repository root) so that
 * artifacts/acceptance/ exists.
 */
import { existsSync, mkdirSync, readFileSync } from "node:fs";
import { fileURLToPath } from "node:url";
import { beforeAll, describe, expect, it } from "vitest";

import { renderFromFiles, sidecarPath, main } from "../src/cli.js";
import { harnessSlope, parseSweepCsv } from "../src/csv.js";

const ARTIFACTS = fileURLToPath(new URL("../../artifacts/acceptance/", import.meta.url));
const OUT = fileURLToPath(new URL("../out/", import.meta.url));

const artifact = (name: string) => `${ARTIFACTS}${name}`;
const runFiles = [2, 3, 4, 5, 6].map((n) => artifact(`runs_n${n}.jsonl`));

function params(sidecar: string): Map<string, string> {
  const map = new Map<string, string>();
  for (const line of sidecar.trim().split("\n")) {
    const eq = line.indexOf("=");
    map.set(line.slice(0, eq), line.slice(eq + 1));
  }
  return map;
}

describe("acceptance artifacts", () => {
  beforeAll(() => {
    if (!existsSync(artifact("sweep.csv"))) {
      throw new Error(
        "artifacts/acceptance/ is missing; run the primary acceptance suite first: pytest",
      );
    }
    mkdirSync(OUT, { recursive: true });
  });

  it("renders the growth figure and matches the harness slope to 3 significant figures", () => {
    const { sidecar } = renderFromFiles("B-vs-n", [artifact("sweep.csv")], 1);
    const annotated = Number(params(sidecar).get("slope"));
    const harness = harnessSlope(parseSweepCsv(readFileSync(artifact("sweep.csv"), "utf-8")))!;
    expect(annotated.toPrecision(3)).toBe(harness.toPrecision(3));
    expect(Math.abs(annotated - harness) / Math.abs(harness)).toBeLessThan(1e-9);
    expect(annotated).toBeGreaterThan(0);
  });

  it("renders the saturation decay figure", () => {
    const { svg, sidecar } = renderFromFiles("S-decay", runFiles, 1);
    expect(svg).toContain("<svg");
    expect(params(sidecar).get("frequency_n2")).toBeDefined();
  });

  it("renders the occupancy profile figure", () => {
    const { svg, sidecar } = renderFromFiles("profile", runFiles, 1);
    expect(svg).toContain("capacity");
    for (const n of [2, 3, 4, 5, 6]) {
      const mean = Number(params(sidecar).get(`mean_relative_occupancy_n${n}`));
      expect(mean).toBeGreaterThan(0);
      expect(mean).toBeLessThan(1); // occupancy sits well below capacity
    }
  });

  it("renders the lemma frequency figure", () => {
    const { sidecar } = renderFromFiles("lemma-frequency", [artifact("lemma.jsonl")], 1);
    expect(params(sidecar).get("n4")).toContain("frequency=");
    expect(params(sidecar).get("n8")).toContain("frequency=");
  });

  it("the CLI writes every figure kind without error", () => {
    const jobs: Array<[string, string[]]> = [
      ["B-vs-n", [artifact("sweep.csv")]],
      ["S-decay", runFiles],
      ["profile", runFiles],
      ["lemma-frequency", [artifact("lemma.jsonl")]],
    ];
    for (const [kind, inputs] of jobs) {
      const out = `${OUT}${kind}.svg`;
      const rc = main(["--kind", kind, "--out", out, "--site", "1", ...inputs]);
      expect(rc).toBe(0);
      expect(existsSync(out)).toBe(true);
      expect(existsSync(sidecarPath(out))).toBe(true);
      const svg = readFileSync(out, "utf-8");
      expect(svg.startsWith("<svg")).toBe(true);
      expect(svg.trimEnd().endsWith("</svg>")).toBe(true);
    }
  });

  it("re-rendering yields identical sidecar parameters", () => {
    const a = renderFromFiles("B-vs-n", [artifact("sweep.csv")], 1);
    const b = renderFromFiles("B-vs-n", [artifact("sweep.csv")], 1);
    expect(a.sidecar).toBe(b.sidecar);
    expect(a.svg).toBe(b.svg);
  });
});

export { parseSweepCsv, parseSlopeContext, harnessSlope } from "./csv.js";
export { parseRunRecords, parseLemmaRows, saturationByCapacity } from "./jsonl.js";
export { logLeastSquares } from "./fit.js";
export {
  figureBlockageGrowth,
  figureSaturationDecay,
  figureProfile,
  figureLemmaFrequency,
} from "./figures.js";
export { renderFromFiles, sidecarPath } from "./cli.js";

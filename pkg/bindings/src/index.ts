export {
  avacc,
  cba,
  cen,
  confusionMatrix,
  mgm,
  score,
  type LabelArray,
  type MetricScores,
} from "./metrics.js";
export {
  parseCsv,
  resample,
  toCsv,
  type Matrix,
  type ResampleOptions,
  type ResampleResult,
} from "./resample.js";

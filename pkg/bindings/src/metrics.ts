/**
 * Multi-class imbalance metrics over integer label arrays.
 *
 * Numerics match the reference implementation to better than 1e-12: plain
 * float64 arithmetic, recalls of empty classes counted as zero, and the
 * confusion-entropy convention 0 * log(0) = 0 with logarithm base 2(M - 1).
 */

export interface MetricScores {
  avacc: number;
  cba: number;
  mgm: number;
  cen: number;
}

export type LabelArray = ArrayLike<number>;

/** Counts of true class i predicted as class j, row-major M x M. */
export function confusionMatrix(
  yTrue: LabelArray,
  yPred: LabelArray,
  nClasses: number,
): Float64Array {
  if (yTrue.length !== yPred.length) {
    throw new RangeError(
      `label sequences differ in length: ${yTrue.length} vs ${yPred.length}`,
    );
  }
  const mat = new Float64Array(nClasses * nClasses);
  for (let i = 0; i < yTrue.length; i++) {
    const t = yTrue[i];
    const p = yPred[i];
    if (!Number.isInteger(t) || t < 0 || t >= nClasses) {
      throw new RangeError(`y_true holds label ${t} outside 0..${nClasses - 1}`);
    }
    if (!Number.isInteger(p) || p < 0 || p >= nClasses) {
      throw new RangeError(`y_pred holds label ${p} outside 0..${nClasses - 1}`);
    }
    mat[t * nClasses + p] += 1;
  }
  return mat;
}

function rowSum(mat: Float64Array, m: number, i: number): number {
  let s = 0;
  for (let j = 0; j < m; j++) s += mat[i * m + j];
  return s;
}

function colSum(mat: Float64Array, m: number, i: number): number {
  let s = 0;
  for (let j = 0; j < m; j++) s += mat[j * m + i];
  return s;
}

function recalls(mat: Float64Array, m: number): Float64Array {
  const out = new Float64Array(m);
  for (let i = 0; i < m; i++) {
    const row = rowSum(mat, m, i);
    out[i] = row === 0 ? 0 : mat[i * m + i] / row;
  }
  return out;
}

export function avacc(mat: Float64Array, m: number): number {
  const rec = recalls(mat, m);
  let s = 0;
  for (let i = 0; i < m; i++) s += rec[i];
  return s / m;
}

export function cba(mat: Float64Array, m: number): number {
  let s = 0;
  for (let i = 0; i < m; i++) {
    const denom = Math.max(rowSum(mat, m, i), colSum(mat, m, i));
    s += denom === 0 ? 0 : mat[i * m + i] / denom;
  }
  return s / m;
}

export function mgm(mat: Float64Array, m: number): number {
  const rec = recalls(mat, m);
  let product = 1;
  for (let i = 0; i < m; i++) {
    if (rec[i] === 0) return 0;
    product *= rec[i];
  }
  return Math.pow(product, 1 / m);
}

export function cen(mat: Float64Array, m: number): number {
  if (m < 2) {
    throw new RangeError(`confusion entropy needs at least 2 classes, got ${m}`);
  }
  let total = 0;
  for (let i = 0; i < mat.length; i++) total += mat[i];
  if (total === 0) return 0;
  const logBase = Math.log(2 * (m - 1));
  let value = 0;
  for (let i = 0; i < m; i++) {
    const mass = rowSum(mat, m, i) + colSum(mat, m, i);
    if (mass === 0) continue;
    const pI = mass / (2 * total);
    let ent = 0;
    for (let j = 0; j < m; j++) {
      if (j === i) continue;
      for (const numer of [mat[i * m + j], mat[j * m + i]]) {
        const q = numer / mass;
        if (q > 0) ent -= (q * Math.log(q)) / logBase;
      }
    }
    value += pI * ent;
  }
  return value;
}

/** All four metrics for one prediction batch. */
export function score(yTrue: LabelArray, yPred: LabelArray, nClasses: number): MetricScores {
  const mat = confusionMatrix(yTrue, yPred, nClasses);
  return {
    avacc: avacc(mat, nClasses),
    cba: cba(mat, nClasses),
    mgm: mgm(mat, nClasses),
    cen: cen(mat, nClasses),
  };
}

"""Multi-class imbalance metrics over confusion matrices.

All four scores treat each class symmetrically: average accuracy and the
multi-class G-measure aggregate per-class recalls arithmetically and
geometrically, class balance accuracy divides each diagonal entry by the
larger of its row and column sums, and confusion entropy measures how
misclassification mass spreads across class pairs (0 for a perfect
classifier, larger is worse).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import McccrError


@dataclass
class MetricReport:
    avacc: float
    cba: float
    mgm: float
    cen: float
    warnings: list[str] = field(default_factory=list)

    def as_dict(self) -> dict:
        return {
            "avacc": self.avacc,
            "cba": self.cba,
            "mgm": self.mgm,
            "cen": self.cen,
            "warnings": list(self.warnings),
        }


def confusion_matrix(y_true, y_pred, n_classes: int) -> np.ndarray:
    """Counts of true class i predicted as class j, shape (M, M)."""
    y_true = np.asarray(y_true, dtype=np.int64)
    y_pred = np.asarray(y_pred, dtype=np.int64)
    if y_true.shape != y_pred.shape:
        raise McccrError(
            f"label sequences differ in length: {len(y_true)} vs {len(y_pred)}"
        )
    for name, arr in (("y_true", y_true), ("y_pred", y_pred)):
        if len(arr) and (arr.min() < 0 or arr.max() >= n_classes):
            raise McccrError(
                f"{name} holds label {arr[np.argmax((arr < 0) | (arr >= n_classes))]} "
                f"outside 0..{n_classes - 1}"
            )
    mat = np.zeros((n_classes, n_classes), dtype=np.int64)
    np.add.at(mat, (y_true, y_pred), 1)
    return mat


def _recalls(mat: np.ndarray, warn: list[str] | None = None) -> np.ndarray:
    rows = mat.sum(axis=1)
    empty = rows == 0
    if warn is not None:
        for c in np.flatnonzero(empty):
            warn.append(f"class {c} has no true instances; recall counted as 0")
    with np.errstate(divide="ignore", invalid="ignore"):
        rec = np.where(empty, 0.0, np.diag(mat) / np.where(empty, 1, rows))
    return rec


def avacc(mat: np.ndarray) -> float:
    """Arithmetic mean of per-class recalls."""
    return float(_recalls(np.asarray(mat)).mean())


def cba(mat: np.ndarray) -> float:
    """Mean of diagonal counts over the larger of row and column sums."""
    mat = np.asarray(mat)
    rows = mat.sum(axis=1)
    cols = mat.sum(axis=0)
    denom = np.maximum(rows, cols)
    empty = denom == 0
    with np.errstate(divide="ignore", invalid="ignore"):
        terms = np.where(empty, 0.0, np.diag(mat) / np.where(empty, 1, denom))
    return float(terms.mean())


def mgm(mat: np.ndarray) -> float:
    """Geometric mean of per-class recalls; zero if any class is never hit."""
    rec = _recalls(np.asarray(mat))
    if (rec == 0).any():
        return 0.0
    return float(np.prod(rec) ** (1.0 / len(rec)))


def cen(mat: np.ndarray) -> float:
    """Confusion entropy with logarithm base 2(M-1); 0*log(0) counts as 0."""
    mat = np.asarray(mat, dtype=np.float64)
    m = mat.shape[0]
    if m < 2:
        raise McccrError(f"confusion entropy needs at least 2 classes, got {m}")
    total = mat.sum()
    if total == 0:
        return 0.0
    log_base = math.log(2 * (m - 1))
    # per-class mass: row plus column sums (the diagonal enters twice)
    mass = mat.sum(axis=1) + mat.sum(axis=0)
    value = 0.0
    for i in range(m):
        if mass[i] == 0:
            continue
        p_i = mass[i] / (2.0 * total)
        ent = 0.0
        for j in range(m):
            if j == i:
                continue
            for q in (mat[i, j] / mass[i], mat[j, i] / mass[i]):
                if q > 0:
                    ent -= q * math.log(q) / log_base
        value += p_i * ent
    return float(value)


def score(y_true, y_pred, n_classes: int) -> MetricReport:
    """All four metrics plus empty-class warnings for one prediction batch."""
    mat = confusion_matrix(y_true, y_pred, n_classes)
    warn: list[str] = []
    rec = _recalls(mat, warn)
    rows = mat.sum(axis=1)
    cols = mat.sum(axis=0)
    denom = np.maximum(rows, cols)
    empty = denom == 0
    with np.errstate(divide="ignore", invalid="ignore"):
        cba_terms = np.where(empty, 0.0, np.diag(mat) / np.where(empty, 1, denom))
    return MetricReport(
        avacc=float(rec.mean()),
        cba=float(cba_terms.mean()),
        mgm=0.0 if (rec == 0).any() else float(np.prod(rec) ** (1.0 / len(rec))),
        cen=cen(mat),
        warnings=warn,
    )


def mean_ranks(scores: np.ndarray, higher_is_better: bool = True) -> np.ndarray:
    """Average per-dataset ranks of each method (1 = best, ties averaged).

    ``scores`` is a (datasets x methods) matrix with no NaNs.
    """
    scores = np.asarray(scores, dtype=np.float64)
    if np.isnan(scores).any():
        raise McccrError("scores must not contain NaN")
    if scores.ndim != 2:
        raise McccrError(f"scores must be 2-D, got shape {scores.shape}")
    keyed = -scores if higher_is_better else scores
    n_datasets, n_methods = keyed.shape
    ranks = np.zeros_like(keyed)
    for d in range(n_datasets):
        row = keyed[d]
        order = np.argsort(row, kind="stable")
        rank_row = np.empty(n_methods)
        pos = 0
        while pos < n_methods:
            end = pos
            while end + 1 < n_methods and row[order[end + 1]] == row[order[pos]]:
                end += 1
            rank_row[order[pos:end + 1]] = (pos + end) / 2.0 + 1.0
            pos = end + 1
        ranks[d] = rank_row
    return ranks.mean(axis=0)

"""Stratified cross-validation folds."""

from __future__ import annotations

import warnings

import numpy as np

from .datasets import LabeledDataset
from .errors import McccrError


def stratified_folds(dataset: LabeledDataset, k: int, rng) -> list[tuple[np.ndarray, np.ndarray]]:
    """Partition row indices into k folds with per-class counts differing by
    at most one across folds. Returns (train_indices, test_indices) pairs.
    """
    if k < 2:
        raise McccrError(f"fold count must be >= 2, got {k}")
    if k > dataset.n:
        raise McccrError(f"cannot make {k} folds out of {dataset.n} instances")
    assignment = np.empty(dataset.n, dtype=np.int64)
    offset = 0
    for cls in range(dataset.n_classes):
        idx = np.flatnonzero(dataset.labels == cls)
        if len(idx) == 0:
            continue
        if len(idx) < k:
            warnings.warn(
                f"class {dataset.label_name(cls)} has {len(idx)} instances, fewer than "
                f"{k} folds; it will be absent from some test folds"
            )
        shuffled = idx[rng.permutation(len(idx))]
        # rotate the starting fold per class so remainders spread out
        assignment[shuffled] = (offset + np.arange(len(idx))) % k
        offset += len(idx)
    folds = []
    everything = np.arange(dataset.n)
    for f in range(k):
        test = everything[assignment == f]
        train = everything[assignment != f]
        folds.append((train, test))
    return folds

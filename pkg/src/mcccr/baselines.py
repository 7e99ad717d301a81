"""SMOTE and its round-robin multi-class application, the comparison anchor."""

from __future__ import annotations

import warnings

import numpy as np

from .core import distance_matrix, oversampling_target
from .datasets import LabeledDataset, merged_with_synthetic
from .errors import McccrError
from .multiclass import order_classes


def smote(minority: np.ndarray, k: int, count: int, rng) -> np.ndarray:
    """Interpolated synthetic instances from within-class nearest neighbors.

    Each point is x + u * (nn - x) for a uniformly drawn seed x, a uniformly
    drawn member nn of x's k nearest neighbors (k clamped to the class size
    minus one), and u uniform on (0, 1).
    """
    minority = np.atleast_2d(np.asarray(minority, dtype=np.float64))
    n = len(minority)
    if n < 2:
        raise McccrError(f"smote needs at least 2 minority instances, got {n}")
    if k < 1:
        raise McccrError(f"neighbor count must be >= 1, got {k}")
    if count == 0:
        return np.zeros((0, minority.shape[1]))
    k_eff = min(k, n - 1)
    dist = distance_matrix(minority, minority, 2.0)
    np.fill_diagonal(dist, np.inf)
    # ties by lower index, matching the stable argsort order
    neighbors = np.argsort(dist, axis=1, kind="stable")[:, :k_eff]

    seeds = rng.integers(0, n, size=count)
    picks = rng.integers(0, k_eff, size=count)
    u = rng.random(count)
    base = minority[seeds]
    partner = minority[neighbors[seeds, picks]]
    return base + u[:, None] * (partner - base)


def smote_all(dataset: LabeledDataset, k: int, ratio, rng) -> LabeledDataset:
    """Oversample every outnumbered class independently toward the target.

    Original rows are never moved or removed. Classes with fewer than two
    instances cannot be interpolated and are skipped; their names are listed
    in the returned dataset's ``skipped_classes`` attribute.
    """
    counts = dataset.class_counts()
    ordering = order_classes(dataset)
    majority_count = int(counts[ordering[0]])
    synth_rows = []
    synth_labels = []
    skipped = []
    for cls in ordering:
        cls = int(cls)
        if counts[cls] == 0 or counts[cls] == majority_count:
            continue
        target = oversampling_target(majority_count, int(counts[cls]), ratio)
        if target <= 0:
            continue
        if counts[cls] < 2:
            skipped.append(cls)
            warnings.warn(
                f"class {dataset.label_name(cls)} has a single instance; "
                "skipping interpolation-based oversampling"
            )
            continue
        new = smote(dataset.features[dataset.labels == cls], k, target, rng)
        synth_rows.append(new)
        synth_labels.append(np.full(target, cls, dtype=np.int64))
    features = np.vstack(synth_rows) if synth_rows else np.zeros((0, dataset.n_features))
    labels = np.concatenate(synth_labels) if synth_labels else np.zeros(0, dtype=np.int64)
    out = merged_with_synthetic(dataset, features, labels)
    out.skipped_classes = skipped
    return out

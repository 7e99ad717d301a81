"""Multi-class decomposition around the binary cleaning-and-resampling core.

Classes are processed from largest to smallest. Each class in turn becomes
the minority against a combined majority assembled from the classes that
outnumber it: either an even quota sampled from each (``sampling``) or their
union (``complete``). Cleaned positions are written back to the sampled
source rows, and synthetic rows join their class for later iterations.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import CleaningConfig, ccr_pipeline, oversampling_target
from .datasets import LabeledDataset
from .errors import McccrError

DECOMPOSITION_METHODS = ("sampling", "complete")


@dataclass
class McConfig(CleaningConfig):
    decomposition: str = "sampling"

    def __post_init__(self):
        super().__post_init__()
        if self.decomposition not in DECOMPOSITION_METHODS:
            raise McccrError(
                f"decomposition must be one of {DECOMPOSITION_METHODS}, "
                f"got {self.decomposition!r}"
            )


def order_classes(dataset: LabeledDataset) -> np.ndarray:
    """Class ids sorted by descending count, ties by ascending id."""
    counts = dataset.class_counts()
    ids = np.arange(dataset.n_classes)
    return ids[np.lexsort((ids, -counts))]


def _quota_sample(pools: list[np.ndarray], quota: int, method: str, rng) -> list[np.ndarray]:
    """Row-id selections per preceding class.

    A quota at or above the pool size takes the whole pool without touching
    the generator, so a two-class problem consumes the same stream as the
    binary resampler alone.
    """
    picks = []
    for pool in pools:
        if method == "complete" or quota >= len(pool):
            picks.append(pool)
        else:
            chosen = rng.choice(len(pool), size=quota, replace=False)
            picks.append(pool[np.sort(chosen)])
    return picks


def build_combined_majority(dataset: LabeledDataset, target_class: int,
                            ordering, method: str, rng) -> np.ndarray:
    """Feature rows of the combined majority faced by ``target_class``.

    Preceding classes are those with strictly more instances; under
    ``sampling`` each contributes floor(largest/n_classes) rows without
    replacement (clamped to its size), under ``complete`` all of them.
    """
    if method not in DECOMPOSITION_METHODS:
        raise McccrError(f"unknown decomposition method {method!r}")
    ordering = np.asarray(ordering)
    counts = dataset.class_counts()
    n_classes = int((counts > counts[target_class]).sum())
    if n_classes == 0:
        return np.zeros((0, dataset.n_features))
    pools = [np.flatnonzero(dataset.labels == c) for c in ordering[:n_classes]]
    quota = int(counts[ordering[0]]) // n_classes
    picks = _quota_sample(pools, quota, method, rng)
    return dataset.features[np.concatenate(picks)]


def mc_ccr(dataset: LabeledDataset, config: McConfig) -> LabeledDataset:
    """Resample every outnumbered class in descending-count order.

    Returns the dataset with synthetic rows appended (flagged in the
    ``synthetic`` mask), cleaned majority positions written back in place,
    and rows dropped under the removal strategy.
    """
    counts = dataset.class_counts()
    if (counts > 0).sum() < 2:
        raise McccrError("resampling needs at least 2 non-empty classes")
    ordering = order_classes(dataset)
    rng = np.random.default_rng(config.seed)

    rows = dataset.features.copy()
    labels = list(dataset.labels)
    alive = np.ones(len(rows), dtype=bool)
    synthetic = [False] * len(rows)
    # members per class as global row ids, originals first then synthetics
    members = {c: list(np.flatnonzero(dataset.labels == c)) for c in range(dataset.n_classes)}
    largest = int(ordering[0])

    def alive_members(c):
        return np.array([r for r in members[c] if alive[r]], dtype=np.int64)

    for cls in ordering:
        cls = int(cls)
        n_higher = int((counts > counts[cls]).sum())
        if n_higher == 0 or counts[cls] == 0:
            continue
        minority_ids = alive_members(cls)
        pools = [alive_members(int(c)) for c in ordering[:n_higher]]
        largest_count = len(alive_members(largest))
        quota = largest_count // n_higher
        picks = _quota_sample(pools, quota, config.decomposition, rng)
        majority_ids = np.concatenate(picks) if picks else np.zeros(0, dtype=np.int64)

        target = oversampling_target(
            largest_count, len(minority_ids), config.oversampling_ratio
        )
        result = ccr_pipeline(rows[majority_ids], rows[minority_ids], config, rng,
                              target=target)
        if config.cleaning_strategy == "translation":
            rows[majority_ids] = result.cleaned_majority
        elif config.cleaning_strategy == "removal":
            alive[majority_ids[~result.kept]] = False
        if len(result.synthetic_minority):
            start = len(rows)
            rows = np.vstack([rows, result.synthetic_minority])
            alive = np.concatenate([alive, np.ones(len(result.synthetic_minority), bool)])
            new_ids = range(start, start + len(result.synthetic_minority))
            members[cls].extend(new_ids)
            labels.extend([cls] * len(result.synthetic_minority))
            synthetic.extend([True] * len(result.synthetic_minority))

    keep = np.flatnonzero(alive)
    return LabeledDataset(
        rows[keep],
        np.asarray(labels, dtype=np.int64)[keep],
        class_names=dataset.class_names,
        n_classes=dataset.n_classes,
        synthetic=np.asarray(synthetic, dtype=bool)[keep],
    )

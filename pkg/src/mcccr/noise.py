"""Uniform label-noise injection for robustness experiments."""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .datasets import LabeledDataset
from .errors import McccrError


@dataclass
class NoiseSpec:
    level: float
    affected_classes: tuple[int, ...] | None = None   # None = every class eligible
    seed: int | None = None

    def __post_init__(self):
        if not 0.0 <= self.level <= 1.0:
            raise McccrError(f"noise level must lie in [0, 1], got {self.level}")
        if self.affected_classes is not None:
            self.affected_classes = tuple(sorted(int(c) for c in self.affected_classes))


def inject_noise(dataset: LabeledDataset, spec: NoiseSpec):
    """Replace labels of a uniformly chosen eligible subset.

    Exactly floor(level * n_eligible) instances are drawn without replacement
    from the eligible pool; each gets a uniformly chosen different class id.
    Returns the noisy dataset and the flipped row indices.
    """
    if dataset.n_classes < 2:
        raise McccrError("label noise needs at least 2 classes to flip between")
    if spec.seed is None:
        raise McccrError("NoiseSpec.seed must be set before injection")
    if spec.affected_classes is not None:
        bad = [c for c in spec.affected_classes if not 0 <= c < dataset.n_classes]
        if bad:
            raise McccrError(f"affected classes {bad} outside 0..{dataset.n_classes - 1}")
        eligible = np.flatnonzero(np.isin(dataset.labels, spec.affected_classes))
    else:
        eligible = np.arange(dataset.n)
    n_flips = int(np.floor(spec.level * len(eligible)))
    if n_flips == 0:
        return replace(dataset, labels=dataset.labels.copy()), np.zeros(0, dtype=np.int64)

    rng = np.random.default_rng(spec.seed)
    flipped = np.sort(eligible[rng.choice(len(eligible), size=n_flips, replace=False)])
    labels = dataset.labels.copy()
    # uniform over the M-1 remaining ids: draw in 0..M-2 and skip the original
    draws = rng.integers(0, dataset.n_classes - 1, size=n_flips)
    labels[flipped] = np.where(draws >= labels[flipped], draws + 1, draws)
    return replace(dataset, labels=labels), flipped

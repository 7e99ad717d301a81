"""k-nearest-neighbor reference classifier with deterministic tie handling."""

from __future__ import annotations

import numpy as np

from .core import distance_matrix
from .datasets import LabeledDataset
from .errors import McccrError


def knn_classify(train: LabeledDataset, test_features, k: int, p: float = 2.0) -> np.ndarray:
    """Majority vote among the k nearest training instances.

    Equal distances rank by lower training index; vote ties go to the class
    with the smaller mean distance among its voting neighbors, then to the
    lower class id.
    """
    if train.n == 0:
        raise McccrError("training set is empty")
    if k < 1:
        raise McccrError(f"neighbor count must be >= 1, got {k}")
    test_features = np.atleast_2d(np.asarray(test_features, dtype=np.float64))
    if test_features.shape[1] != train.n_features:
        raise McccrError(
            f"test features have {test_features.shape[1]} columns, "
            f"train has {train.n_features}"
        )
    k_eff = min(k, train.n)
    dist = distance_matrix(test_features, train.features, p)
    order = np.argsort(dist, axis=1, kind="stable")[:, :k_eff]
    out = np.empty(len(test_features), dtype=np.int64)
    for t in range(len(test_features)):
        nbrs = order[t]
        votes = np.bincount(train.labels[nbrs], minlength=train.n_classes)
        top = votes.max()
        tied = np.flatnonzero(votes == top)
        if len(tied) == 1:
            out[t] = tied[0]
            continue
        nbr_dists = dist[t, nbrs]
        nbr_labels = train.labels[nbrs]
        means = np.array([nbr_dists[nbr_labels == c].mean() for c in tied])
        out[t] = tied[np.argmin(means)]   # argmin keeps the lowest id on ties
    return out

"""Synthetic benchmarks shaped like common KEEL multi-class datasets.

Each generator reproduces a published dataset's row count, feature count,
class count, and class distribution. The geometry stresses the failure
modes these benchmarks are known for: the largest class forms a broad
background distribution, the remaining classes form tight clusters inside
its support, and every such cluster is contaminated with background points
drawn from the cluster's own distribution (borderline instances that a
plain nearest-neighbor vote cannot separate).
"""

from __future__ import annotations

import hashlib

import numpy as np

from .datasets import LabeledDataset

SHAPES: dict[str, dict] = {
    # name: class distribution and feature count of the dataset being
    # mirrored, plus the overlap controls
    "wine_like": dict(counts=[59, 71, 48], m=13, placement=1.0,
                      cluster_scale=0.45, contamination=0.9),
    "newthyroid_like": dict(counts=[150, 35, 30], m=5, placement=1.0,
                            cluster_scale=0.45, contamination=0.95),
    "hayesroth_like": dict(counts=[65, 64, 31], m=4, placement=1.1,
                           cluster_scale=0.4, contamination=0.9),
    "glass_like": dict(counts=[70, 76, 17, 13, 9, 29], m=9, placement=0.95,
                       cluster_scale=0.45, contamination=1.2),
    "balance_like": dict(counts=[288, 49, 288], m=4, placement=1.1,
                         cluster_scale=0.4, contamination=0.9),
    "ecoli_like": dict(counts=[143, 77, 2, 2, 35, 20, 5, 52], m=7, placement=1.1,
                       cluster_scale=0.45, contamination=0.9),
}


def make_imbalanced_blobs(counts, m, seed=0, placement=1.1, cluster_scale=0.4,
                          contamination=0.7, max_intruder_share=0.55) -> LabeledDataset:
    """Mixture with the given per-class counts in m dimensions.

    The largest class is a unit-scale background blob at the origin. Every
    other class becomes one or two clusters of width ``cluster_scale`` at
    radius ``placement * sqrt(m)``, and receives background interlopers
    drawn from the same cluster (``contamination`` per cluster instance,
    capped at ``max_intruder_share`` of the background class).
    """
    rng = np.random.default_rng(seed)
    counts = [int(c) for c in counts]
    majority = int(np.argmax(counts))

    clusters = []   # (class id, center, size)
    for cls, count in enumerate(counts):
        if cls == majority or count == 0:
            continue
        n_clusters = 2 if count >= 40 else 1
        for chunk in np.array_split(np.arange(count), n_clusters):
            direction = rng.standard_normal(m)
            direction /= np.linalg.norm(direction)
            center = direction * placement * np.sqrt(m) * rng.uniform(0.85, 1.15)
            clusters.append((cls, center, len(chunk)))

    # hand the interloper budget to the smallest clusters first: they are
    # the cheapest to overwhelm and the ones borderline noise hits hardest
    intruders = [0] * len(clusters)
    budget = int(max_intruder_share * counts[majority])
    for idx in np.argsort([size for _, _, size in clusters], kind="stable"):
        want = int(round(contamination * min(clusters[idx][2], 60)))
        take = min(want, budget)
        intruders[idx] = take
        budget -= take

    rows, labels = [], []
    for cls, center, size in clusters:
        rows.append(center + rng.normal(0, cluster_scale, size=(size, m)))
        labels.extend([cls] * size)
    for (cls, center, size), k in zip(clusters, intruders):
        if k:
            rows.append(center + rng.normal(0, cluster_scale, size=(k, m)))
            labels.extend([majority] * k)
    bulk = counts[majority] - sum(intruders)
    rows.append(rng.normal(0, 1.0, size=(bulk, m)))
    labels.extend([majority] * bulk)

    names = [f"c{c}" for c in range(len(counts))]
    return LabeledDataset(np.vstack(rows), np.array(labels), class_names=names,
                          n_classes=len(counts))


def make_benchmark(name: str, seed: int | None = None) -> LabeledDataset:
    if name not in SHAPES:
        raise KeyError(f"unknown benchmark shape {name!r}; choose from {sorted(SHAPES)}")
    shape = SHAPES[name]
    if seed is None:
        digest = hashlib.blake2b(name.encode(), digest_size=4).digest()
        seed = int.from_bytes(digest, "big")
    return make_imbalanced_blobs(
        shape["counts"], shape["m"], seed=seed,
        placement=shape.get("placement", 1.1),
        cluster_scale=shape.get("cluster_scale", 0.4),
        contamination=shape.get("contamination", 0.7),
    )

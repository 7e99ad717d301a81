"""Binary combined cleaning and resampling.

The resampler grows a sphere around every minority instance under a fixed
energy budget: expanding the radius costs one energy unit per unit radius,
multiplied by one plus the number of majority instances already swallowed.
Majority instances caught inside a sphere are pushed to its surface (or
removed, or left alone), and synthetic minority instances are then sampled
inside the spheres, preferring the small ones.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy.spatial.distance import cdist

from .errors import DegenerateGeometry, DimensionMismatch, McccrError

CLEANING_STRATEGIES = ("translation", "removal", "ignoring")
SELECTION_STRATEGIES = ("proportional", "random")

# below this distance a majority instance counts as coincident with the
# sphere center and is pushed along a random direction instead
COINCIDENT_EPS = 1e-12

# radii are clamped to this fraction of the mean minority-majority distance
# before inversion in the generation weights
RADIUS_CLAMP_FRACTION = 1e-6


@dataclass
class CleaningConfig:
    """Parameters of the binary resampler."""

    energy: float
    p: float = 2.0
    cleaning_strategy: str = "translation"
    selection_strategy: str = "proportional"
    oversampling_ratio: float | str = "balance"
    seed: int = 0

    def __post_init__(self):
        if not self.energy > 0:
            raise McccrError(f"energy must be positive, got {self.energy}")
        if not self.p >= 1:
            raise McccrError(f"norm order p must be >= 1, got {self.p}")
        if self.cleaning_strategy not in CLEANING_STRATEGIES:
            raise McccrError(
                f"cleaning_strategy must be one of {CLEANING_STRATEGIES}, "
                f"got {self.cleaning_strategy!r}"
            )
        if self.selection_strategy not in SELECTION_STRATEGIES:
            raise McccrError(
                f"selection_strategy must be one of {SELECTION_STRATEGIES}, "
                f"got {self.selection_strategy!r}"
            )
        if self.oversampling_ratio != "balance" and not float(self.oversampling_ratio) > 0:
            raise McccrError(
                f"oversampling_ratio must be positive or 'balance', got {self.oversampling_ratio}"
            )


@dataclass
class BinarySplit:
    majority: np.ndarray   # (n_maj, m)
    minority: np.ndarray   # (n_min, m), n_min >= 1

    def __post_init__(self):
        self.majority = np.atleast_2d(np.asarray(self.majority, dtype=np.float64))
        self.minority = np.atleast_2d(np.asarray(self.minority, dtype=np.float64))
        if self.majority.size == 0:
            self.majority = self.majority.reshape(0, self.minority.shape[1])
        if len(self.minority) < 1:
            raise McccrError("minority collection must hold at least one instance")
        if self.majority.shape[1] != self.minority.shape[1]:
            raise DimensionMismatch(self.majority.shape[1], self.minority.shape[1])
        for name, arr in (("majority", self.majority), ("minority", self.minority)):
            if arr.size and not np.isfinite(arr).all():
                raise McccrError(f"{name} features contain NaN or infinity")


class CleaningResult(NamedTuple):
    cleaned_majority: np.ndarray   # post-strategy majority collection
    translations: np.ndarray       # (n_maj, m), zero rows for untouched instances
    kept: np.ndarray               # (n_maj,) bool, False only under removal


@dataclass
class BinaryCcrResult:
    cleaned_majority: np.ndarray
    synthetic_minority: np.ndarray
    radii: np.ndarray
    translations: np.ndarray
    kept: np.ndarray
    counts: np.ndarray             # synthetic instances generated per minority seed


def pnorm_distance(a, b, p: float) -> float:
    """Minkowski distance between two equally sized feature vectors."""
    a = np.asarray(a, dtype=np.float64).ravel()
    b = np.asarray(b, dtype=np.float64).ravel()
    if a.shape != b.shape:
        raise DimensionMismatch(len(a), len(b))
    if not p >= 1:
        raise McccrError(f"norm order p must be >= 1, got {p}")
    return float(np.sum(np.abs(a - b) ** p) ** (1.0 / p))


def distance_matrix(a: np.ndarray, b: np.ndarray, p: float) -> np.ndarray:
    if len(a) == 0 or len(b) == 0:
        return np.zeros((len(a), len(b)))
    if p == 2:
        return cdist(a, b)
    return cdist(a, b, metric="minkowski", p=p)


def _expand_from_sorted(sorted_distances: np.ndarray, energy: float) -> float:
    """Radius reached by the budgeted expansion over pre-sorted distances.

    The cost of fully absorbing the j-th closest instance (1-based) is
    C_j = j*d_j - sum(d_1..d_{j-1}); expansion proceeds while the budget
    strictly exceeds C_j, then spends the remainder at rate j+1. Budget left
    over after the last instance is discarded.
    """
    d = sorted_distances
    n = len(d)
    if n == 0:
        return float(energy)
    j = np.arange(1, n + 1)
    prefix = np.cumsum(d)
    cost = j * d - (prefix - d)
    jstar = int(np.searchsorted(cost, energy, side="left"))
    if jstar == n:
        return float(d[-1])
    d_prev = float(d[jstar - 1]) if jstar else 0.0
    c_prev = float(cost[jstar - 1]) if jstar else 0.0
    return d_prev + (energy - c_prev) / (jstar + 1)


def expand_sphere(center, majority, energy: float, p: float = 2.0):
    """Grow one cleaning sphere; returns (radius, ascending distances).

    With no majority instances the whole budget converts at unit cost and the
    radius equals the energy.
    """
    if not energy > 0:
        raise McccrError(f"energy must be positive, got {energy}")
    center = np.atleast_2d(np.asarray(center, dtype=np.float64))
    majority = np.asarray(majority, dtype=np.float64)
    if majority.size == 0:
        return float(energy), np.zeros(0)
    majority = np.atleast_2d(majority)
    if majority.shape[1] != center.shape[1]:
        raise DimensionMismatch(majority.shape[1], center.shape[1])
    d = np.sort(distance_matrix(center, majority, p)[0], kind="stable")
    return _expand_from_sorted(d, energy), d


def expand_spheres(distances: np.ndarray, energy: float) -> np.ndarray:
    """Vectorized expansion over a (n_min, n_maj) distance matrix."""
    n_min, n_maj = distances.shape
    if n_maj == 0:
        return np.full(n_min, float(energy))
    d = np.sort(distances, axis=1, kind="stable")
    j = np.arange(1, n_maj + 1)
    prefix = np.cumsum(d, axis=1)
    cost = j * d - (prefix - d)
    jstar = (cost < energy).sum(axis=1)
    d_prev = np.where(jstar > 0, d[np.arange(n_min), jstar - 1], 0.0)
    c_prev = np.where(jstar > 0, cost[np.arange(n_min), jstar - 1], 0.0)
    partial = d_prev + (energy - c_prev) / (jstar + 1)
    return np.where(jstar == n_maj, d[:, -1], partial)


def _clean(majority, minority, radii, distances, strategy, rng, p) -> CleaningResult:
    n_maj, m = majority.shape
    translations = np.zeros((n_maj, m))
    kept = np.ones(n_maj, dtype=bool)
    if n_maj == 0 or strategy == "ignoring":
        return CleaningResult(majority.copy(), translations, kept)

    inside = distances < radii[:, None]
    if strategy == "removal":
        kept = ~inside.any(axis=0)
        return CleaningResult(majority[kept], translations, kept)

    # translation: displacements accumulate against the original positions
    # and are applied in one batch at the end
    coincident = inside & (distances < COINCIDENT_EPS)
    regular = inside & ~coincident
    with np.errstate(divide="ignore", invalid="ignore"):
        w = np.where(regular, (radii[:, None] - distances) / distances, 0.0)
    translations = w.sum(axis=0)[:, None] * majority - w.T @ minority
    if coincident.any():
        for i, j in np.argwhere(coincident):
            direction = rng.standard_normal(m)
            norm = np.sum(np.abs(direction) ** p) ** (1.0 / p)
            while norm < 1e-300:
                direction = rng.standard_normal(m)
                norm = np.sum(np.abs(direction) ** p) ** (1.0 / p)
            translations[j] += radii[i] * direction / norm
    return CleaningResult(majority + translations, translations, kept)


def clean_majority(split: BinarySplit, radii, strategy: str, rng,
                   p: float = 2.0) -> CleaningResult:
    """Apply one cleaning strategy given per-minority sphere radii."""
    if strategy not in CLEANING_STRATEGIES:
        raise McccrError(f"unknown cleaning strategy {strategy!r}")
    radii = np.asarray(radii, dtype=np.float64)
    if len(radii) != len(split.minority):
        raise McccrError(
            f"got {len(radii)} radii for {len(split.minority)} minority instances"
        )
    distances = distance_matrix(split.minority, split.majority, p)
    return _clean(split.majority, split.minority, radii, distances, strategy, rng, p)


def oversampling_target(n_maj: int, n_min: int, ratio) -> int:
    """Synthetic instances to add: up to balance, or ratio% of the class size.

    Explicit ratios are capped so the class never overtakes the majority;
    negative balance targets clamp to zero.
    """
    gap = max(0, n_maj - n_min)
    if ratio == "balance":
        return gap
    return min(int(math.floor(float(ratio) / 100.0 * n_min)), gap)


def generation_counts(radii, n_maj: int, n_min: int, ratio, selection: str, rng,
                      target: int | None = None) -> np.ndarray:
    """Per-seed synthetic counts g_i.

    Proportional selection weights each seed by the inverse of its sphere
    radius (normalized) and floors the product with the total target G, so
    sum(g) <= G. Random selection distributes exactly G draws uniformly.
    """
    radii = np.asarray(radii, dtype=np.float64)
    if len(radii) != n_min:
        raise McccrError(f"got {len(radii)} radii for n_min={n_min}")
    if (radii < 0).any():
        raise McccrError("sphere radii must be non-negative")
    if selection not in SELECTION_STRATEGIES:
        raise McccrError(f"unknown selection strategy {selection!r}")
    G = oversampling_target(n_maj, n_min, ratio) if target is None else int(target)
    if G <= 0:
        return np.zeros(n_min, dtype=np.int64)
    if n_min == 0:
        return np.zeros(0, dtype=np.int64)
    if selection == "random":
        return rng.multinomial(G, np.full(n_min, 1.0 / n_min)).astype(np.int64)
    if not (radii > 0).any():
        raise DegenerateGeometry(
            "all cleaning spheres have zero radius; inverse-radius weights are undefined"
        )
    zero = radii == 0
    if zero.any():
        # limit of the inverse-radius weighting: mass concentrates on the
        # collapsed spheres, split evenly among them
        weights = zero / zero.sum()
    else:
        inv = 1.0 / radii
        weights = inv / inv.sum()
    return np.floor(weights * G).astype(np.int64)


def sample_in_sphere(radius: float, count: int, m: int, rng, p: float = 2.0) -> np.ndarray:
    """Uniform points in a zero-centered p-norm ball of the given radius."""
    if count == 0:
        return np.zeros((0, m))
    if p == 2:
        g = rng.standard_normal((count, m))
        norms = np.linalg.norm(g, axis=1, keepdims=True)
        bad = norms[:, 0] < 1e-300
        while bad.any():
            g[bad] = rng.standard_normal((bad.sum(), m))
            norms = np.linalg.norm(g, axis=1, keepdims=True)
            bad = norms[:, 0] < 1e-300
        scale = radius * rng.random(count) ** (1.0 / m)
        return g / norms * scale[:, None]
    # rejection from the bounding box; acceptance degrades for p << 2 in
    # high dimension, which the grids here never exercise
    out = np.zeros((count, m))
    have = 0
    while have < count:
        batch = max(2 * (count - have), 32)
        candidates = rng.uniform(-radius, radius, size=(batch, m))
        ok = np.sum(np.abs(candidates) ** p, axis=1) ** (1.0 / p) <= radius
        accepted = candidates[ok]
        take = min(len(accepted), count - have)
        out[have:have + take] = accepted[:take]
        have += take
    return out


def synthesize(seed_instance, radius: float, count: int, rng, p: float = 2.0) -> np.ndarray:
    """Sample ``count`` synthetic instances inside the seed's sphere."""
    seed_instance = np.asarray(seed_instance, dtype=np.float64).ravel()
    if count < 0:
        raise McccrError(f"count must be non-negative, got {count}")
    if count and not radius > 0:
        raise McccrError(f"radius must be positive to synthesize, got {radius}")
    return seed_instance + sample_in_sphere(radius, count, len(seed_instance), rng, p)


def clamp_radii(radii: np.ndarray, distances: np.ndarray) -> np.ndarray:
    """Floor collapsed radii at a small fraction of the mean pairwise distance."""
    if distances.size == 0:
        return radii
    floor = RADIUS_CLAMP_FRACTION * float(distances.mean())
    return np.maximum(radii, floor)


def ccr_pipeline(majority: np.ndarray, minority: np.ndarray, config: CleaningConfig,
                 rng, target: int | None = None) -> BinaryCcrResult:
    """Expansion, cleaning, and generation against an already-built split.

    Consumes the generator in a fixed order (cleaning, seed selection,
    synthesis by minority index) so identical inputs and seeds give identical
    outputs regardless of the caller.
    """
    distances = distance_matrix(minority, majority, config.p)
    radii = expand_spheres(distances, config.energy)
    cleaning = _clean(majority, minority, radii, distances, config.cleaning_strategy, rng,
                      config.p)
    radii_for_counts = clamp_radii(radii, distances)
    counts = generation_counts(
        radii_for_counts, len(majority), len(minority), config.oversampling_ratio,
        config.selection_strategy, rng, target=target,
    )
    chunks = []
    for i in np.flatnonzero(counts):
        chunks.append(
            minority[i] + sample_in_sphere(
                float(radii_for_counts[i]), int(counts[i]), minority.shape[1], rng, config.p
            )
        )
    synthetic = np.vstack(chunks) if chunks else np.zeros((0, minority.shape[1]))
    return BinaryCcrResult(
        cleaned_majority=cleaning.cleaned_majority,
        synthetic_minority=synthetic,
        radii=radii,
        translations=cleaning.translations,
        kept=cleaning.kept,
        counts=counts,
    )


def binary_ccr(split: BinarySplit, config: CleaningConfig) -> BinaryCcrResult:
    """Run the full binary pipeline; synthetic instances are returned
    separately from the original minority and the caller merges them."""
    rng = np.random.default_rng(config.seed)
    return ccr_pipeline(split.majority, split.minority, config, rng)

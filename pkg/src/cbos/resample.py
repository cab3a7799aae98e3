"""Clustering based oversampling (CBOS).

Pipeline for a binary training set:

1. k-means on the minority rows only;
2. distance of every minority row to its own centroid;
3. distances normalised to weights summing to one;
4. per-row synthetic counts ``round(weight * (K_m - K_l) * eta)``;
5. each synthetic row is ``x + sign * |x - c| * r`` with ``r`` drawn from
   ``[random_lo, random_hi]``;
6. generated values clipped to the per-feature range of the original minority rows.

The majority class is never looked at beyond its size.

RNG draw order (one ``numpy.random.default_rng(seed)`` per call): a single
integer is drawn to seed k-means, then minority rows are processed in
dataset order. For a row with ``n`` samples in ``per_feature`` mode an
``(n, d)`` block of ``r`` values is drawn, then an ``(n, d)`` block of signs,
both row-major (sample-major, feature within sample). ``per_sample`` mode
draws ``n`` values of ``r`` then ``n`` signs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Literal

import numpy as np

from .clustering import ClusterModel, kmeans_fit
from .dataset import Dataset, FeatureBounds, feature_bounds, minority_indices, profile, round_half_away
from .errors import ConfigError, DataError

WeightMode = Literal["direct", "inverse"]
NoiseMode = Literal["per_feature", "per_sample"]


@dataclass(frozen=True)
class ResampleConfig:
    """Settings for :func:`cbos_resample`.

    ``weight_mode="direct"`` gives more synthetic rows to minority rows that
    lie far from their centroid; ``"inverse"`` favours rows near the centroid.
    """

    eta: float = 1.0
    clusters: int | Literal["auto"] = "auto"
    random_lo: float = 0.0
    random_hi: float = 1.0
    weight_mode: WeightMode = "direct"
    noise_mode: NoiseMode = "per_feature"
    seed: int = 0
    kmeans_iters: int = 100
    kmeans_tol: float = 1e-6

    def __post_init__(self):
        if not 0 < self.eta <= 1:
            raise ConfigError(f"eta must lie in (0, 1], got {self.eta}")
        if not 0 <= self.random_lo < self.random_hi <= 1:
            raise ConfigError(
                f"random range must satisfy 0 <= lo < hi <= 1, got [{self.random_lo}, {self.random_hi}]"
            )
        if self.weight_mode not in ("direct", "inverse"):
            raise ConfigError(f"unknown weight mode {self.weight_mode!r}")
        if self.noise_mode not in ("per_feature", "per_sample"):
            raise ConfigError(f"unknown noise mode {self.noise_mode!r}")
        if self.clusters != "auto" and (int(self.clusters) != self.clusters or self.clusters < 1):
            raise ConfigError(f"clusters must be a positive integer or 'auto', got {self.clusters!r}")


@dataclass(frozen=True)
class DistanceWeights:
    raw: np.ndarray
    normalized: np.ndarray


@dataclass(frozen=True)
class AllocationPlan:
    counts: np.ndarray

    @property
    def total(self) -> int:
        return int(self.counts.sum())


@dataclass(frozen=True)
class CBOSResult:
    """Everything :func:`cbos_resample` computed along the way."""

    dataset: Dataset
    model: ClusterModel
    weights: DistanceWeights
    plan: AllocationPlan
    bounds: FeatureBounds
    generated: np.ndarray
    # position (within the minority rows) of the seed row for each generated row
    source: np.ndarray


def auto_clusters(k_minority: int) -> int:
    return min(k_minority, max(1, int(round_half_away(math.sqrt(k_minority / 2)))))


def centroid_distances(minority, model: ClusterModel) -> np.ndarray:
    X = np.asarray(minority, dtype=float)
    if X.ndim != 2 or X.shape[1] != model.centroids.shape[1]:
        raise DataError(f"minority rows of shape {X.shape} do not match {model.centroids.shape[1]}-d centroids")
    if len(model.assignments) != X.shape[0]:
        raise DataError(f"{X.shape[0]} rows but {len(model.assignments)} cluster assignments")
    return np.sqrt(((X - model.centroids[model.assignments]) ** 2).sum(axis=1))


def normalize_distances(raw) -> np.ndarray:
    """Divide by the total; an all-zero vector maps to uniform weights."""
    raw = np.asarray(raw, dtype=float)
    if raw.size == 0:
        raise DataError("cannot normalise an empty distance vector")
    if not np.all(np.isfinite(raw)) or np.any(raw < 0):
        raise DataError("distances must be finite and non-negative")
    total = raw.sum()
    if total == 0:
        return np.full(raw.shape, 1.0 / raw.size)
    return raw / total


def inverse_weights(weights) -> np.ndarray:
    w = np.asarray(weights, dtype=float)
    if w.size == 1:
        return np.ones(1)
    comp = 1.0 - w
    return comp / comp.sum()


def allocate_counts(weights, k_majority: int, k_minority: int, eta: float,
                    weight_mode: WeightMode = "direct") -> AllocationPlan:
    if not 0 < eta <= 1:
        raise ConfigError(f"eta must lie in (0, 1], got {eta}")
    if k_majority <= k_minority:
        raise DataError(f"nothing to balance: K_m = {k_majority} <= K_l = {k_minority}")
    w = np.asarray(weights, dtype=float)
    if weight_mode == "inverse":
        w = inverse_weights(w)
    elif weight_mode != "direct":
        raise ConfigError(f"unknown weight mode {weight_mode!r}")
    gap = k_majority - k_minority
    return AllocationPlan(round_half_away(w * gap * eta))


def generate_for_sample(x, centroid, n: int, cfg: ResampleConfig, rng: np.random.Generator) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    centroid = np.asarray(centroid, dtype=float)
    if x.shape != centroid.shape:
        raise DataError(f"sample {x.shape} and centroid {centroid.shape} differ in dimension")
    d = x.shape[0]
    if n <= 0:
        return np.empty((0, d))
    delta = np.abs(x - centroid)
    shape = (n, d) if cfg.noise_mode == "per_feature" else (n, 1)
    r = rng.uniform(cfg.random_lo, cfg.random_hi, size=shape)
    s = np.where(rng.integers(0, 2, size=shape) == 1, 1.0, -1.0)
    return x + s * delta * r


def clip_to_bounds(samples, bounds: FeatureBounds) -> np.ndarray:
    samples = np.asarray(samples, dtype=float)
    if samples.shape[-1] != bounds.min_per_feature.shape[0]:
        raise DataError("sample width does not match the bounds")
    return np.minimum(np.maximum(samples, bounds.min_per_feature), bounds.max_per_feature)


def cbos_fit_resample(train: Dataset, cfg: ResampleConfig) -> CBOSResult:
    prof = profile(train)
    if prof.k_minority < 1 or prof.k_majority <= prof.k_minority:
        raise DataError(
            f"need K_m > K_l >= 1, got K_m = {prof.k_majority}, K_l = {prof.k_minority}"
        )
    k = auto_clusters(prof.k_minority) if cfg.clusters == "auto" else int(cfg.clusters)
    if k > prof.k_minority:
        raise ConfigError(f"{k} clusters requested but only {prof.k_minority} minority rows")

    minority = train.features[minority_indices(train, prof)]
    rng = np.random.default_rng(cfg.seed)
    # k-means gets its own seed drawn from the shared stream
    model = kmeans_fit(minority, k, max_iters=cfg.kmeans_iters, tol=cfg.kmeans_tol,
                       seed=int(rng.integers(2**63 - 1)))
    raw = centroid_distances(minority, model)
    weights = DistanceWeights(raw, normalize_distances(raw))
    plan = allocate_counts(weights.normalized, prof.k_majority, prof.k_minority, cfg.eta, cfg.weight_mode)
    bounds = feature_bounds(minority)

    blocks = []
    for i, (x, n) in enumerate(zip(minority, plan.counts)):
        if n:
            blocks.append(generate_for_sample(x, model.centroids[model.assignments[i]], int(n), cfg, rng))
    generated = clip_to_bounds(np.vstack(blocks), bounds) if blocks else np.empty((0, train.n_features))
    source = np.repeat(np.arange(len(minority)), plan.counts)
    return CBOSResult(
        dataset=train.append(generated, prof.minority_label),
        model=model,
        weights=weights,
        plan=plan,
        bounds=bounds,
        generated=generated,
        source=source,
    )


def cbos_resample(train: Dataset, cfg: ResampleConfig | None = None) -> Dataset:
    """Oversample the minority class of ``train``; generated rows are appended
    after the original rows, which are returned unchanged."""
    return cbos_fit_resample(train, cfg or ResampleConfig()).dataset


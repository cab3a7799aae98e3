"""Reference resamplers: random oversampling, SMOTE, ADASYN and SMOTE-ENN.

All of them sit on an exact brute-force nearest neighbour search, which is
fine for the dataset sizes this package targets.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dataset import Dataset, minority_indices, profile, round_half_away
from .errors import ConfigError, DataError


@dataclass(frozen=True)
class NeighborList:
    indices: np.ndarray
    distances: np.ndarray


@dataclass(frozen=True)
class SyntheticResult:
    """Output of an interpolating oversampler with per-row provenance.

    ``base`` and ``neighbor`` index into the minority rows of the input, and
    every generated row equals ``m[base] + u * (m[neighbor] - m[base])``.
    """

    dataset: Dataset
    generated: np.ndarray
    base: np.ndarray
    neighbor: np.ndarray
    u: np.ndarray


def knn(points, query_index: int, k: int, labels=None, restrict_to=None) -> NeighborList:
    """Exact k nearest neighbours of ``points[query_index]``, excluding itself.

    With ``restrict_to`` set, only rows whose entry in ``labels`` equals it are
    candidates. Equal distances are ordered by row index.
    """
    X = np.asarray(points, dtype=float)
    eligible = np.ones(X.shape[0], dtype=bool)
    if restrict_to is not None:
        if labels is None:
            raise ConfigError("restrict_to needs a labels vector")
        eligible &= np.asarray(labels) == restrict_to
    eligible[query_index] = False
    cand = np.flatnonzero(eligible)
    if cand.size == 0:
        raise DataError("no candidate neighbours")
    if k < 1 or k > cand.size:
        raise DataError(f"asked for {k} neighbours but only {cand.size} candidates exist")
    dist = np.sqrt(((X[cand] - X[query_index]) ** 2).sum(axis=1))
    order = np.argsort(dist, kind="stable")[:k]
    return NeighborList(cand[order], dist[order])


def _neighbor_table(X: np.ndarray, k: int) -> np.ndarray:
    return np.array([knn(X, i, k).indices for i in range(X.shape[0])], dtype=int).reshape(X.shape[0], k)


def _target_count(prof, eta: float) -> int:
    if not 0 < eta <= 1:
        raise ConfigError(f"eta must lie in (0, 1], got {eta}")
    if prof.k_majority <= prof.k_minority:
        raise DataError("dataset is not imbalanced")
    return int(round_half_away(eta * prof.gap))


def random_oversample(train: Dataset, eta: float = 1.0, seed: int = 0) -> Dataset:
    prof = profile(train)
    n = _target_count(prof, eta)
    minority = train.features[minority_indices(train, prof)]
    rng = np.random.default_rng(seed)
    picks = rng.integers(0, len(minority), size=n)
    return train.append(minority[picks], prof.minority_label)


def interpolate(minority: np.ndarray, base: np.ndarray, neighbor: np.ndarray, u: np.ndarray) -> np.ndarray:
    return minority[base] + u[:, None] * (minority[neighbor] - minority[base])


def _interpolating_result(train, prof, minority, base, table, rng) -> SyntheticResult:
    # draw order: all neighbour picks, then all interpolation factors
    pick = rng.integers(0, table.shape[1], size=len(base))
    neighbor = table[base, pick]
    u = rng.uniform(0.0, 1.0, size=len(base))
    generated = interpolate(minority, base, neighbor, u) if len(base) else np.empty((0, minority.shape[1]))
    return SyntheticResult(train.append(generated, prof.minority_label), generated, base, neighbor, u)


def smote_fit_resample(train: Dataset, k_neighbors: int = 5, eta: float = 1.0, seed: int = 0) -> SyntheticResult:
    """SMOTE with base rows taken round-robin through the minority class."""
    prof = profile(train)
    n = _target_count(prof, eta)
    if prof.k_minority <= k_neighbors:
        raise DataError(
            f"SMOTE with k_neighbors={k_neighbors} needs more than {k_neighbors} minority rows, got {prof.k_minority}"
        )
    minority = train.features[minority_indices(train, prof)]
    table = _neighbor_table(minority, k_neighbors)
    base = np.arange(n) % prof.k_minority
    return _interpolating_result(train, prof, minority, base, table, np.random.default_rng(seed))


def smote(train: Dataset, k_neighbors: int = 5, eta: float = 1.0, seed: int = 0) -> Dataset:
    return smote_fit_resample(train, k_neighbors, eta, seed).dataset


def adasyn_hardness(train: Dataset, k_neighbors: int) -> np.ndarray:
    """Share of majority rows among each minority row's k nearest neighbours (all classes)."""
    prof = profile(train)
    if k_neighbors < 1 or k_neighbors > len(train) - 1:
        raise DataError(f"k_neighbors must lie in [1, {len(train) - 1}], got {k_neighbors}")
    is_major = train.labels == prof.majority_label
    return np.array(
        [is_major[knn(train.features, i, k_neighbors).indices].mean() for i in minority_indices(train, prof)]
    )


def adasyn_fit_resample(train: Dataset, k_neighbors: int = 5, eta: float = 1.0, seed: int = 0) -> SyntheticResult:
    """ADASYN: per-row counts follow each minority row's majority-neighbour share.

    Interpolation partners are the row's ``min(k_neighbors, K_l - 1)`` nearest
    minority neighbours.
    """
    prof = profile(train)
    if prof.k_minority < 2:
        raise DataError("ADASYN needs at least two minority rows")
    _target_count(prof, eta)  # validates eta and imbalance
    hardness = adasyn_hardness(train, k_neighbors)
    total = hardness.sum()
    weights = hardness / total if total > 0 else np.full(len(hardness), 1.0 / len(hardness))
    counts = round_half_away(weights * eta * prof.gap)
    minority = train.features[minority_indices(train, prof)]
    table = _neighbor_table(minority, min(k_neighbors, prof.k_minority - 1))
    base = np.repeat(np.arange(prof.k_minority), counts)
    return _interpolating_result(train, prof, minority, base, table, np.random.default_rng(seed))


def adasyn(train: Dataset, k_neighbors: int = 5, eta: float = 1.0, seed: int = 0) -> Dataset:
    return adasyn_fit_resample(train, k_neighbors, eta, seed).dataset


def enn_clean(train: Dataset, k: int = 3) -> Dataset:
    """Edited nearest neighbours: drop every row outvoted by its k nearest neighbours.

    All votes are taken on the input before anything is removed.
    """
    if k < 1 or k % 2 == 0:
        raise ConfigError(f"ENN needs an odd k, got {k}")
    if k > len(train) - 1:
        raise DataError(f"ENN with k={k} needs at least {k + 1} rows, got {len(train)}")
    y = train.labels
    keep = np.ones(len(train), dtype=bool)
    for i in range(len(train)):
        nb = knn(train.features, i, k).indices
        agree = int((y[nb] == y[i]).sum())
        keep[i] = agree * 2 > k
    return train.subset(np.flatnonzero(keep))


def smote_enn(train: Dataset, k_neighbors: int = 5, eta: float = 1.0, enn_k: int = 3, seed: int = 0) -> Dataset:
    return enn_clean(smote(train, k_neighbors, eta, seed), enn_k)

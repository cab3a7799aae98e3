"""Lloyd's k-means with greedy k-means++ seeding.

Used to find the centroid each minority sample belongs to. Everything is
deterministic for a fixed seed; distance ties go to the lowest centroid index.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, DataError


@dataclass(frozen=True)
class ClusterModel:
    centroids: np.ndarray
    assignments: np.ndarray
    inertia: float
    iterations_run: int
    # inertia after each assignment step, in order
    inertia_trace: tuple[float, ...] = ()
    # clusters re-seeded because they went empty in the last update
    reseeded: tuple[int, ...] = ()

    @property
    def k(self) -> int:
        return self.centroids.shape[0]


def euclidean(a, b) -> float:
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.shape != b.shape:
        raise DataError(f"dimension mismatch: {a.shape} vs {b.shape}")
    return float(np.sqrt(np.sum((a - b) ** 2)))


def _sq_dists(X: np.ndarray, C: np.ndarray) -> np.ndarray:
    # explicit differences rather than the |x|^2 - 2xc + |c|^2 expansion so that
    # geometric ties stay exact ties
    return ((X[:, None, :] - C[None, :, :]) ** 2).sum(axis=2)


def nearest(X: np.ndarray, C: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Index of and squared distance to the nearest row of ``C`` for every row of ``X``."""
    d2 = _sq_dists(X, C)
    idx = np.argmin(d2, axis=1)  # first minimum wins ties
    return idx, d2[np.arange(len(X)), idx]


def assign(model: ClusterModel, point) -> int:
    p = np.asarray(point, dtype=float).reshape(-1)
    if p.shape[0] != model.centroids.shape[1]:
        raise DataError(f"point has {p.shape[0]} dims, model has {model.centroids.shape[1]}")
    idx, _ = nearest(p[None, :], model.centroids)
    return int(idx[0])


def kmeans_plusplus(X: np.ndarray, k: int, rng: np.random.Generator) -> np.ndarray:
    """Greedy k-means++: each new centre is the best of ``2 + floor(ln k)``
    D^2-weighted candidates, judged by the resulting total potential."""
    n = X.shape[0]
    n_trials = 2 + int(math.log(k))
    centers = np.empty((k, X.shape[1]))
    centers[0] = X[rng.integers(n)]
    closest = _sq_dists(X, centers[:1])[:, 0]
    for c in range(1, k):
        total = closest.sum()
        if total <= 0:
            # every point already sits on a centre (duplicates); any choice is optimal
            cand = rng.integers(n, size=n_trials)
        else:
            cand = rng.choice(n, size=n_trials, p=closest / total)
        cand_d2 = np.minimum(closest[None, :], _sq_dists(X, X[cand]).T)
        best = int(np.argmin(cand_d2.sum(axis=1)))
        centers[c] = X[cand[best]]
        closest = cand_d2[best]
    return centers


def _update(X, labels, old, k):
    """Centroid means; empty clusters are moved onto the points farthest from
    their current centroid."""
    new = np.empty_like(old)
    counts = np.bincount(labels, minlength=k)
    for j in range(k):
        if counts[j]:
            new[j] = X[labels == j].mean(axis=0)
    empty = np.flatnonzero(counts == 0)
    if len(empty):
        far = ((X - old[labels]) ** 2).sum(axis=1)
        order = np.argsort(-far, kind="stable")
        for j, i in zip(empty, order):
            new[j] = X[i]
    return new, tuple(int(j) for j in empty)


def kmeans_fit(points, k: int, max_iters: int = 100, tol: float = 1e-6, seed: int = 0) -> ClusterModel:
    """Fit ``k`` clusters with Lloyd iterations from a k-means++ start.

    Stops when no centroid moves by ``tol`` or more, when the assignment stops
    changing, or after ``max_iters`` update steps.
    """
    X = np.asarray(points, dtype=float)
    if X.ndim == 1:
        X = X.reshape(-1, 1)
    n = X.shape[0]
    if X.ndim != 2 or X.shape[1] < 1:
        raise DataError(f"points must be an n x d matrix with d >= 1, got shape {X.shape}")
    if not np.all(np.isfinite(X)):
        raise DataError("points contain NaN or infinite values")
    if int(k) != k or k < 1:
        raise ConfigError(f"k must be a positive integer, got {k}")
    if k > n:
        raise ConfigError(f"k = {k} exceeds the number of points ({n})")
    if max_iters < 1 or tol < 0:
        raise ConfigError("max_iters must be >= 1 and tol >= 0")

    rng = np.random.default_rng(seed)
    C = kmeans_plusplus(X, k, rng)
    labels, d2 = nearest(X, C)
    trace = [float(d2.sum())]
    reseeded: tuple[int, ...] = ()
    iters = 0
    while iters < max_iters:
        iters += 1
        C_new, reseeded = _update(X, labels, C, k)
        shift = float(np.sqrt(((C_new - C) ** 2).sum(axis=1)).max())
        C = C_new
        new_labels, d2 = nearest(X, C)
        trace.append(float(d2.sum()))
        stable = np.array_equal(new_labels, labels) and not reseeded
        labels = new_labels
        if shift < tol or stable:
            break
    C.setflags(write=False)
    labels.setflags(write=False)
    return ClusterModel(
        centroids=C,
        assignments=labels,
        inertia=float(d2.sum()),
        iterations_run=iters,
        inertia_trace=tuple(trace),
        reseeded=reseeded,
    )

"""Binary datasets: the container type, CSV I/O, synthetic blobs, imbalance
induction and stratified splitting.

Labels are kept as opaque strings. Which one is the minority class is decided
by :func:`profile` (less frequent class, ties go to the lexicographically
smaller label) unless the dataset pins it explicitly.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import DataError


def round_half_away(x):
    """Round to the nearest integer, halves away from zero (elementwise)."""
    x = np.asarray(x, dtype=float)
    a = np.abs(x)
    # floor(a + 0.5) is wrong for a = 0.49999999999999994, compare the fraction instead
    f = np.floor(a)
    r = f + (a - f >= 0.5)
    return (np.sign(x) * r).astype(np.int64)


@dataclass(frozen=True)
class Dataset:
    features: np.ndarray
    labels: np.ndarray
    feature_names: tuple[str, ...]
    label_name: str = "label"
    minority_label: str | None = None
    # column index of the label in CSV output; None means last
    label_position: int | None = field(default=None, compare=False)

    def __post_init__(self):
        X = np.array(self.features, dtype=float)
        if X.size == 0:
            X = X.reshape(0, len(self.feature_names))
        y = np.asarray(self.labels).astype(str)
        if X.ndim != 2:
            raise DataError(f"features must be 2-d, got shape {X.shape}")
        if X.shape[0] != y.shape[0]:
            raise DataError(f"{X.shape[0]} feature rows but {y.shape[0]} labels")
        if X.shape[1] != len(self.feature_names):
            raise DataError(f"{X.shape[1]} feature columns but {len(self.feature_names)} names")
        if not np.all(np.isfinite(X)):
            raise DataError("features contain NaN or infinite values")
        distinct = np.unique(y)
        if len(distinct) != 2:
            raise DataError(f"dataset is not binary: found {len(distinct)} distinct labels {distinct.tolist()}")
        if self.minority_label is not None and self.minority_label not in distinct:
            raise DataError(f"minority label {self.minority_label!r} does not occur in the data")
        X.setflags(write=False)
        y.setflags(write=False)
        object.__setattr__(self, "features", X)
        object.__setattr__(self, "labels", y)
        object.__setattr__(self, "feature_names", tuple(self.feature_names))

    def __len__(self) -> int:
        return self.features.shape[0]

    @property
    def n_features(self) -> int:
        return self.features.shape[1]

    @property
    def classes(self) -> tuple[str, str]:
        a, b = np.unique(self.labels)
        return str(a), str(b)

    def subset(self, indices) -> "Dataset":
        idx = np.asarray(indices, dtype=int)
        return self.replace(features=self.features[idx], labels=self.labels[idx])

    def replace(self, **changes) -> "Dataset":
        fields = dict(
            features=self.features,
            labels=self.labels,
            feature_names=self.feature_names,
            label_name=self.label_name,
            minority_label=self.minority_label,
            label_position=self.label_position,
        )
        fields.update(changes)
        return Dataset(**fields)

    def append(self, rows: np.ndarray, label: str) -> "Dataset":
        """Return a copy with ``rows`` appended after the existing rows, all labelled ``label``."""
        rows = np.asarray(rows, dtype=float).reshape(-1, self.n_features)
        if rows.shape[0] == 0:
            return self
        X = np.vstack([self.features, rows])
        y = np.concatenate([self.labels, np.full(rows.shape[0], label)])
        return self.replace(features=X, labels=y)


@dataclass(frozen=True)
class ImbalanceProfile:
    minority_label: str
    majority_label: str
    k_minority: int
    k_majority: int

    @property
    def total(self) -> int:
        return self.k_minority + self.k_majority

    @property
    def imbalance_rate(self) -> float:
        return self.k_minority / self.total

    @property
    def gap(self) -> int:
        return self.k_majority - self.k_minority

    def to_dict(self) -> dict:
        return {
            "minority_label": self.minority_label,
            "majority_label": self.majority_label,
            "k_minority": self.k_minority,
            "k_majority": self.k_majority,
            "imbalance_rate": self.imbalance_rate,
        }


@dataclass(frozen=True)
class FeatureBounds:
    min_per_feature: np.ndarray
    max_per_feature: np.ndarray


def profile(d: Dataset) -> ImbalanceProfile:
    """Count both classes and decide which one is the minority.

    A label pinned via ``Dataset.minority_label`` is always the minority,
    otherwise the rarer class is.
    """
    labels, counts = np.unique(d.labels, return_counts=True)
    counts_by = {str(lab): int(c) for lab, c in zip(labels, counts)}
    if d.minority_label is not None:
        minority = d.minority_label
    else:
        # np.unique sorts, so on a tie the lexicographically smaller label wins
        minority = str(labels[int(np.argmin(counts))])
    (majority,) = [lab for lab in counts_by if lab != minority]
    # a pinned label keeps its role even once oversampling has made it the larger class
    return ImbalanceProfile(minority, majority, counts_by[minority], counts_by[majority])


def minority_indices(d: Dataset, prof: ImbalanceProfile | None = None) -> np.ndarray:
    prof = prof or profile(d)
    return np.flatnonzero(d.labels == prof.minority_label)


def feature_bounds(rows: np.ndarray) -> FeatureBounds:
    rows = np.atleast_2d(np.asarray(rows, dtype=float))
    if rows.shape[0] == 0 or rows.size == 0:
        raise DataError("cannot compute feature bounds of zero rows")
    return FeatureBounds(rows.min(axis=0), rows.max(axis=0))


def load_csv(path, label_column: str, minority_label: str = "auto") -> Dataset:
    """Read a headered, comma-separated file into a :class:`Dataset`.

    Every column except ``label_column`` must parse as a float. Rows keep file
    order. ``minority_label="auto"`` lets :func:`profile` pick the rarer class.
    """
    path = Path(path)
    if not path.is_file():
        raise DataError(f"no such file: {path}")
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = [h.strip() for h in next(reader)]
        except StopIteration:
            raise DataError(f"{path}: empty file") from None
        if label_column not in header:
            raise DataError(f"{path}: label column {label_column!r} not in header {header}")
        label_pos = header.index(label_column)
        feature_names = [h for i, h in enumerate(header) if i != label_pos]
        rows: list[list[float]] = []
        labels: list[str] = []
        for lineno, raw in enumerate(reader, start=2):
            if not raw or all(not cell.strip() for cell in raw):
                continue
            if len(raw) != len(header):
                raise DataError(f"{path}:{lineno}: expected {len(header)} cells, got {len(raw)}")
            values = []
            for col, cell in enumerate(raw):
                if col == label_pos:
                    continue
                try:
                    v = float(cell)
                except ValueError:
                    raise DataError(
                        f"{path}:{lineno}: cannot parse {cell!r} in column {header[col]!r} as a number"
                    ) from None
                if not math.isfinite(v):
                    raise DataError(f"{path}:{lineno}: non-finite value {cell!r} in column {header[col]!r}")
                values.append(v)
            rows.append(values)
            labels.append(raw[label_pos].strip())
    if not rows:
        raise DataError(f"{path}: no data rows")
    pinned = None if minority_label == "auto" else minority_label
    ds = Dataset(
        features=np.array(rows, dtype=float).reshape(len(rows), len(feature_names)),
        labels=np.array(labels),
        feature_names=tuple(feature_names),
        label_name=label_column,
        minority_label=pinned,
        label_position=label_pos,
    )
    profile(ds)
    return ds


def write_csv(d: Dataset, path) -> None:
    """Write ``d`` back out in the same column layout :func:`load_csv` reads.

    Floats are written with ``repr`` so a load/write round trip is lossless.
    """
    pos = len(d.feature_names) if d.label_position is None else d.label_position
    header = list(d.feature_names)
    header.insert(pos, d.label_name)
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        for x, lab in zip(d.features, d.labels):
            cells = [repr(float(v)) for v in x]
            cells.insert(pos, str(lab))
            w.writerow(cells)


def induce_imbalance(d: Dataset, target_rate: float, seed: int) -> Dataset:
    """Drop minority rows at random until the minority share is at most ``target_rate``.

    The kept count is the largest ``m`` with ``m / (m + K_m) <= target_rate``.
    Majority rows are untouched; surviving rows keep their relative order.
    """
    if not 0 < target_rate < 0.5:
        raise DataError(f"target rate must lie in (0, 0.5), got {target_rate}")
    prof = profile(d)
    if prof.imbalance_rate == target_rate:
        return d
    if prof.imbalance_rate < target_rate:
        raise DataError(
            f"minority share {prof.imbalance_rate:.4f} is already below target {target_rate}"
        )
    M = prof.k_majority
    m = int(math.floor(target_rate * M / (1.0 - target_rate)))
    while (m + 1) / (m + 1 + M) <= target_rate:
        m += 1
    while m > 0 and m / (m + M) > target_rate:
        m -= 1
    m = min(m, prof.k_minority)
    if m == 0:
        raise DataError(f"target rate {target_rate} leaves no minority rows against {M} majority rows")
    rng = np.random.default_rng(seed)
    minority = minority_indices(d, prof)
    kept = rng.choice(minority, size=m, replace=False)
    keep = np.ones(len(d), dtype=bool)
    keep[minority] = False
    keep[kept] = True
    return d.subset(np.flatnonzero(keep))


def stratified_split(d: Dataset, test_fraction: float, seed: int) -> tuple[Dataset, Dataset]:
    """Split each class separately, sending ``round(n_c * test_fraction)`` (at least 1) rows to test."""
    if not 0 < test_fraction < 1:
        raise DataError(f"test fraction must lie in (0, 1), got {test_fraction}")
    rng = np.random.default_rng(seed)
    test_mask = np.zeros(len(d), dtype=bool)
    for label in d.classes:
        idx = np.flatnonzero(d.labels == label)
        n_test = max(1, int(round_half_away(len(idx) * test_fraction)))
        if n_test >= len(idx):
            raise DataError(
                f"class {label!r} has {len(idx)} rows; a test fraction of {test_fraction} leaves none for training"
            )
        test_mask[rng.permutation(idx)[:n_test]] = True
    return d.subset(np.flatnonzero(~test_mask)), d.subset(np.flatnonzero(test_mask))


def make_blobs(
    n_majority: int,
    n_minority: int,
    dims: int,
    minority_clusters: int,
    spread: float,
    seed: int,
    center_distance: float = 3.0,
) -> Dataset:
    """Synthetic imbalanced data: one majority Gaussian at the origin and
    ``minority_clusters`` minority Gaussians around it.

    All blobs share the isotropic standard deviation ``spread``. Minority
    centre ``i`` sits in a random direction at radius
    ``center_distance * (1 + i / minority_clusters)``, which keeps centres
    distinct even in one dimension. Majority rows come first.
    """
    for name, v in [("n_majority", n_majority), ("n_minority", n_minority), ("dims", dims),
                    ("minority_clusters", minority_clusters)]:
        if int(v) != v or v < 1:
            raise DataError(f"{name} must be a positive integer, got {v}")
    if minority_clusters > n_minority:
        raise DataError(f"minority_clusters ({minority_clusters}) exceeds n_minority ({n_minority})")
    if not spread >= 0 or not math.isfinite(spread):
        raise DataError(f"spread must be a finite non-negative number, got {spread}")
    rng = np.random.default_rng(seed)
    directions = rng.normal(size=(minority_clusters, dims))
    directions /= np.linalg.norm(directions, axis=1, keepdims=True)
    radii = center_distance * (1.0 + np.arange(minority_clusters) / minority_clusters)
    centers = directions * radii[:, None]

    majority = rng.normal(scale=spread, size=(n_majority, dims)) if spread > 0 else np.zeros((n_majority, dims))
    sizes = [len(part) for part in np.array_split(np.arange(n_minority), minority_clusters)]
    parts = []
    for c, size in zip(centers, sizes):
        noise = rng.normal(scale=spread, size=(size, dims)) if spread > 0 else np.zeros((size, dims))
        parts.append(c + noise)
    minority = np.vstack(parts)
    X = np.vstack([majority, minority])
    y = np.array(["majority"] * n_majority + ["minority"] * n_minority)
    return Dataset(
        features=X,
        labels=y,
        feature_names=tuple(f"x{i}" for i in range(dims)),
        label_name="label",
        minority_label="minority" if n_minority <= n_majority else None,
    )

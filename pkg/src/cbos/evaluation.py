"""Classifier and metrics used to score resampled training sets.

The classifier is plain logistic regression fitted by full-batch gradient
descent on standardised features. The minority class is the positive class
throughout.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .dataset import Dataset, profile
from .errors import ConfigError, DataError

_P_MIN = np.finfo(float).tiny
_P_MAX = np.nextafter(1.0, 0.0)


@dataclass(frozen=True)
class ConfusionMatrix:
    tp: int
    fp: int
    tn: int
    fn: int

    @property
    def total(self) -> int:
        return self.tp + self.fp + self.tn + self.fn


@dataclass(frozen=True)
class MetricsReport:
    precision: float
    recall: float
    accuracy: float
    f_score: float
    g_mean: float
    beta: float = 1.0

    NAMES = ("precision", "recall", "accuracy", "f_score", "g_mean")

    def to_dict(self) -> dict:
        return {name: getattr(self, name) for name in self.NAMES + ("beta",)}


@dataclass(frozen=True)
class LinearModel:
    weights: np.ndarray
    bias: float
    feature_means: np.ndarray
    feature_stds: np.ndarray
    positive_label: str = "1"
    negative_label: str = "0"
    loss_history: tuple[float, ...] = field(default=(), compare=False, repr=False)


def sigmoid(z):
    z = np.asarray(z, dtype=float)
    # split by sign so exp never overflows
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


def logistic_loss(w, b, Z, y) -> float:
    """Mean negative log-likelihood of labels ``y`` in {0, 1}."""
    s = Z @ w + b
    return float(np.mean(np.logaddexp(0.0, s) - y * s))


def logistic_gradient(w, b, Z, y) -> tuple[np.ndarray, float]:
    """Analytic gradient of :func:`logistic_loss` with respect to ``(w, b)``."""
    err = sigmoid(Z @ w + b) - y
    return Z.T @ err / len(y), float(err.mean())


def standardization(X: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    mean = X.mean(axis=0)
    std = X.std(axis=0)
    std[std == 0] = 1.0
    return mean, std


def train_linear(train: Dataset, epochs: int = 1000, learning_rate: float = 0.1, seed: int = 0) -> LinearModel:
    """Fit logistic regression with ``epochs`` full-batch gradient steps.

    The seed only drives the (tiny, near-zero) weight initialisation, so an
    untrained model predicts probabilities very close to 0.5.
    """
    if epochs < 0 or int(epochs) != epochs:
        raise ConfigError(f"epochs must be a non-negative integer, got {epochs}")
    if not learning_rate > 0:
        raise ConfigError(f"learning rate must be positive, got {learning_rate}")
    prof = profile(train)
    X = train.features
    y = (train.labels == prof.minority_label).astype(float)
    mean, std = standardization(X)
    Z = (X - mean) / std
    rng = np.random.default_rng(seed)
    w = rng.normal(scale=1e-3, size=X.shape[1])
    b = 0.0
    history = [logistic_loss(w, b, Z, y)]
    for _ in range(int(epochs)):
        gw, gb = logistic_gradient(w, b, Z, y)
        w = w - learning_rate * gw
        b = b - learning_rate * gb
        history.append(logistic_loss(w, b, Z, y))
    if not (np.all(np.isfinite(w)) and math.isfinite(b)):
        raise DataError("training diverged; lower the learning rate")
    return LinearModel(w, float(b), mean, std, prof.minority_label, prof.majority_label, tuple(history))


def predict_proba(model: LinearModel, X) -> np.ndarray:
    X = np.asarray(X, dtype=float)
    if X.ndim == 1:
        X = X[None, :]
    if X.shape[1] != model.weights.shape[0]:
        raise DataError(f"expected {model.weights.shape[0]} features, got {X.shape[1]}")
    s = ((X - model.feature_means) / model.feature_stds) @ model.weights + model.bias
    return np.clip(sigmoid(s), _P_MIN, _P_MAX)


def predict(model: LinearModel, x) -> float:
    """Probability that the single row ``x`` belongs to the positive (minority) class."""
    x = np.asarray(x, dtype=float)
    if x.ndim != 1:
        raise DataError("predict takes a single feature vector; use predict_proba for matrices")
    return float(predict_proba(model, x)[0])


def predict_labels(model: LinearModel, X) -> np.ndarray:
    p = predict_proba(model, X)
    return np.where(p >= 0.5, model.positive_label, model.negative_label)


def confusion(predicted, truth, positive_label: str) -> ConfusionMatrix:
    predicted = np.asarray(predicted).astype(str)
    truth = np.asarray(truth).astype(str)
    if predicted.shape != truth.shape:
        raise DataError(f"{predicted.size} predictions for {truth.size} labels")
    seen = set(np.unique(predicted)) | set(np.unique(truth))
    if len(seen - {str(positive_label)}) > 1:
        raise DataError(f"more than one negative label among {sorted(seen)}")
    p = predicted == str(positive_label)
    t = truth == str(positive_label)
    return ConfusionMatrix(
        tp=int(np.sum(p & t)),
        fp=int(np.sum(p & ~t)),
        tn=int(np.sum(~p & ~t)),
        fn=int(np.sum(~p & t)),
    )


def _ratio(num: float, den: float) -> float:
    return num / den if den else 0.0


def metrics(cm: ConfusionMatrix, beta: float = 1.0) -> MetricsReport:
    """Precision, recall, accuracy, F-beta and G-mean. Any 0/0 is taken as 0."""
    if cm.total == 0:
        raise DataError("confusion matrix is empty")
    if not beta > 0:
        raise ConfigError(f"beta must be positive, got {beta}")
    precision = _ratio(cm.tp, cm.tp + cm.fp)
    recall = _ratio(cm.tp, cm.tp + cm.fn)
    specificity = _ratio(cm.tn, cm.tn + cm.fp)
    b2 = beta * beta
    f_score = _ratio((1 + b2) * recall * precision, b2 * recall + precision)
    return MetricsReport(
        precision=precision,
        recall=recall,
        accuracy=(cm.tp + cm.tn) / cm.total,
        f_score=f_score,
        g_mean=math.sqrt(recall * specificity),
        beta=beta,
    )


def evaluate(model: LinearModel, test: Dataset, beta: float = 1.0) -> tuple[ConfusionMatrix, MetricsReport]:
    cm = confusion(predict_labels(model, test.features), test.labels, model.positive_label)
    return cm, metrics(cm, beta)

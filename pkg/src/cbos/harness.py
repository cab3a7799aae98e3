"""Repeated, seeded resampling experiments.

One run: build or load the data, optionally induce imbalance, split into
train/test, then for every method resample the *training* part only, fit the
logistic classifier and score it on the run's test part. Run ``r`` uses seed
``base_seed + r`` for every random step, so a config fully determines the
report.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
from dataclasses import asdict, dataclass, field
from typing import Callable

import numpy as np

from . import baselines
from .dataset import Dataset, induce_imbalance, load_csv, make_blobs, profile, stratified_split
from .errors import CBOSError, ConfigError
from .evaluation import MetricsReport, evaluate, train_linear
from .resample import ResampleConfig, cbos_resample

METRICS = MetricsReport.NAMES


@dataclass(frozen=True)
class BlobSource:
    n_majority: int = 950
    n_minority: int = 50
    dims: int = 10
    minority_clusters: int = 2
    spread: float = 1.0
    center_distance: float = 3.0

    def load(self, seed: int) -> Dataset:
        return make_blobs(self.n_majority, self.n_minority, self.dims, self.minority_clusters,
                          self.spread, seed, center_distance=self.center_distance)


@dataclass(frozen=True)
class CsvSource:
    path: str
    label_col: str
    minority_label: str = "auto"

    def load(self, seed: int) -> Dataset:
        return load_csv(self.path, self.label_col, self.minority_label)


@dataclass(frozen=True)
class MethodSpec:
    name: str
    params: dict = field(default_factory=dict)
    label: str | None = None

    @property
    def key(self) -> str:
        return self.label or self.name


@dataclass(frozen=True)
class ClassifierSettings:
    epochs: int = 1000
    lr: float = 0.1
    beta: float = 1.0


@dataclass(frozen=True)
class ExperimentConfig:
    data: BlobSource | CsvSource = field(default_factory=BlobSource)
    methods: tuple[MethodSpec, ...] = (MethodSpec("cbos"),)
    runs: int = 10
    base_seed: int = 0
    test_fraction: float = 0.3
    induced_rate: float | None = None
    classifier: ClassifierSettings = field(default_factory=ClassifierSettings)

    def __post_init__(self):
        if self.runs < 1:
            raise ConfigError(f"runs must be >= 1, got {self.runs}")
        methods = tuple(self.methods)
        if not methods:
            raise ConfigError("at least one method is required")
        for m in methods:
            if m.name not in RESAMPLERS:
                raise ConfigError(f"unknown method {m.name!r}; choose from {sorted(RESAMPLERS)}")
            unknown = set(m.params) - set(METHOD_PARAMS[m.name])
            if unknown:
                raise ConfigError(f"method {m.name!r} does not take {sorted(unknown)}")
        if not any(m.name == "none" for m in methods):
            methods = (MethodSpec("none"),) + methods
        keys = [m.key for m in methods]
        if len(set(keys)) != len(keys):
            raise ConfigError(f"duplicate method labels {keys}; give repeated methods a 'label'")
        object.__setattr__(self, "methods", methods)

    def to_dict(self) -> dict:
        data = {"blobs": asdict(self.data)} if isinstance(self.data, BlobSource) else {"csv": asdict(self.data)}
        methods = []
        for m in self.methods:
            entry = {"name": m.name, **m.params}
            if m.label:
                entry["label"] = m.label
            methods.append(entry)
        return {
            "data": data,
            "methods": methods,
            "runs": self.runs,
            "base_seed": self.base_seed,
            "test_fraction": self.test_fraction,
            "induced_rate": self.induced_rate,
            "classifier": asdict(self.classifier),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "ExperimentConfig":
        known = {"data", "methods", "runs", "base_seed", "test_fraction", "induced_rate", "classifier"}
        if set(d) - known:
            raise ConfigError(f"unknown config keys {sorted(set(d) - known)}")
        try:
            data_d = d.get("data", {"blobs": {}})
            if "blobs" in data_d:
                data = BlobSource(**data_d["blobs"])
            elif "csv" in data_d:
                data = CsvSource(**data_d["csv"])
            else:
                raise ConfigError("data must contain either 'blobs' or 'csv'")
            methods = []
            for m in d.get("methods", [{"name": "cbos"}]):
                m = dict(m)
                name = m.pop("name")
                label = m.pop("label", None)
                methods.append(MethodSpec(name, m, label))
            return cls(
                data=data,
                methods=tuple(methods),
                runs=int(d.get("runs", 10)),
                base_seed=int(d.get("base_seed", 0)),
                test_fraction=float(d.get("test_fraction", 0.3)),
                induced_rate=d.get("induced_rate"),
                classifier=ClassifierSettings(**d.get("classifier", {})),
            )
        except (TypeError, KeyError) as exc:
            raise ConfigError(f"malformed experiment config: {exc}") from exc


def _cbos(train, seed, **p):
    return cbos_resample(train, ResampleConfig(seed=seed, **p))


RESAMPLERS: dict[str, Callable[..., Dataset]] = {
    "none": lambda train, seed: train,
    "random": lambda train, seed, eta=1.0: baselines.random_oversample(train, eta, seed),
    "smote": lambda train, seed, k_neighbors=5, eta=1.0: baselines.smote(train, k_neighbors, eta, seed),
    "smote-enn": lambda train, seed, k_neighbors=5, eta=1.0, enn_k=3: baselines.smote_enn(
        train, k_neighbors, eta, enn_k, seed),
    "adasyn": lambda train, seed, k_neighbors=5, eta=1.0: baselines.adasyn(train, k_neighbors, eta, seed),
    "cbos": _cbos,
}

METHOD_PARAMS = {
    "none": (),
    "random": ("eta",),
    "smote": ("k_neighbors", "eta"),
    "smote-enn": ("k_neighbors", "eta", "enn_k"),
    "adasyn": ("k_neighbors", "eta"),
    "cbos": ("eta", "clusters", "random_lo", "random_hi", "weight_mode", "noise_mode",
             "kmeans_iters", "kmeans_tol"),
}


@dataclass
class ExperimentReport:
    config: dict
    methods: list
    # method -> metric -> {"mean": .., "std": ..}
    summary: dict
    runs: list
    trivial_accuracy: float

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "ExperimentReport":
        return cls(**d)

    def raw_values(self, method: str, metric: str) -> list[float]:
        return [run["methods"][method]["metrics"][metric] for run in self.runs]


def _digest(d: Dataset) -> str:
    h = hashlib.sha256()
    h.update(np.ascontiguousarray(d.features).tobytes())
    h.update("\x00".join(d.labels.tolist()).encode())
    return h.hexdigest()


def _annotate(exc: CBOSError, where: str) -> CBOSError:
    return type(exc)(f"{where}: {exc}")


def run_experiment(cfg: ExperimentConfig) -> ExperimentReport:
    runs = []
    for r in range(cfg.runs):
        seed = cfg.base_seed + r
        try:
            data = cfg.data.load(seed)
            if cfg.induced_rate is not None:
                data = induce_imbalance(data, cfg.induced_rate, seed)
            train, test = stratified_split(data, cfg.test_fraction, seed)
        except CBOSError as exc:
            raise _annotate(exc, f"run {r}") from exc
        test_prof = profile(test)
        record = {
            "run": r,
            "seed": seed,
            "data_profile": profile(data).to_dict(),
            "train_profile": profile(train).to_dict(),
            "test_profile": test_prof.to_dict(),
            "trivial_accuracy": test_prof.k_majority / test_prof.total,
            "methods": {},
        }
        for m in cfg.methods:
            try:
                resampled = RESAMPLERS[m.name](train, seed, **m.params)
                model = train_linear(resampled, cfg.classifier.epochs, cfg.classifier.lr, seed)
                cm, rep = evaluate(model, test, cfg.classifier.beta)
            except CBOSError as exc:
                raise _annotate(exc, f"run {r}, method {m.key}") from exc
            record["methods"][m.key] = {
                "metrics": {name: getattr(rep, name) for name in METRICS},
                "confusion": asdict(cm),
                "resampled_profile": profile(resampled).to_dict(),
                "test_digest": _digest(test),
            }
        runs.append(record)

    keys = [m.key for m in cfg.methods]
    summary = {}
    for key in keys:
        summary[key] = {}
        for name in METRICS:
            vals = np.array([run["methods"][key]["metrics"][name] for run in runs])
            summary[key][name] = {"mean": float(vals.mean()), "std": float(vals.std())}
    return ExperimentReport(
        config=cfg.to_dict(),
        methods=keys,
        summary=summary,
        runs=runs,
        trivial_accuracy=float(np.mean([run["trivial_accuracy"] for run in runs])),
    )


_HEADERS = {"precision": "Precision", "recall": "Recall", "accuracy": "Accuracy",
            "f_score": "F-score", "g_mean": "G-Mean"}


def emit_report(report: ExperimentReport, format: str = "table") -> str:
    if format == "json":
        return json.dumps(report.to_dict(), indent=2) + "\n"
    if format == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["method", "metric", "mean", "std"])
        for key in report.methods:
            for name in METRICS:
                s = report.summary[key][name]
                w.writerow([key, name, repr(s["mean"]), repr(s["std"])])
        return buf.getvalue()
    if format == "table":
        width = max(len("Algorithm"), *(len(k) for k in report.methods))
        head = "Algorithm".ljust(width) + "".join(f"  {_HEADERS[n]:>9}" for n in METRICS)
        lines = [head, "-" * len(head)]
        for key in report.methods:
            cells = "".join(f"  {report.summary[key][n]['mean']:>9.3f}" for n in METRICS)
            lines.append(key.ljust(width) + cells)
        lines.append("")
        lines.append(f"means over {len(report.runs)} run(s); "
                     f"all-majority predictor accuracy {report.trivial_accuracy:.3f}")
        return "\n".join(lines) + "\n"
    raise ConfigError(f"unknown report format {format!r}")


def parse_report(text: str) -> ExperimentReport:
    return ExperimentReport.from_dict(json.loads(text))

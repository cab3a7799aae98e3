"""Clustering based oversampling for binary class-imbalanced data."""

from .baselines import adasyn, enn_clean, knn, random_oversample, smote, smote_enn
from .clustering import ClusterModel, assign, euclidean, kmeans_fit
from .dataset import (
    Dataset,
    FeatureBounds,
    ImbalanceProfile,
    feature_bounds,
    induce_imbalance,
    load_csv,
    make_blobs,
    profile,
    stratified_split,
    write_csv,
)
from .errors import CBOSError, ConfigError, DataError
from .evaluation import ConfusionMatrix, LinearModel, MetricsReport, confusion, metrics, predict, train_linear
from .harness import ExperimentConfig, ExperimentReport, emit_report, run_experiment
from .resample import (
    AllocationPlan,
    ResampleConfig,
    allocate_counts,
    cbos_fit_resample,
    cbos_resample,
    centroid_distances,
    clip_to_bounds,
    generate_for_sample,
    normalize_distances,
)

__version__ = "0.1.0"

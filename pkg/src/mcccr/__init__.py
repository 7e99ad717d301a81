"""Energy-based cleaning and resampling for multi-class imbalanced data."""

from .baselines import smote, smote_all
from .core import (
    BinaryCcrResult,
    BinarySplit,
    CleaningConfig,
    binary_ccr,
    clean_majority,
    expand_sphere,
    generation_counts,
    pnorm_distance,
    synthesize,
)
from .datasets import LabeledDataset, load_dataset, save_dataset
from .errors import (
    ConfigError,
    DatasetFormatError,
    DegenerateGeometry,
    DimensionMismatch,
    McccrError,
)
from .folds import stratified_folds
from .harness import ExperimentConfig, config_from_file, run_experiment
from .metrics import (
    MetricReport,
    avacc,
    cba,
    cen,
    confusion_matrix,
    mean_ranks,
    mgm,
    score,
)
from .multiclass import McConfig, build_combined_majority, mc_ccr, order_classes
from .neighbors import knn_classify
from .noise import NoiseSpec, inject_noise
from .report import ExperimentReport, emit_report, load_report

__version__ = "0.1.0"

__all__ = [
    "BinaryCcrResult", "BinarySplit", "CleaningConfig", "ConfigError",
    "DatasetFormatError", "DegenerateGeometry", "DimensionMismatch",
    "ExperimentConfig", "ExperimentReport", "LabeledDataset", "McConfig",
    "McccrError", "MetricReport", "NoiseSpec", "avacc", "binary_ccr",
    "build_combined_majority", "cba", "cen", "clean_majority",
    "config_from_file", "confusion_matrix", "emit_report", "expand_sphere",
    "generation_counts", "inject_noise", "knn_classify", "load_dataset",
    "load_report", "mc_ccr", "mean_ranks", "mgm", "order_classes",
    "pnorm_distance", "run_experiment", "save_dataset", "score", "smote",
    "smote_all", "stratified_folds", "synthesize",
]

"""Imbalanced binary classification workbench: resampling, eleven learners,
two-level stacking, imbalance-aware metrics and an experiment harness."""

from .data import Dataset, imbalance_stats, load_csv, stratified_split, synthesize_dataset, write_csv
from .errors import ConfigError, DataError, ImbStackError, UndefinedMetricError
from .resampling import ResampleMethod, apply as resample

__all__ = [
    "ConfigError",
    "DataError",
    "Dataset",
    "ImbStackError",
    "ResampleMethod",
    "UndefinedMetricError",
    "imbalance_stats",
    "load_csv",
    "resample",
    "stratified_split",
    "synthesize_dataset",
    "write_csv",
]

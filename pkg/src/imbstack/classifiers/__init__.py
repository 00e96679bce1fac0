"""Uniform fit / score interface over the eleven learners.

Every learner emits P(label = 1). KNN, SVM and MLP see standardized
features (mean and standard deviation captured at fit time); trees and
naive Bayes consume raw features.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from types import MappingProxyType
from typing import Mapping, Optional

import numpy as np

from ..data import Dataset, ids_fingerprint
from ..errors import ConfigError, DataError
from .ensembles import AdaBoost, Bagging, C45Tree, CostSensitiveForest, EasyEnsemble, GradientBoosting
from .knn import KNNClassifier
from .linear import LinearSVM
from .mlp import MLP
from .naive_bayes import GaussianNB

KINDS = (
    "knn", "gaussian_nb", "c45", "csl", "svm", "easy_ensemble",
    "rus_boost", "ada_boost", "gbm", "bagging", "mlp",
)
DISPLAY = {
    "knn": "KNN",
    "gaussian_nb": "GaussianNB",
    "c45": "C4.5",
    "csl": "CSL",
    "svm": "SVM",
    "easy_ensemble": "EasyEnsemble",
    "rus_boost": "RUSBoost",
    "ada_boost": "AdaBoost",
    "gbm": "GBM",
    "bagging": "Bagging",
    "mlp": "MLP",
}
TREE_FAMILY = ("c45", "csl")
STANDARDIZED = ("knn", "svm", "mlp")

DEFAULTS = {
    "knn": {"k": 5, "metric": "euclidean"},
    "gaussian_nb": {"var_floor": 1e-9},
    "c45": {"max_depth": 12, "min_leaf": 5},
    "csl": {"n_trees": 100, "max_depth": 12, "min_leaf": 5, "w_majority": 1.0, "w_minority": None},
    "svm": {"lam": 1e-4, "epochs": 20, "batch_size": 32, "tol": 1e-2},
    "easy_ensemble": {"n_subsets": 10, "n_rounds": 100},
    "rus_boost": {"n_rounds": 100},
    "ada_boost": {"n_rounds": 100},
    "gbm": {"n_rounds": 100, "max_depth": 3, "learning_rate": 0.1, "min_leaf": 5},
    "bagging": {"n_trees": 50, "max_depth": None, "min_leaf": 5},
    "mlp": {"hidden": 32, "batch_size": 64, "learning_rate": 0.01, "epochs": 30, "tol": 1e-4},
}

_BUILDERS = {
    "knn": KNNClassifier,
    "gaussian_nb": GaussianNB,
    "c45": C45Tree,
    "csl": CostSensitiveForest,
    "svm": LinearSVM,
    "easy_ensemble": EasyEnsemble,
    "rus_boost": lambda **p: AdaBoost(undersample=True, **p),
    "ada_boost": AdaBoost,
    "gbm": GradientBoosting,
    "bagging": Bagging,
    "mlp": MLP,
}


def canonical_kind(name: str) -> str:
    key = name.strip().lower().replace("-", "").replace("_", "").replace(".", "")
    for kind, display in DISPLAY.items():
        if key in (kind.replace("_", ""), display.lower().replace(".", "")):
            return kind
    if key == "bag":
        return "bagging"
    raise ConfigError(f"unknown classifier {name!r}; expected one of {KINDS}")


@dataclass(frozen=True)
class ClassifierSpec:
    kind: str
    params: Mapping = field(default_factory=dict)
    seed: int = 0

    def __post_init__(self):
        kind = canonical_kind(self.kind)
        unknown = set(self.params) - set(DEFAULTS[kind])
        if unknown:
            raise ConfigError(f"{kind}: unknown hyperparameters {sorted(unknown)}")
        merged = dict(DEFAULTS[kind])
        merged.update(self.params)
        _validate(kind, merged)
        object.__setattr__(self, "kind", kind)
        object.__setattr__(self, "params", MappingProxyType(merged))

    @property
    def display(self) -> str:
        return DISPLAY[self.kind]

    def with_seed(self, seed: int) -> "ClassifierSpec":
        return ClassifierSpec(self.kind, dict(self.params), seed)

    def __reduce__(self):
        return (ClassifierSpec, (self.kind, dict(self.params), self.seed))

    def __hash__(self):
        return hash((self.kind, tuple(sorted(self.params.items())), self.seed))


def _validate(kind, p):
    def positive_int(*names):
        for name in names:
            v = p[name]
            if v is not None and (not isinstance(v, (int, np.integer)) or v < 1):
                raise ConfigError(f"{kind}: {name} must be a positive integer, got {v!r}")

    if kind == "knn":
        positive_int("k")
    elif kind in ("c45", "bagging"):
        positive_int("max_depth", "min_leaf")
    elif kind == "csl":
        positive_int("n_trees", "max_depth", "min_leaf")
        w_min = p["w_minority"]
        if not p["w_majority"] > 0 or (w_min is not None and not w_min > 0):
            raise ConfigError("csl: cost weights must be positive")
    elif kind == "svm":
        positive_int("epochs", "batch_size")
        if p["lam"] <= 0:
            raise ConfigError("svm: lam must be positive")
    elif kind in ("ada_boost", "rus_boost"):
        positive_int("n_rounds")
    elif kind == "easy_ensemble":
        positive_int("n_subsets", "n_rounds")
    elif kind == "gbm":
        positive_int("n_rounds", "max_depth", "min_leaf")
        if not 0 < p["learning_rate"] <= 1:
            raise ConfigError("gbm: learning_rate must be in (0, 1]")
    elif kind == "mlp":
        positive_int("hidden", "batch_size", "epochs")
        if p["learning_rate"] <= 0:
            raise ConfigError("mlp: learning_rate must be positive")


@dataclass(frozen=True)
class CostWeights:
    w_majority: float = 1.0
    w_minority: float = 1.0

    def __post_init__(self):
        if not (self.w_majority > 0 and self.w_minority > 0):
            raise ConfigError("cost weights must both be positive")

    @classmethod
    def from_counts(cls, data: Dataset) -> "CostWeights":
        data.require_both_classes("cost weights")
        return cls(1.0, data.n_majority / data.n_minority)


@dataclass(frozen=True, eq=False)
class TrainedModel:
    spec: ClassifierSpec
    estimator: object
    n_features: int
    scaler: Optional[tuple]
    train_ids: np.ndarray
    fingerprint: str
    warnings: tuple = ()


def fit(spec: ClassifierSpec, train: Dataset) -> TrainedModel:
    """Fit ``spec`` on ``train``. Deterministic in ``(spec.seed, train)``."""
    train.require_both_classes(f"fitting {spec.display}")
    X = train.features
    if X.shape[1] < 1:
        raise DataError("training data has no features")
    if not np.isfinite(X).all():
        raise DataError("training features contain non-finite values")
    scaler = None
    if spec.kind in STANDARDIZED:
        mean = X.mean(axis=0)
        std = X.std(axis=0)
        std = np.where(std > 0, std, 1.0)
        scaler = (mean, std)
        X = (X - mean) / std
    estimator = _BUILDERS[spec.kind](**spec.params)
    estimator.fit(X, train.labels, spec.seed)
    ids = train.row_ids.copy()
    ids.setflags(write=False)
    return TrainedModel(
        spec, estimator, train.n_features, scaler, ids, ids_fingerprint(ids),
        tuple(estimator.warnings_),
    )


def _prepare(model: TrainedModel, features) -> np.ndarray:
    X = np.atleast_2d(np.asarray(features, dtype=float))
    if X.shape[1] != model.n_features:
        raise DataError(f"model expects {model.n_features} features, got {X.shape[1]}")
    if not np.isfinite(X).all():
        raise DataError("features contain non-finite values")
    if model.scaler is not None:
        X = (X - model.scaler[0]) / model.scaler[1]
    return X


def predict_proba(model: TrainedModel, features) -> np.ndarray:
    scores = np.asarray(model.estimator.predict_proba(_prepare(model, features)), dtype=float)
    return np.clip(scores, 0.0, 1.0)


def predict_label(model: TrainedModel, features, threshold: float = 0.5) -> np.ndarray:
    if not 0.0 < threshold < 1.0:
        raise ConfigError(f"threshold must be in (0, 1), got {threshold}")
    return (predict_proba(model, features) >= threshold).astype(np.int8)

"""Experiment configuration and its flat TOML form.

Keys are plain scalars or lists. Per-learner hyperparameters use quoted
dotted keys, e.g. ``"gbm.n_rounds" = 50``; resampler options
(``k_neighbors``, ``metric``, ...) apply to every resampler. Unknown keys
are errors.
"""
from __future__ import annotations

import dataclasses
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from . import classifiers as clf
from . import resampling
from .errors import ConfigError
from .metrics import CostModel
from .resampling import ResampleMethod

if sys.version_info >= (3, 11):
    import tomllib
else:  # pragma: no cover
    import tomli as tomllib


@dataclass(frozen=True)
class SyntheticParams:
    n: int = 20_000
    ir: float = 0.01
    dims: int = 8
    overlap: float = 0.3
    seed: int = 0


def _all_resamplers():
    return tuple(ResampleMethod(k) for k in resampling.KINDS)


def _all_classifiers():
    return tuple(clf.ClassifierSpec(k) for k in clf.KINDS)


@dataclass(frozen=True)
class ExperimentConfig:
    data_path: Optional[str] = None
    label_column: str = "Class"
    amount_column: Optional[str] = None
    synthetic: SyntheticParams = SyntheticParams()
    level0_test_fraction: float = 0.4
    level1_test_fraction: float = 0.3
    resamplers: tuple = field(default_factory=_all_resamplers)
    classifiers: tuple = field(default_factory=_all_classifiers)
    meta_learners: tuple = field(default_factory=_all_classifiers)
    folds: int = 5
    threshold: float = 0.5
    cost_model: CostModel = CostModel()
    seed: int = 0
    workers: int = 1

    def __post_init__(self):
        for name in ("resamplers", "classifiers", "meta_learners"):
            items = tuple(getattr(self, name))
            if not items:
                raise ConfigError(f"{name} must not be empty")
            object.__setattr__(self, name, items)
        kinds = [r.kind for r in self.resamplers]
        if len(set(kinds)) != len(kinds):
            raise ConfigError("resamplers must be distinct")
        for name in ("classifiers", "meta_learners"):
            kinds = [c.kind for c in getattr(self, name)]
            if len(set(kinds)) != len(kinds):
                raise ConfigError(f"{name} must be distinct")
        for name in ("level0_test_fraction", "level1_test_fraction"):
            v = getattr(self, name)
            if not 0.0 < v < 1.0:
                raise ConfigError(f"{name} must be in (0, 1), got {v}")
        if not 0.0 < self.threshold < 1.0:
            raise ConfigError(f"threshold must be in (0, 1), got {self.threshold}")
        if self.folds < 2:
            raise ConfigError(f"folds must be >= 2, got {self.folds}")
        if self.workers < 1:
            raise ConfigError(f"workers must be >= 1, got {self.workers}")

    def replace(self, **kw) -> "ExperimentConfig":
        return dataclasses.replace(self, **kw)

    def to_dict(self) -> dict:
        """Flat mapping that ``from_mapping`` turns back into this config."""
        out = {
            "label_column": self.label_column,
            "level0_test_fraction": self.level0_test_fraction,
            "level1_test_fraction": self.level1_test_fraction,
            "resamplers": [r.kind for r in self.resamplers],
            "classifiers": [c.kind for c in self.classifiers],
            "meta_learners": [c.kind for c in self.meta_learners],
            "folds": self.folds,
            "threshold": self.threshold,
            "c_admin": self.cost_model.c_admin,
            "fallback_fn_multiplier": self.cost_model.fallback_fn_multiplier,
            "seed": self.seed,
            "workers": self.workers,
        }
        if self.data_path is not None:
            out["data_path"] = self.data_path
        else:
            for k, v in dataclasses.asdict(self.synthetic).items():
                out[f"synthetic_{k}"] = v
        if self.amount_column is not None:
            out["amount_column"] = self.amount_column
        r0 = self.resamplers[0]
        for k in _RESAMPLER_KEYS:
            out[k] = getattr(r0, k)
        for spec in self.classifiers + self.meta_learners:
            for k, v in spec.params.items():
                if v != clf.DEFAULTS[spec.kind][k] and v is not None:
                    out[f"{spec.kind}.{k}"] = v
        return out


_RESAMPLER_KEYS = ("k_neighbors", "m_neighbors", "beta", "metric", "enn_k")
_SCALAR_KEYS = {
    "data_path": str,
    "label_column": str,
    "amount_column": str,
    "level0_test_fraction": float,
    "level1_test_fraction": float,
    "folds": int,
    "threshold": float,
    "c_admin": float,
    "fallback_fn_multiplier": float,
    "seed": int,
    "workers": int,
    "synthetic_n": int,
    "synthetic_ir": float,
    "synthetic_dims": int,
    "synthetic_overlap": float,
    "synthetic_seed": int,
    "k_neighbors": int,
    "m_neighbors": int,
    "beta": float,
    "metric": str,
    "enn_k": int,
}
_LIST_KEYS = ("resamplers", "classifiers", "meta_learners")


def _coerce(key, value, kind):
    if kind is float and isinstance(value, int) and not isinstance(value, bool):
        value = float(value)
    if not isinstance(value, kind) or isinstance(value, bool):
        raise ConfigError(f"{key}: expected {kind.__name__}, got {value!r}")
    return value


def from_mapping(doc: dict) -> ExperimentConfig:
    scalars, lists, hyper = {}, {}, {}
    for key, value in doc.items():
        if key in _SCALAR_KEYS:
            scalars[key] = _coerce(key, value, _SCALAR_KEYS[key])
        elif key in _LIST_KEYS:
            if not isinstance(value, list) or not all(isinstance(v, str) for v in value):
                raise ConfigError(f"{key}: expected a list of names")
            lists[key] = value
        elif "." in key:
            kind, _, param = key.partition(".")
            kind = clf.canonical_kind(kind)
            if param not in clf.DEFAULTS[kind]:
                raise ConfigError(f"unknown hyperparameter {key!r}")
            hyper.setdefault(kind, {})[param] = value
        else:
            raise ConfigError(f"unknown config key {key!r}")

    res_opts = {k: scalars.pop(k) for k in _RESAMPLER_KEYS if k in scalars}
    names = lists.get("resamplers", list(resampling.KINDS))
    resamplers = tuple(ResampleMethod(resampling.canonical_kind(n), **res_opts) for n in names)

    def specs(key):
        kinds = [clf.canonical_kind(n) for n in lists.get(key, list(clf.KINDS))]
        return tuple(clf.ClassifierSpec(k, hyper.get(k, {})) for k in kinds)

    synth = SyntheticParams(**{
        k[len("synthetic_"):]: scalars.pop(k) for k in list(scalars) if k.startswith("synthetic_")
    })
    cost = CostModel(
        scalars.pop("c_admin", CostModel.c_admin),
        scalars.pop("fallback_fn_multiplier", CostModel.fallback_fn_multiplier),
    )
    return ExperimentConfig(
        synthetic=synth,
        resamplers=resamplers,
        classifiers=specs("classifiers"),
        meta_learners=specs("meta_learners"),
        cost_model=cost,
        **scalars,
    )


def load_config(path) -> ExperimentConfig:
    path = Path(path)
    try:
        with path.open("rb") as fh:
            doc = tomllib.load(fh)
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {path}") from None
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"{path}: {exc}") from None
    nested = [k for k, v in doc.items() if isinstance(v, dict)]
    if nested:
        raise ConfigError(f"{path}: config must be flat; found tables {nested}")
    return from_mapping(doc)


def _toml_value(v):
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, str):
        return '"' + v.replace("\\", "\\\\").replace('"', '\\"') + '"'
    if isinstance(v, (list, tuple)):
        return "[" + ", ".join(_toml_value(x) for x in v) + "]"
    return repr(v)


def dump_config(config: ExperimentConfig) -> str:
    lines = []
    for k, v in config.to_dict().items():
        key = f'"{k}"' if "." in k else k
        lines.append(f"{key} = {_toml_value(v)}")
    return "\n".join(lines) + "\n"

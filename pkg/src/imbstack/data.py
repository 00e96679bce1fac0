"""Datasets, CSV ingestion, stratified splitting and a synthetic generator.

Label polarity is fixed: 1 is the minority (fraud, positive) class and 0 the
majority. Rows created by resamplers carry negative ``row_ids`` so they can
never collide with the non-negative ids of loaded or generated rows.
"""
from __future__ import annotations

import csv
import hashlib
import math
import warnings
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from .errors import ConfigError, DataError
from .seeding import rng as make_rng

DEFAULT_LABEL = "Class"
DEFAULT_AMOUNT = "Amount"


def _frozen(a, dtype) -> np.ndarray:
    out = np.array(a, dtype=dtype, copy=True)
    out.setflags(write=False)
    return out


@dataclass(frozen=True, eq=False)
class Dataset:
    """Feature matrix, binary labels and optional transaction amounts.

    Instances are immutable; every operation returns a new Dataset.
    """

    features: np.ndarray
    labels: np.ndarray
    amounts: Optional[np.ndarray] = None
    feature_names: tuple = ()
    row_ids: Optional[np.ndarray] = None

    def __post_init__(self):
        X = np.asarray(self.features, dtype=float)
        if X.ndim == 1:
            X = X.reshape(-1, 1)
        if X.ndim != 2:
            raise DataError(f"features must be 2-D, got shape {X.shape}")
        n = X.shape[0]
        y = np.asarray(self.labels)
        if y.shape != (n,):
            raise DataError(f"labels length {y.shape} does not match {n} feature rows")
        if n and not np.isin(y, (0, 1)).all():
            raise DataError("labels must be 0 or 1")
        ids = np.arange(n) if self.row_ids is None else np.asarray(self.row_ids)
        if ids.shape != (n,):
            raise DataError("row_ids length does not match feature rows")
        if len(np.unique(ids)) != n:
            raise DataError("row_ids must be unique")
        amounts = self.amounts
        if amounts is not None:
            amounts = np.asarray(amounts, dtype=float)
            if amounts.shape != (n,):
                raise DataError("amounts length does not match feature rows")
            if (amounts < 0).any():
                raise DataError("amounts must be non-negative")
        names = tuple(self.feature_names) or tuple(f"x{i}" for i in range(X.shape[1]))
        if len(names) != X.shape[1]:
            raise DataError("feature_names length does not match feature columns")
        object.__setattr__(self, "features", _frozen(X, float))
        object.__setattr__(self, "labels", _frozen(y, np.int8))
        object.__setattr__(self, "row_ids", _frozen(ids, np.int64))
        object.__setattr__(self, "amounts", None if amounts is None else _frozen(amounts, float))
        object.__setattr__(self, "feature_names", names)

    def __len__(self):
        return self.features.shape[0]

    @property
    def n_features(self) -> int:
        return self.features.shape[1]

    @property
    def n_minority(self) -> int:
        return int(self.labels.sum())

    @property
    def n_majority(self) -> int:
        return len(self) - self.n_minority

    def subset(self, index) -> "Dataset":
        index = np.asarray(index)
        return Dataset(
            self.features[index],
            self.labels[index],
            None if self.amounts is None else self.amounts[index],
            self.feature_names,
            self.row_ids[index],
        )

    def require_both_classes(self, what: str = "this operation"):
        if self.n_minority == 0 or self.n_majority == 0:
            raise DataError(
                f"{what} needs both classes; got {self.n_majority} majority / "
                f"{self.n_minority} minority rows"
            )

    def fingerprint(self) -> str:
        return ids_fingerprint(self.row_ids)


def ids_fingerprint(row_ids) -> str:
    ids = np.sort(np.asarray(row_ids, dtype=np.int64))
    return hashlib.sha256(ids.tobytes()).hexdigest()


@dataclass(frozen=True)
class SplitPair:
    train: Dataset
    test: Dataset
    test_fraction: float
    seed: int


@dataclass(frozen=True)
class ImbalanceStats:
    n_majority: int
    n_minority: int
    ir: float = field(init=False)

    def __post_init__(self):
        total = self.n_majority + self.n_minority
        if total == 0:
            raise DataError("imbalance statistics of an empty dataset")
        object.__setattr__(self, "ir", self.n_minority / total)

    @property
    def imbalanced(self) -> bool:
        return self.ir < 0.5

    def as_dict(self):
        return {"n_majority": self.n_majority, "n_minority": self.n_minority, "ir": self.ir}


def imbalance_stats(data: Dataset) -> ImbalanceStats:
    if len(data) == 0:
        raise DataError("imbalance statistics of an empty dataset")
    return ImbalanceStats(data.n_majority, data.n_minority)


def _round_half_up(x: float) -> int:
    return int(math.floor(x + 0.5))


def _parse_label(token: str, positive: Sequence[str], negative: Sequence[str]):
    t = token.strip()
    if t in positive:
        return 1
    if t in negative:
        return 0
    try:
        v = float(t)
    except ValueError:
        return None
    if v == 1.0:
        return 1
    if v == 0.0:
        return 0
    return None


def load_csv(
    path,
    label_column: str = DEFAULT_LABEL,
    amount_column: Optional[str] = None,
    positive_tokens: Sequence[str] = ("1",),
    negative_tokens: Sequence[str] = ("0",),
) -> Dataset:
    """Read a header-first, comma-separated file into a Dataset.

    Every column other than the label (and the optional amount column) becomes
    a feature, in header order. Missing or non-numeric cells are errors.
    """
    path = Path(path)
    if not path.exists():
        raise DataError(f"no such file: {path}")
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if not header:
            raise DataError(f"{path}: empty file")
        header = [h.strip() for h in header]
        rows = list(reader)
    if label_column not in header:
        raise DataError(f"{path}: label column {label_column!r} not in header")
    if amount_column is not None and amount_column not in header:
        raise DataError(f"{path}: amount column {amount_column!r} not in header")
    rows = [r for r in rows if r]
    if not rows:
        raise DataError(f"{path}: no data rows")

    li = header.index(label_column)
    ai = header.index(amount_column) if amount_column is not None else None
    fcols = [j for j in range(len(header)) if j != li and j != ai]
    width = len(header)

    labels = np.empty(len(rows), dtype=np.int8)
    for i, r in enumerate(rows):
        if len(r) != width:
            raise DataError(f"{path}: row {i + 2} has {len(r)} cells, header has {width}")
        lab = _parse_label(r[li], positive_tokens, negative_tokens)
        if lab is None:
            raise DataError(f"{path}: row {i + 2}, column {label_column!r}: bad label {r[li]!r}")
        labels[i] = lab

    def numeric(cols):
        try:
            block = np.array([[r[j] for j in cols] for r in rows], dtype=float)
        except ValueError:
            block = None
        if block is not None and np.isfinite(block).all():
            return block
        for i, r in enumerate(rows):
            for j in cols:
                try:
                    v = float(r[j])
                except ValueError:
                    v = float("nan")
                if not math.isfinite(v):
                    raise DataError(
                        f"{path}: row {i + 2}, column {header[j]!r}: non-numeric cell {r[j]!r}"
                    )
        raise AssertionError("unreachable")

    X = numeric(fcols) if fcols else np.empty((len(rows), 0))
    amounts = numeric([ai])[:, 0] if ai is not None else None
    if X.shape[1] == 0:
        raise DataError(f"{path}: no feature columns")
    if labels.min() == labels.max():
        warnings.warn(f"{path}: label column holds a single class", stacklevel=2)
    return Dataset(X, labels, amounts, tuple(header[j] for j in fcols))


def write_csv(
    data: Dataset,
    path,
    label_column: str = DEFAULT_LABEL,
    amount_column: str = DEFAULT_AMOUNT,
):
    """Write features, amount (if any) and label with 17 significant digits."""
    path = Path(path)
    header = list(data.feature_names)
    if data.amounts is not None:
        header.append(amount_column)
    header.append(label_column)
    with path.open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for i in range(len(data)):
            row = [f"{v:.17g}" for v in data.features[i]]
            if data.amounts is not None:
                row.append(f"{data.amounts[i]:.17g}")
            row.append(str(int(data.labels[i])))
            w.writerow(row)


def stratified_split(data: Dataset, test_fraction: float, seed: int) -> SplitPair:
    """Split each class separately so both partitions keep the class ratio."""
    if not 0.0 < test_fraction < 1.0:
        raise ConfigError(f"test_fraction must be in (0, 1), got {test_fraction}")
    gen = make_rng(seed)
    test_idx = []
    for c in (0, 1):
        idx = np.flatnonzero(data.labels == c)
        if len(idx) < 2:
            raise DataError(f"class {c} has {len(idx)} rows; a stratified split needs at least 2")
        n_test = _round_half_up(test_fraction * len(idx))
        if n_test == 0 or n_test == len(idx):
            raise ConfigError(
                f"test_fraction {test_fraction} leaves an empty partition for class {c} "
                f"({len(idx)} rows)"
            )
        test_idx.append(gen.permutation(idx)[:n_test])
    test_idx = np.sort(np.concatenate(test_idx))
    mask = np.zeros(len(data), dtype=bool)
    mask[test_idx] = True
    return SplitPair(data.subset(np.flatnonzero(~mask)), data.subset(test_idx), test_fraction, seed)


# per-axis blob separation at overlap=0, in units of majority standard deviation
_SEPARATION = 10.0
# growth of the minority spread on the signal axes per unit of overlap
_SPREAD = 8.0


def synthesize_dataset(n: int, ir: float, d: int, overlap: float, seed: int) -> Dataset:
    """Two Gaussian blobs with ``round(ir * n)`` minority rows.

    The minority center sits ``10 * (1 - overlap)`` majority standard
    deviations away along the diagonal of the first two axes, and its spread
    on those two axes is ``1 + 8 * overlap``. Remaining axes are identically
    distributed noise for both classes. Amounts are log-normal, with fraud
    amounts drawn from a heavier distribution.
    """
    if n < 10:
        raise ConfigError(f"n must be >= 10, got {n}")
    if not 0.0 < ir < 0.5:
        raise ConfigError(f"ir must be in (0, 0.5), got {ir}")
    if d < 2:
        raise ConfigError(f"d must be >= 2, got {d}")
    if not 0.0 <= overlap <= 1.0:
        raise ConfigError(f"overlap must be in [0, 1], got {overlap}")
    n_min = _round_half_up(ir * n)
    if n_min == 0:
        raise ConfigError(f"round(ir * n) == 0 for ir={ir}, n={n}")
    n_maj = n - n_min
    gen = make_rng(seed)

    center = np.zeros(d)
    center[:2] = _SEPARATION * (1.0 - overlap) / math.sqrt(2.0)
    spread = np.ones(d)
    spread[:2] = 1.0 + _SPREAD * overlap
    X_maj = gen.standard_normal((n_maj, d))
    X_min = center + spread * gen.standard_normal((n_min, d))
    amt_maj = gen.lognormal(3.5, 1.2, n_maj)
    amt_min = gen.lognormal(4.0, 1.5, n_min)

    X = np.vstack([X_maj, X_min])
    y = np.concatenate([np.zeros(n_maj, np.int8), np.ones(n_min, np.int8)])
    amounts = np.concatenate([amt_maj, amt_min])
    order = gen.permutation(n)
    return Dataset(X[order], y[order], amounts[order], tuple(f"V{i + 1}" for i in range(d)))

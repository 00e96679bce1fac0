"""Confusion counts, threshold metrics, ROC / PR curves and the cost model.

Undefined ratios (zero denominators) are reported as ``None`` and written
as ``NA``; they are never coerced to 0.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

import numpy as np

from .errors import ConfigError, DataError, UndefinedMetricError

# per-instance outcome codes: 2 * label + predicted
TN, FP, FN, TP = 0, 1, 2, 3
OUTCOME_NAMES = ("TN", "FP", "FN", "TP")


@dataclass(frozen=True)
class ConfusionMatrix:
    tp: int
    fp: int
    fn: int
    tn: int

    def __post_init__(self):
        for name in ("tp", "fp", "fn", "tn"):
            v = getattr(self, name)
            if int(v) != v or v < 0:
                raise DataError(f"confusion cell {name} must be a non-negative integer, got {v!r}")
            object.__setattr__(self, name, int(v))

    @property
    def total(self) -> int:
        return self.tp + self.fp + self.fn + self.tn

    def as_tuple(self):
        return (self.tp, self.fp, self.fn, self.tn)


@dataclass(frozen=True)
class MetricsRow:
    accuracy: Optional[float]
    precision: Optional[float]
    recall: Optional[float]
    fpr: Optional[float]
    f1: Optional[float]
    auc: Optional[float] = None
    cost: Optional[float] = None

    def with_values(self, **kw) -> "MetricsRow":
        vals = {k: getattr(self, k) for k in self.__dataclass_fields__}
        vals.update(kw)
        return MetricsRow(**vals)


@dataclass(frozen=True)
class Curve:
    kind: str  # "roc" or "pr"
    x: np.ndarray
    y: np.ndarray

    @property
    def points(self):
        return list(zip(self.x.tolist(), self.y.tolist()))

    def __len__(self):
        return len(self.x)


@dataclass(frozen=True)
class CostModel:
    c_admin: float = 1.0
    fallback_fn_multiplier: float = 100.0

    def __post_init__(self):
        if not (math.isfinite(self.c_admin) and self.c_admin >= 0):
            raise ConfigError(f"c_admin must be a non-negative real, got {self.c_admin}")
        if not (math.isfinite(self.fallback_fn_multiplier) and self.fallback_fn_multiplier >= 0):
            raise ConfigError("fallback_fn_multiplier must be a non-negative real")


def _check_scores(scores, labels):
    s = np.asarray(scores, dtype=float).ravel()
    y = np.asarray(labels).ravel()
    if s.shape != y.shape:
        raise DataError(f"length mismatch: {len(s)} scores vs {len(y)} labels")
    if s.size == 0:
        raise DataError("no scores to evaluate")
    if not np.isin(y, (0, 1)).all():
        raise DataError("labels must be 0/1")
    if np.isnan(s).any():
        raise DataError("scores contain NaN")
    return s, y.astype(np.int8)


def _check_threshold(threshold):
    if not 0.0 < threshold < 1.0:
        raise ConfigError(f"threshold must be in (0, 1), got {threshold}")


def outcomes(scores, labels, threshold: float = 0.5) -> np.ndarray:
    """Per-instance outcome codes (TN, FP, FN, TP); positive iff score >= threshold."""
    _check_threshold(threshold)
    s, y = _check_scores(scores, labels)
    return (2 * y + (s >= threshold)).astype(np.int8)


def confusion(scores, labels, threshold: float = 0.5) -> ConfusionMatrix:
    counts = np.bincount(outcomes(scores, labels, threshold), minlength=4)
    return ConfusionMatrix(tp=counts[TP], fp=counts[FP], fn=counts[FN], tn=counts[TN])


def _ratio(num, den):
    return None if den == 0 else num / den


def scalar_metrics(cm: ConfusionMatrix, round_pr: Optional[int] = None) -> MetricsRow:
    """Accuracy, precision, recall, FPR and F1 from confusion counts.

    ``round_pr`` rounds precision and recall to that many decimals before
    combining them into F1, the convention behind published 4-decimal
    tables. The default combines them exactly.
    """
    if cm.total == 0:
        raise DataError("empty confusion matrix")
    precision = _ratio(cm.tp, cm.tp + cm.fp)
    recall = _ratio(cm.tp, cm.tp + cm.fn)
    f1 = None
    if precision is not None and recall is not None:
        p, r = precision, recall
        if round_pr is not None:
            p, r = round(p, round_pr), round(r, round_pr)
        # both zero means no true positives at all: a real 0, not 0/0
        f1 = 0.0 if p + r == 0 else 2 * p * r / (p + r)
    return MetricsRow(
        accuracy=(cm.tp + cm.tn) / cm.total,
        precision=precision,
        recall=recall,
        fpr=_ratio(cm.fp, cm.fp + cm.tn),
        f1=f1,
    )


def _sweep(s, y):
    """Cumulative (tp, fp) after each distinct threshold, scores descending."""
    order = np.argsort(-s, kind="stable")
    s, y = s[order], y[order]
    last = np.r_[np.flatnonzero(np.diff(s) != 0), len(s) - 1]
    tps = np.cumsum(y)[last]
    fps = (last + 1) - tps
    return tps.astype(np.int64), fps.astype(np.int64), s[last]


def roc_auc(scores, labels):
    """ROC curve over grouped thresholds and its trapezoid area.

    The area is accumulated on integer counts, so it equals the rank
    statistic P(s+ > s-) + P(s+ == s-) / 2 up to one final division.
    """
    s, y = _check_scores(scores, labels)
    P = int(y.sum())
    N = len(y) - P
    if P == 0 or N == 0:
        raise UndefinedMetricError("AUC is undefined when only one class is present")
    tps, fps, _ = _sweep(s, y)
    tps = np.r_[0, tps]
    fps = np.r_[0, fps]
    twice_area = int(np.sum(np.diff(fps) * (tps[1:] + tps[:-1])))
    auc = twice_area / (2.0 * P * N)
    return Curve("roc", fps / N, tps / P), auc


def pr_curve(scores, labels) -> Curve:
    """(recall, precision) points, starting from the (0, 1) endpoint."""
    s, y = _check_scores(scores, labels)
    P = int(y.sum())
    if P == 0:
        raise UndefinedMetricError("precision-recall curve needs at least one positive")
    tps, fps, _ = _sweep(s, y)
    return Curve("pr", np.r_[0.0, tps / P], np.r_[1.0, tps / (tps + fps)])


def total_cost(codes, amounts=None, model: CostModel = CostModel()) -> float:
    """Misclassification cost summed over instances.

    TP and FP cost ``c_admin``; TN costs nothing; FN costs the instance's
    amount, or ``fallback_fn_multiplier * c_admin`` without amounts.
    """
    codes = np.asarray(codes).ravel()
    if not np.isin(codes, (TN, FP, FN, TP)).all():
        raise DataError("unknown outcome code")
    n_admin = int(np.count_nonzero((codes == TP) | (codes == FP)))
    fn = codes == FN
    if amounts is None:
        fn_cost = int(fn.sum()) * model.fallback_fn_multiplier * model.c_admin
    else:
        amounts = np.asarray(amounts, dtype=float).ravel()
        if amounts.shape != codes.shape:
            raise DataError(f"{len(amounts)} amounts for {len(codes)} outcomes")
        if (amounts < 0).any() or not np.isfinite(amounts).all():
            raise DataError("amounts must be finite and non-negative")
        fn_cost = float(amounts[fn].sum())
    return float(n_admin * model.c_admin + fn_cost)


def evaluate(scores, labels, amounts=None, threshold=0.5, cost_model: CostModel = CostModel()):
    """Confusion matrix, full metrics row and both curves for one score vector.

    AUC (and the ROC curve) are ``None`` when the labels hold one class.
    """
    codes = outcomes(scores, labels, threshold)
    counts = np.bincount(codes, minlength=4)
    cm = ConfusionMatrix(tp=counts[TP], fp=counts[FP], fn=counts[FN], tn=counts[TN])
    try:
        roc, auc = roc_auc(scores, labels)
    except UndefinedMetricError:
        roc, auc = None, None
    pr = pr_curve(scores, labels) if counts[TP] + counts[FN] > 0 else None
    row = scalar_metrics(cm).with_values(auc=auc, cost=total_cost(codes, amounts, cost_model))
    return cm, row, roc, pr


def simplify_curve(curve: Curve) -> Curve:
    """Drop interior points of horizontal or vertical runs.

    The polyline (and hence the trapezoid area) is unchanged; a ROC curve
    over P positives keeps at most about 2P + 2 corners.
    """
    x, y = curve.x, curve.y
    if len(x) < 3:
        return curve
    flat = ((x[:-2] == x[1:-1]) & (x[1:-1] == x[2:])) | ((y[:-2] == y[1:-1]) & (y[1:-1] == y[2:]))
    keep = np.r_[True, ~flat, True]
    return Curve(curve.kind, x[keep], y[keep])


def write_curve(curve: Curve, path, simplify: bool = False) -> Path:
    path = Path(path)
    if simplify:
        curve = simplify_curve(curve)
    with open(path, "w", newline="") as fh:
        fh.write(f"# kind={curve.kind}\n")
        fh.write("x,y\n")
        for x, y in zip(curve.x.tolist(), curve.y.tolist()):
            fh.write(f"{x!r},{y!r}\n")
    return path


def read_curve(path) -> Curve:
    with open(path) as fh:
        head = fh.readline().strip()
        if not head.startswith("# kind="):
            raise DataError(f"{path}: missing kind header")
        kind = head.split("=", 1)[1]
        if fh.readline().strip() != "x,y":
            raise DataError(f"{path}: expected x,y columns")
        xy = np.array([[float(v) for v in line.split(",")] for line in fh if line.strip()])
    xy = xy.reshape(-1, 2)
    return Curve(kind, xy[:, 0], xy[:, 1])

"""Training-set resampling: random over/under-sampling and the SMOTE family.

All samplers are pure functions of ``(Dataset, ResampleMethod)``. Synthetic
rows are appended after the surviving original rows and receive negative
``row_ids`` (-1, -2, ...). Interpolated rows record their parentage so the
convex-combination property can be audited afterwards.
"""
from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field, replace
from typing import Optional

import numpy as np

from .data import Dataset, ImbalanceStats, imbalance_stats
from .errors import ConfigError, DataError
from .neighbors import check_metric, kneighbors
from .seeding import rng as make_rng

KINDS = ("full", "ros", "rus", "smote", "smote_tomek", "smote_enn", "borderline_smote", "adasyn")

# names used in result tables (test_run prefix) and accepted config aliases
DISPLAY = {
    "full": "full",
    "ros": "ROS",
    "rus": "RUS",
    "smote": "SMOTE",
    "smote_tomek": "SMOTETomek",
    "smote_enn": "SMOTEENN",
    "borderline_smote": "BLSMOTE",
    "adasyn": "ADASYN",
}
_ALIASES = {
    "smotetomek": "smote_tomek",
    "smoteenn": "smote_enn",
    "borderlinesmote": "borderline_smote",
    "blsmote": "borderline_smote",
}


def canonical_kind(name: str) -> str:
    key = name.strip().lower().replace("-", "_")
    key = _ALIASES.get(key.replace("_", ""), key)
    if key not in KINDS:
        raise ConfigError(f"unknown resampler {name!r}; expected one of {KINDS}")
    return key


@dataclass(frozen=True)
class ResampleMethod:
    kind: str = "full"
    k_neighbors: int = 5
    m_neighbors: int = 10
    beta: float = 1.0
    metric: str = "euclidean"
    seed: int = 0
    enn_k: int = 3

    def __post_init__(self):
        object.__setattr__(self, "kind", canonical_kind(self.kind))
        check_metric(self.metric)
        if self.k_neighbors < 1 or self.k_neighbors % 2 == 0:
            raise ConfigError(f"k_neighbors must be odd and >= 1, got {self.k_neighbors}")
        if self.m_neighbors < 1:
            raise ConfigError(f"m_neighbors must be >= 1, got {self.m_neighbors}")
        if not 0.0 < self.beta <= 1.0:
            raise ConfigError(f"beta must be in (0, 1], got {self.beta}")
        if self.enn_k < 1:
            raise ConfigError(f"enn_k must be >= 1, got {self.enn_k}")

    @property
    def display(self) -> str:
        return DISPLAY[self.kind]


@dataclass(frozen=True)
class Parentage:
    """For synthetic row i: ``s = x + gap * (partner - x)``."""

    synthetic_ids: np.ndarray
    parent_ids: np.ndarray
    partner_ids: np.ndarray
    gaps: np.ndarray


@dataclass(frozen=True)
class ResampleReport:
    method: ResampleMethod
    before: ImbalanceStats
    after: ImbalanceStats
    n_synthetic: int
    n_removed: int
    synthetic_by_class: dict = field(default_factory=lambda: {0: 0, 1: 0})
    removed_by_class: dict = field(default_factory=lambda: {0: 0, 1: 0})
    flags: tuple = ()
    parentage: Optional[Parentage] = None

    def balanced_ledger(self) -> bool:
        maj = self.before.n_majority + self.synthetic_by_class[0] - self.removed_by_class[0]
        mnr = self.before.n_minority + self.synthetic_by_class[1] - self.removed_by_class[1]
        return maj == self.after.n_majority and mnr == self.after.n_minority

    def to_json(self) -> str:
        record = {
            "method": asdict(self.method),
            "before": self.before.as_dict(),
            "after": self.after.as_dict(),
            "n_synthetic": self.n_synthetic,
            "n_removed": self.n_removed,
            "synthetic_by_class": {str(k): v for k, v in self.synthetic_by_class.items()},
            "removed_by_class": {str(k): v for k, v in self.removed_by_class.items()},
            "flags": list(self.flags),
        }
        return json.dumps(record, sort_keys=True)


def _report(method, before: Dataset, after: Dataset, synth=(0, 0), removed=(0, 0), flags=(), parentage=None):
    return ResampleReport(
        method,
        imbalance_stats(before),
        imbalance_stats(after),
        synth[0] + synth[1],
        removed[0] + removed[1],
        {0: synth[0], 1: synth[1]},
        {0: removed[0], 1: removed[1]},
        tuple(flags),
        parentage,
    )


def _check_minority(data: Dataset, what: str):
    data.require_both_classes(what)


# --------------------------------------------------------------------- random


def random_oversample(data: Dataset, seed: int = 0, method: Optional[ResampleMethod] = None):
    """Duplicate randomly chosen minority rows (with replacement) up to parity."""
    _check_minority(data, "random oversampling")
    method = method or ResampleMethod("ros", seed=seed)
    gen = make_rng(method.seed)
    minority = np.flatnonzero(data.labels == 1)
    n_new = max(0, data.n_majority - data.n_minority)
    picks = minority[gen.integers(0, len(minority), size=n_new)]
    out = _append_rows(
        data,
        data.features[picks],
        data.amounts[picks] if data.amounts is not None else None,
    )
    # a duplicate is the zero-gap interpolation of its source with itself
    src = data.row_ids[picks].copy()
    parentage = Parentage(out.row_ids[len(data):].copy(), src, src.copy(), np.zeros(n_new))
    return out, _report(method, data, out, synth=(0, n_new), parentage=parentage)


def random_undersample(data: Dataset, seed: int = 0, method: Optional[ResampleMethod] = None):
    """Drop randomly chosen majority rows (without replacement) down to parity."""
    _check_minority(data, "random undersampling")
    method = method or ResampleMethod("rus", seed=seed)
    gen = make_rng(method.seed)
    majority = np.flatnonzero(data.labels == 0)
    n_keep = min(len(majority), data.n_minority)
    kept = np.sort(gen.choice(majority, size=n_keep, replace=False))
    keep = np.sort(np.concatenate([kept, np.flatnonzero(data.labels == 1)]))
    out = data.subset(keep)
    return out, _report(method, data, out, removed=(len(majority) - n_keep, 0))


def _append_rows(data: Dataset, X_new, amounts_new) -> Dataset:
    n_new = len(X_new)
    if n_new == 0:
        return data
    start = min(0, int(data.row_ids.min())) - 1
    new_ids = np.arange(start, start - n_new, -1)
    amounts = None
    if data.amounts is not None:
        amounts = np.concatenate([data.amounts, amounts_new])
    return Dataset(
        np.vstack([data.features, X_new]),
        np.concatenate([data.labels, np.ones(n_new, dtype=np.int8)]),
        amounts,
        data.feature_names,
        np.concatenate([data.row_ids, new_ids]),
    )


# ---------------------------------------------------------------- SMOTE core


def _minority_neighbors(data: Dataset, method: ResampleMethod):
    """Positions of minority rows and each one's k nearest minority rows."""
    minority = np.flatnonzero(data.labels == 1)
    k = method.k_neighbors
    if len(minority) <= k:
        raise ConfigError(
            f"{len(minority)} minority rows cannot supply k_neighbors={k} neighbors "
            f"per sample; lower k_neighbors below {len(minority)}"
        )
    Xm = data.features[minority]
    nn, _ = kneighbors(Xm, Xm, k, method.metric, exclude=np.arange(len(minority)))
    return minority, nn


def _interpolate(data: Dataset, minority, nn, parents, gen):
    """Synthesize one row per entry of ``parents`` (positions into ``minority``)."""
    n_new = len(parents)
    cols = gen.integers(0, nn.shape[1], size=n_new)
    gaps = gen.random(n_new)
    partners = nn[parents, cols]
    x = data.features[minority[parents]]
    z = data.features[minority[partners]]
    X_new = x + gaps[:, None] * (z - x)
    amounts_new = None
    if data.amounts is not None:
        ax = data.amounts[minority[parents]]
        az = data.amounts[minority[partners]]
        amounts_new = ax + gaps * (az - ax)
    out = _append_rows(data, X_new, amounts_new)
    parentage = Parentage(
        out.row_ids[len(data):].copy(),
        data.row_ids[minority[parents]].copy(),
        data.row_ids[minority[partners]].copy(),
        gaps,
    )
    return out, parentage


def smote(data: Dataset, method: Optional[ResampleMethod] = None):
    """Interpolate ``n_majority - n_minority`` synthetic minority rows.

    Each synthetic row lies on the segment from a uniformly chosen minority
    row toward one of its ``k_neighbors`` nearest minority neighbors.
    """
    method = method or ResampleMethod("smote")
    _check_minority(data, "SMOTE")
    minority, nn = _minority_neighbors(data, method)
    gen = make_rng(method.seed)
    n_new = max(0, data.n_majority - data.n_minority)
    parents = gen.integers(0, len(minority), size=n_new)
    out, parentage = _interpolate(data, minority, nn, parents, gen)
    return out, _report(method, data, out, synth=(0, n_new), parentage=parentage)


# ----------------------------------------------------------- cleaning rules


def tomek_links(data: Dataset, metric: str = "euclidean"):
    """Mutual 1-NN pairs of opposite class as ``(minority_pos, majority_pos)``."""
    _check_minority(data, "Tomek link search")
    n = len(data)
    nn, _ = kneighbors(data.features, data.features, 1, metric, exclude=np.arange(n))
    nn = nn[:, 0]
    i = np.flatnonzero(data.labels == 1)
    j = nn[i]
    mutual = (nn[j] == i) & (data.labels[j] == 0)
    return [(int(a), int(b)) for a, b in zip(i[mutual], j[mutual])]


def enn_filter(data: Dataset, metric: str = "euclidean", k: int = 3):
    """Remove majority rows whose k nearest neighbors mostly disagree with them.

    Minority rows are never removed. Returns the cleaned dataset and the
    removed positions.
    """
    _check_minority(data, "edited nearest neighbours")
    if k < 1 or k >= len(data):
        raise ConfigError(f"ENN k={k} must be in [1, {len(data) - 1}]")
    majority = np.flatnonzero(data.labels == 0)
    nn, _ = kneighbors(data.features, data.features[majority], k, metric, exclude=majority)
    minority_votes = data.labels[nn].sum(axis=1)
    removed = majority[2 * minority_votes > k]
    keep = np.setdiff1d(np.arange(len(data)), removed)
    return data.subset(keep), removed


def smote_tomek(data: Dataset, method: Optional[ResampleMethod] = None):
    method = method or ResampleMethod("smote_tomek")
    augmented, rep = smote(data, replace(method, kind="smote"))
    links = tomek_links(augmented, method.metric)
    drop = np.array(sorted({b for _, b in links}), dtype=np.int64)
    out = augmented.subset(np.setdiff1d(np.arange(len(augmented)), drop))
    flags = ("tomek_links=%d" % len(links),)
    return out, _report(
        method, data, out, synth=(0, rep.n_synthetic), removed=(len(drop), 0),
        flags=flags, parentage=rep.parentage,
    )


def smote_enn(data: Dataset, method: Optional[ResampleMethod] = None):
    method = method or ResampleMethod("smote_enn")
    augmented, rep = smote(data, replace(method, kind="smote"))
    out, removed = enn_filter(augmented, method.metric, method.enn_k)
    return out, _report(
        method, data, out, synth=(0, rep.n_synthetic), removed=(len(removed), 0),
        parentage=rep.parentage,
    )


# ------------------------------------------------------ adaptive oversampling


def borderline_categories(data: Dataset, method: ResampleMethod):
    """Label each minority row 'noise', 'danger' or 'safe' from its m-NN.

    The neighborhood spans all rows. All-majority neighborhoods are noise;
    more than half majority is danger; everything else is safe.
    """
    minority = np.flatnonzero(data.labels == 1)
    m = method.m_neighbors
    nn, _ = kneighbors(data.features, data.features[minority], m, method.metric, exclude=minority)
    n_major = m - data.labels[nn].sum(axis=1)
    cats = np.full(len(minority), "safe", dtype=object)
    cats[2 * n_major > m] = "danger"
    cats[n_major == m] = "noise"
    return minority, cats


def borderline_smote(data: Dataset, method: Optional[ResampleMethod] = None):
    """Borderline-1 SMOTE: interpolate only from minority rows in danger."""
    method = method or ResampleMethod("borderline_smote")
    _check_minority(data, "borderline SMOTE")
    need = max(method.k_neighbors, method.m_neighbors)
    if data.n_minority <= need:
        raise ConfigError(
            f"borderline SMOTE needs more than max(k_neighbors, m_neighbors)={need} "
            f"minority rows, got {data.n_minority}; lower k_neighbors/m_neighbors"
        )
    if method.m_neighbors >= len(data):
        raise ConfigError(f"m_neighbors={method.m_neighbors} exceeds available rows")
    minority, cats = borderline_categories(data, method)
    danger = np.flatnonzero(cats == "danger")
    if len(danger) == 0:
        flags = ["no_danger_fallback_smote"]
        if (cats == "noise").all():
            flags.append("all_noise")
        out, rep = smote(data, replace(method, kind="smote"))
        return out, _report(
            method, data, out, synth=(0, rep.n_synthetic), flags=flags, parentage=rep.parentage
        )
    _, nn = _minority_neighbors(data, method)
    gen = make_rng(method.seed)
    n_new = max(0, data.n_majority - data.n_minority)
    parents = danger[gen.integers(0, len(danger), size=n_new)]
    out, parentage = _interpolate(data, minority, nn, parents, gen)
    flags = ("danger=%d" % len(danger), "noise=%d" % int((cats == "noise").sum()))
    return out, _report(method, data, out, synth=(0, n_new), flags=flags, parentage=parentage)


def adasyn_allocation(data: Dataset, method: ResampleMethod):
    """Per-minority-row synthetic counts and the hardness ratios behind them.

    Returns ``(minority_positions, ratios, counts, uniform_fallback)``.
    """
    minority = np.flatnonzero(data.labels == 1)
    k = method.k_neighbors
    if k >= len(data):
        raise ConfigError(f"k_neighbors={k} exceeds available rows")
    nn, _ = kneighbors(data.features, data.features[minority], k, method.metric, exclude=minority)
    ratios = (k - data.labels[nn].sum(axis=1)) / k
    total = int(math.floor(method.beta * (data.n_majority - data.n_minority) + 0.5))
    total = max(total, 0)
    if ratios.sum() == 0:
        counts = np.full(len(minority), total // len(minority), dtype=np.int64)
        counts[: total % len(minority)] += 1
        return minority, ratios, counts, True
    share = ratios / ratios.sum()
    counts = np.floor(share * total + 0.5).astype(np.int64)
    return minority, ratios, counts, False


def adasyn(data: Dataset, method: Optional[ResampleMethod] = None):
    """Adaptive synthetic sampling: more synthetics where majority crowds in."""
    method = method or ResampleMethod("adasyn")
    _check_minority(data, "ADASYN")
    minority, nn = _minority_neighbors(data, method)
    _, _, counts, fallback = adasyn_allocation(data, method)
    gen = make_rng(method.seed)
    parents = np.repeat(np.arange(len(minority)), counts)
    out, parentage = _interpolate(data, minority, nn, parents, gen)
    flags = ("uniform_allocation_fallback",) if fallback else ()
    return out, _report(method, data, out, synth=(0, len(parents)), flags=flags, parentage=parentage)


# ------------------------------------------------------------------ dispatch


def apply(method: ResampleMethod, train: Dataset):
    """Resample a training set according to ``method``; ``full`` is identity."""
    kind = method.kind
    if kind == "full":
        return train, _report(method, train, train)
    if kind == "ros":
        return random_oversample(train, method=method)
    if kind == "rus":
        return random_undersample(train, method=method)
    return _DISPATCH[kind](train, method)


_DISPATCH = {
    "smote": smote,
    "smote_tomek": smote_tomek,
    "smote_enn": smote_enn,
    "borderline_smote": borderline_smote,
    "adasyn": adasyn,
}

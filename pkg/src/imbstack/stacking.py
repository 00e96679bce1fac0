"""Two-member stacked generalization.

Each member is a (resampler, classifier) pair. Its level-1 input is an
out-of-fold probability: for fold f the member's resampler sees only the
other folds, its classifier is fit there, and fold f is scored. The meta
learner is trained on the two resulting columns; for inference the members
are refit on the whole (resampled) training set.
"""
from __future__ import annotations

import dataclasses
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from . import classifiers as clf
from .data import Dataset
from .errors import ConfigError, DataError, ImbStackError
from .resampling import ResampleMethod, apply
from .results import ResultRow, sort_key
from .seeding import derive_seed
from .seeding import rng as make_rng

METRICS = ("f1", "auc")
ROLES = ("weak_strong", "weak_weak", "strong_strong", "tree_tree")
ROLE_TAGS = {"weak_strong": ("w", "s"), "weak_weak": ("w", "w"),
             "strong_strong": ("s", "s"), "tree_tree": ("tree", "tree")}


@dataclass(frozen=True)
class Member:
    resampler: ResampleMethod
    classifier: clf.ClassifierSpec

    @property
    def key(self) -> str:
        return f"{self.resampler.display} {self.classifier.display}"


@dataclass(frozen=True)
class StackSpec:
    members: tuple
    selection_metric: str
    selection_role: str
    stack_id: int

    def __post_init__(self):
        object.__setattr__(self, "members", tuple(self.members))
        if len(self.members) != 2:
            raise ConfigError(f"a stack has exactly 2 members, got {len(self.members)}")
        if self.selection_metric not in METRICS:
            raise ConfigError(f"selection_metric must be one of {METRICS}")
        if self.selection_role not in ROLES:
            raise ConfigError(f"selection_role must be one of {ROLES}")

    def labels(self):
        """Member labels in the ``w-SMOTE GaussianNB`` style."""
        tags = ROLE_TAGS[self.selection_role]
        return [f"{t}-{m.key}" for t, m in zip(tags, self.members)]


@dataclass(frozen=True)
class FoldFit:
    """Audit record of one member fit on the out-of-fold path."""

    member: str
    fold: int  # -1 for the full refit
    train_ids: np.ndarray  # every id the classifier saw, synthetic ones included
    parent_ids: np.ndarray  # real ids that seeded synthetic rows
    scored_ids: np.ndarray
    fingerprint: str
    resample_flags: tuple = ()
    warnings: tuple = ()

    def leaks(self) -> bool:
        seen = np.union1d(self.train_ids, self.parent_ids)
        return bool(np.intersect1d(seen, self.scored_ids).size)


@dataclass(frozen=True, eq=False)
class MetaDataset:
    meta_features: np.ndarray
    labels: np.ndarray
    row_ids: np.ndarray
    fold_assignment: np.ndarray
    audits: tuple = ()

    def as_dataset(self) -> Dataset:
        return Dataset(self.meta_features, self.labels, None, ("m1", "m2"), self.row_ids)

    def leakage_free(self) -> bool:
        return not any(a.leaks() for a in self.audits)


@dataclass(frozen=True, eq=False)
class TrainedStack:
    spec: StackSpec
    members: tuple  # refit TrainedModels, in spec order
    meta: clf.TrainedModel
    meta_data: MetaDataset


def stratified_folds(labels, folds: int, seed: int) -> np.ndarray:
    """Fold id per row: each class is shuffled and dealt round-robin."""
    if folds < 2:
        raise ConfigError(f"folds must be >= 2, got {folds}")
    labels = np.asarray(labels)
    out = np.empty(len(labels), dtype=np.int64)
    gen = make_rng(seed)
    for c in (0, 1):
        idx = np.flatnonzero(labels == c)
        if len(idx) < folds:
            raise DataError(f"class {c} has {len(idx)} rows, fewer than {folds} folds")
        out[gen.permutation(idx)] = np.arange(len(idx)) % folds
    return out


def member_seed(seed: int, member: Member, fold: int) -> tuple:
    base = derive_seed(seed, member.key, fold)
    return derive_seed(base, "resample"), derive_seed(base, "fit")


def fit_member(member: Member, train: Dataset, seed: int, fold: int = -1):
    """Resample ``train`` and fit the member's classifier on it.

    Returns ``(TrainedModel, ResampleReport)``. Seeds depend only on
    ``(seed, member, fold)``, never on the stack the member sits in.
    """
    s_res, s_fit = member_seed(seed, member, fold)
    resampled, report = apply(dataclasses.replace(member.resampler, seed=s_res), train)
    model = clf.fit(member.classifier.with_seed(s_fit), resampled)
    return model, report


def _audit(member, fold, model, report, scored_ids):
    parents = np.empty(0, dtype=np.int64)
    if report.parentage is not None:
        parents = np.union1d(report.parentage.parent_ids, report.parentage.partner_ids)
    return FoldFit(member.key, fold, model.train_ids, parents, np.asarray(scored_ids),
                   model.fingerprint, report.flags, model.warnings)


def member_fold(member: Member, train: Dataset, fold_ids, fold: int, seed: int):
    """Fit on every fold but ``fold``; score ``fold``. Returns (scores, FoldFit)."""
    hold = fold_ids == fold
    model, report = fit_member(member, train.subset(np.flatnonzero(~hold)), seed, fold)
    scores = clf.predict_proba(model, train.features[hold])
    return scores, _audit(member, fold, model, report, train.row_ids[hold])


def member_oof(member: Member, train: Dataset, fold_ids, seed: int):
    """Out-of-fold scores for one member over all folds."""
    scores = np.empty(len(train))
    audits = []
    for f in range(int(fold_ids.max()) + 1):
        try:
            s, a = member_fold(member, train, fold_ids, f, seed)
        except ImbStackError as exc:
            raise type(exc)(f"member {member.key}, fold {f}: {exc}") from exc
        scores[fold_ids == f] = s
        audits.append(a)
    return scores, audits


def assemble_meta(train: Dataset, fold_ids, columns, audits=()) -> MetaDataset:
    X = np.column_stack(columns)
    if X.shape[1] != 2 or not ((X >= 0) & (X <= 1)).all():
        raise DataError("meta-features must be two columns of probabilities")
    return MetaDataset(X, train.labels.copy(), train.row_ids.copy(), np.asarray(fold_ids), tuple(audits))


def build_meta_features(members: Sequence[Member], train: Dataset, folds: int = 5, seed: int = 0) -> MetaDataset:
    train.require_both_classes("stacking")
    fold_ids = stratified_folds(train.labels, folds, derive_seed(seed, "folds"))
    columns, audits = [], []
    for m in members:
        s, a = member_oof(m, train, fold_ids, seed)
        columns.append(s)
        audits.extend(a)
    return assemble_meta(train, fold_ids, columns, audits)


def meta_seed(seed: int, spec: StackSpec, meta_spec: clf.ClassifierSpec) -> int:
    return derive_seed(seed, f"{spec.stack_id}metalearner", meta_spec.display)


def fit_stack(spec: StackSpec, meta_spec: clf.ClassifierSpec, train: Dataset, folds: int = 5, seed: int = 0) -> TrainedStack:
    """Out-of-fold meta-features, meta learner fit on them, members refit."""
    meta = build_meta_features(spec.members, train, folds, seed)
    refits = tuple(fit_member(m, train, seed)[0] for m in spec.members)
    model = clf.fit(meta_spec.with_seed(meta_seed(seed, spec, meta_spec)), meta.as_dataset())
    return TrainedStack(spec, refits, model, meta)


def compose(meta_model: clf.TrainedModel, member_scores) -> np.ndarray:
    return clf.predict_proba(meta_model, np.column_stack(member_scores))


def predict_stack(stack: TrainedStack, features) -> np.ndarray:
    X = np.atleast_2d(np.asarray(features, dtype=float))
    return compose(stack.meta, [clf.predict_proba(m, X) for m in stack.members])


# ------------------------------------------------------------------ selection


def _member_of(row: ResultRow, resamplers, classifiers) -> Member:
    return Member(resamplers[row.resampler_kind], classifiers[row.classifier_kind])


def select_stacks(rows: Sequence[ResultRow], resamplers: Optional[dict] = None,
                  classifiers: Optional[dict] = None) -> list:
    """Eight stacks from a level-0 grid.

    For F1 (ids 1-4) and then AUC (ids 5-8): (weakest, strongest),
    (weakest, second weakest), (strongest, second strongest) and the two
    strongest tree-family pairs. Ranking ties break on F1, accuracy, then
    name; rows whose metric is NA are never selected. ``resamplers`` and
    ``classifiers`` map kinds to the configured objects (defaults used
    for missing kinds).
    """
    resamplers = dict(resamplers or {})
    classifiers = dict(classifiers or {})
    for r in rows:
        resamplers.setdefault(r.resampler_kind, ResampleMethod(r.resampler_kind))
        classifiers.setdefault(r.classifier_kind, clf.ClassifierSpec(r.classifier_kind))
    specs = []
    for offset, metric in ((0, "f1"), (4, "auc")):
        ranked = sorted((r for r in rows if r.metric(metric) is not None), key=lambda r: sort_key(r, metric))
        if len(ranked) < 2:
            raise DataError(f"need at least 2 rows with defined {metric} to build stacks")
        trees = [r for r in ranked if r.classifier_kind in clf.TREE_FAMILY]
        if len(trees) < 2:
            raise DataError(f"need at least 2 tree-family rows with defined {metric}")
        picks = {
            "weak_strong": (ranked[-1], ranked[0]),
            "weak_weak": (ranked[-1], ranked[-2]),
            "strong_strong": (ranked[0], ranked[1]),
            "tree_tree": (trees[0], trees[1]),
        }
        for i, role in enumerate(ROLES):
            members = tuple(_member_of(r, resamplers, classifiers) for r in picks[role])
            specs.append(StackSpec(members, metric, role, offset + i + 1))
    return specs

"""Level-0 grid, level-1 stacking phase and the merged ranking.

Every task seed is ``derive_seed(master, test_run, classifier)`` (or an
analogous tuple for resampling and stacking steps), tasks run through an
order-preserving map, and BLAS is pinned to one thread inside each task, so
the worker count never changes a result.
"""
from __future__ import annotations

import dataclasses
import time
import traceback
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from threadpoolctl import threadpool_limits

from . import classifiers as clf
from .config import ExperimentConfig
from .data import Dataset, SplitPair, load_csv, stratified_split, synthesize_dataset
from .errors import ImbStackError
from .metrics import evaluate
from .resampling import ResampleMethod, apply
from .results import ELEMENT, LEVEL0, META, ResultRow, rank, sort_key
from .seeding import derive_seed
from .stacking import (
    assemble_meta, compose, fit_member, member_fold, member_seed, meta_seed,
    select_stacks, stratified_folds,
)


@dataclass(frozen=True)
class Audit:
    """One fit checked against the partition it was evaluated on."""

    context: str
    fingerprint: str
    n_train: int
    n_eval: int
    overlap: int  # |(train ids U synthetic parents) & eval ids|


@dataclass
class PhaseResult:
    rows: list
    scores: dict  # (test_run, classifier) -> score vector on the eval partition
    eval_labels: np.ndarray
    eval_amounts: Optional[np.ndarray]
    eval_ids: np.ndarray
    audits: list = field(default_factory=list)
    notes: dict = field(default_factory=dict)


@dataclass(frozen=True)
class StackImprovement:
    stack_id: int
    constituent_aucs: tuple
    best_meta_auc: Optional[float]
    best_meta: Optional[str]
    improved: bool


@dataclass
class Report:
    rows: list  # merged, ranked
    level0: PhaseResult
    level1: PhaseResult
    improvements: list
    config: ExperimentConfig


# ---------------------------------------------------------------- execution


def _run_task(task):
    fn, args = task
    with threadpool_limits(limits=1):
        return fn(*args)


def _map(fn, arglist, workers):
    tasks = [(fn, a) for a in arglist]
    if workers <= 1 or len(tasks) <= 1:
        return [_run_task(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=min(workers, len(tasks))) as pool:
        return list(pool.map(_run_task, tasks))


def _describe(exc):
    if isinstance(exc, ImbStackError):
        return f"{type(exc).__name__}: {exc}"
    return f"{type(exc).__name__}: {exc} [{traceback.format_exc(limit=-1).strip().splitlines()[-1]}]"


def _audit(context, model_ids, parent_ids, eval_ids, fingerprint):
    seen = np.union1d(model_ids, parent_ids)
    return Audit(context, fingerprint, len(model_ids), len(eval_ids), int(np.intersect1d(seen, eval_ids).size))


def _parents(report):
    if report is None or report.parentage is None:
        return np.empty(0, dtype=np.int64)
    return np.union1d(report.parentage.parent_ids, report.parentage.partner_ids)


def _score_row(test_run, classifier, scores, test: Dataset, config, seed, wall, phase, **extra):
    cm, metrics, _, _ = evaluate(scores, test.labels, test.amounts, config.threshold, config.cost_model)
    return ResultRow(test_run, classifier, cm, metrics, seed, wall, phase, **extra)


def _na_row(test_run, classifier, seed, phase, diagnostic, **extra):
    return ResultRow(test_run, classifier, None, None, seed, 0.0, phase, diagnostic=diagnostic, **extra)


# --------------------------------------------------------------------- data


def load_data(config: ExperimentConfig) -> Dataset:
    if config.data_path is not None:
        return load_csv(config.data_path, config.label_column, config.amount_column)
    s = config.synthetic
    return synthesize_dataset(s.n, s.ir, s.dims, s.overlap, s.seed)


def phase_split(data: Dataset, config: ExperimentConfig, level: int) -> SplitPair:
    frac = config.level0_test_fraction if level == 0 else config.level1_test_fraction
    return stratified_split(data, frac, derive_seed(config.seed, "split", level))


# ------------------------------------------------------------------ level 0


def _resample_task(method: ResampleMethod, train: Dataset, seed: int):
    t0 = time.perf_counter()
    try:
        out, report = apply(dataclasses.replace(method, seed=seed), train)
    except Exception as exc:  # noqa: BLE001 - isolated into NA rows
        return None, None, _describe(exc), time.perf_counter() - t0
    return out, report, None, time.perf_counter() - t0


def _level0_cell(test_run, spec, seed, resampled, parents, test, config):
    t0 = time.perf_counter()
    model = clf.fit(spec.with_seed(seed), resampled)
    scores = clf.predict_proba(model, test.features)
    wall = time.perf_counter() - t0
    audit = _audit(f"level0 {test_run} {spec.display}", model.train_ids, parents, test.row_ids, model.fingerprint)
    return scores, wall, audit, model.warnings


def _safe(fn, *args):
    try:
        return fn(*args), None
    except Exception as exc:  # noqa: BLE001 - isolated into NA rows
        return None, _describe(exc)


def run_level0(config: ExperimentConfig, data: Optional[Dataset] = None) -> PhaseResult:
    data = load_data(config) if data is None else data
    split = phase_split(data, config, 0)
    train, test = split.train, split.test

    runs = [f"0{r.display}" for r in config.resamplers]
    res_out = _map(
        _resample_task,
        [(r, train, derive_seed(config.seed, run, "resample")) for r, run in zip(config.resamplers, runs)],
        config.workers,
    )

    cells = []
    for method, run, (resampled, report, err, _) in zip(config.resamplers, runs, res_out):
        for spec in config.classifiers:
            cells.append((method, run, spec, derive_seed(config.seed, run, spec.display), resampled, report, err))
    todo = [(run, spec, seed, rs, _parents(rep), test, config)
            for _, run, spec, seed, rs, rep, err in cells if err is None]
    results = iter(_map(_safe_level0_cell, todo, config.workers))

    rows, scores, audits = [], {}, []
    warnings = {}
    for method, run, spec, seed, _, _, err in cells:
        extra = dict(resampler_kind=method.kind, classifier_kind=spec.kind)
        if err is not None:
            rows.append(_na_row(run, spec.display, seed, LEVEL0, f"resampling failed: {err}", **extra))
            continue
        out, diag = next(results)
        if diag is not None:
            rows.append(_na_row(run, spec.display, seed, LEVEL0, diag, **extra))
            continue
        s, wall, audit, warns = out
        audits.append(audit)
        if warns:
            warnings[f"{run} {spec.display}"] = list(warns)
        scores[(run, spec.display)] = s
        rows.append(_score_row(run, spec.display, s, test, config, seed, wall, LEVEL0, **extra))

    notes = {
        "resampling": {
            run: {"seconds": t, "error": err, "report": None if rep is None else rep.to_json()}
            for run, (_, rep, err, t) in zip(runs, res_out)
        },
        "warnings": warnings,
        "split": {"train": len(train), "test": len(test)},
    }
    return PhaseResult(rows, scores, test.labels.copy(), None if test.amounts is None else test.amounts.copy(),
                       test.row_ids.copy(), audits, notes)


def _safe_level0_cell(*args):
    return _safe(_level0_cell, *args)


# ------------------------------------------------------------------ level 1


def _member_task(member, train, fold_ids, fold, test, seed):
    """fold >= 0: out-of-fold scores; fold == -1: full refit scored on test."""
    t0 = time.perf_counter()
    if fold >= 0:
        s, fit = member_fold(member, train, fold_ids, fold, seed)
        audit = _audit(f"level1 member {member.key} fold {fold}", fit.train_ids, fit.parent_ids,
                       fit.scored_ids, fit.fingerprint)
        return s, audit, time.perf_counter() - t0, fit.warnings
    model, report = fit_member(member, train, seed)
    s = clf.predict_proba(model, test.features)
    audit = _audit(f"level1 member {member.key} refit", model.train_ids, _parents(report), test.row_ids,
                   model.fingerprint)
    return s, audit, time.perf_counter() - t0, model.warnings


def _safe_member_task(*args):
    return _safe(_member_task, *args)


def _meta_cell(test_run, meta_spec, seed, train, fold_ids, oof_cols, test, test_cols):
    t0 = time.perf_counter()
    meta = assemble_meta(train, fold_ids, oof_cols)
    model = clf.fit(meta_spec.with_seed(seed), meta.as_dataset())
    scores = compose(model, test_cols)
    wall = time.perf_counter() - t0
    audit = _audit(f"level1 {test_run} {meta_spec.display}", model.train_ids, np.empty(0, np.int64),
                   test.row_ids, model.fingerprint)
    return scores, wall, audit, model.warnings


def _safe_meta_cell(*args):
    return _safe(_meta_cell, *args)


def run_level1(config: ExperimentConfig, level0_rows, data: Optional[Dataset] = None) -> PhaseResult:
    data = load_data(config) if data is None else data
    split = phase_split(data, config, 1)
    train, test = split.train, split.test
    specs = select_stacks(
        level0_rows,
        {r.kind: r for r in config.resamplers},
        {c.kind: c for c in config.classifiers},
    )
    fold_ids = stratified_folds(train.labels, config.folds, derive_seed(config.seed, "folds"))

    members = []
    for spec in specs:
        for m in spec.members:
            if m not in members:
                members.append(m)
    folds = list(range(config.folds)) + [-1]
    jobs = [(m, train, fold_ids, f, test, config.seed) for m in members for f in folds]
    outs = _map(_safe_member_task, jobs, config.workers)

    audits, warnings = [], {}
    oof, test_scores, member_err, member_time = {}, {}, {}, {}
    for (m, _, _, f, _, _), (out, diag) in zip(jobs, outs):
        if diag is not None:
            member_err.setdefault(m, f"member {m.key} fold {f}: {diag}")
            continue
        s, audit, wall, warns = out
        audits.append(audit)
        member_time[m] = member_time.get(m, 0.0) + wall
        if warns:
            warnings[f"member {m.key}"] = list(warns)
        if f >= 0:
            oof.setdefault(m, np.empty(len(train)))[fold_ids == f] = s
        else:
            test_scores[m] = s

    rows, scores = [], {}
    meta_jobs, meta_keys = [], []
    for spec in specs:
        failed = [member_err[m] for m in spec.members if m in member_err]
        run = f"{spec.stack_id}metalearner"
        for meta_spec in config.meta_learners:
            seed = meta_seed(config.seed, spec, meta_spec)
            extra = dict(classifier_kind=meta_spec.kind, stack_id=spec.stack_id)
            if failed:
                rows.append(_na_row(run, meta_spec.display, seed, META, "; ".join(failed), **extra))
                continue
            meta_keys.append((len(rows), run, meta_spec, seed, extra))
            rows.append(None)
            meta_jobs.append((run, meta_spec, seed, train, fold_ids,
                              [oof[m] for m in spec.members], test, [test_scores[m] for m in spec.members]))
    for (pos, run, meta_spec, seed, extra), (out, diag) in zip(meta_keys, _map(_safe_meta_cell, meta_jobs, config.workers)):
        if diag is not None:
            rows[pos] = _na_row(run, meta_spec.display, seed, META, diag, **extra)
            continue
        s, wall, audit, warns = out
        audits.append(audit)
        if warns:
            warnings[f"{run} {meta_spec.display}"] = list(warns)
        scores[(run, meta_spec.display)] = s
        rows[pos] = _score_row(run, meta_spec.display, s, test, config, seed, wall, META, **extra)

    for spec in specs:
        for m in spec.members:
            run = f"{spec.stack_id}stack{m.resampler.display}"
            seed = member_seed(config.seed, m, -1)[1]
            extra = dict(resampler_kind=m.resampler.kind, classifier_kind=m.classifier.kind, stack_id=spec.stack_id)
            if m in member_err:
                rows.append(_na_row(run, m.classifier.display, seed, ELEMENT, member_err[m], **extra))
                continue
            scores[(run, m.classifier.display)] = test_scores[m]
            rows.append(_score_row(run, m.classifier.display, test_scores[m], test, config, seed,
                                   member_time[m], ELEMENT, **extra))

    notes = {
        "stacks": [
            {"stack_id": s.stack_id, "metric": s.selection_metric, "role": s.selection_role, "members": s.labels()}
            for s in specs
        ],
        "warnings": warnings,
        "split": {"train": len(train), "test": len(test)},
    }
    return PhaseResult(rows, scores, test.labels.copy(), None if test.amounts is None else test.amounts.copy(),
                       test.row_ids.copy(), audits, notes)


# ------------------------------------------------------------------ ranking


def improvement_flags(level0_rows, level1_rows, specs) -> list:
    """Per stack: does some meta learner beat both constituents' level-0 AUC?"""
    auc0 = {(r.resampler_kind, r.classifier_kind): r.metric("auc") for r in level0_rows}
    out = []
    for spec in specs:
        cons = tuple(auc0.get((m.resampler.kind, m.classifier.kind)) for m in spec.members)
        bar = max((c for c in cons if c is not None), default=-np.inf)
        metas = [r for r in level1_rows
                 if r.phase == META and r.stack_id == spec.stack_id and r.metric("auc") is not None]
        best = max(metas, key=lambda r: (r.metric("auc"), r.classifier), default=None)
        best_auc = None if best is None else best.metric("auc")
        out.append(StackImprovement(
            spec.stack_id, cons, best_auc, None if best is None else best.classifier,
            best_auc is not None and best_auc > bar,
        ))
    return out


def rank_and_merge(level0_rows, level1_rows):
    """Merged rows ordered by (AUC, F1, accuracy desc; name asc) with F1 ranks."""
    merged = list(level0_rows) + list(level1_rows)
    f1_rank = {id(r): i + 1 for i, r in enumerate(sorted(merged, key=lambda r: sort_key(r, "f1")))}
    return [dataclasses.replace(r, f1_rank=f1_rank[id(r)]) for r in rank(merged, "auc")]


def run_experiment(config: ExperimentConfig, data: Optional[Dataset] = None) -> Report:
    data = load_data(config) if data is None else data
    t0 = time.perf_counter()
    level0 = run_level0(config, data)
    t1 = time.perf_counter()
    level1 = run_level1(config, level0.rows, data)
    t2 = time.perf_counter()
    level0.notes["seconds"] = t1 - t0
    level1.notes["seconds"] = t2 - t1
    return build_report(config, level0, level1)


def build_report(config, level0: PhaseResult, level1: PhaseResult) -> Report:
    specs = select_stacks(
        level0.rows, {r.kind: r for r in config.resamplers}, {c.kind: c for c in config.classifiers}
    )
    return Report(
        rank_and_merge(level0.rows, level1.rows),
        level0, level1,
        improvement_flags(level0.rows, level1.rows, specs),
        config,
    )

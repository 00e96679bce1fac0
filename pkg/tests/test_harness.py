import json

import numpy as np
import pytest

from imbstack import classifiers as clf
from imbstack import harness
from imbstack import report as rp
from imbstack import stacking as sk
from imbstack.config import from_mapping
from imbstack.metrics import evaluate
from imbstack.results import sort_key
from conftest import TINY
from oracles import improvement_oracle

SMALL = dict(TINY, resamplers=["smote", "ros"], classifiers=["gaussian_nb", "c45", "csl", "knn"],
             meta_learners=["gaussian_nb", "c45"])


def small_config(**kw):
    return from_mapping(dict(SMALL, **kw))


# -------------------------------------------------------------- cardinality


def test_row_counts(tiny_report):
    rep = tiny_report
    assert len(rep.level0.rows) == 88
    assert len(rep.level1.rows) == 104
    assert sum(r.phase == "meta" for r in rep.level1.rows) == 88
    assert sum(r.phase == "stack_element" for r in rep.level1.rows) == 16
    assert len(rep.rows) == 192
    assert len({r.name for r in rep.rows}) == 192


def test_names_follow_the_table_convention(tiny_report):
    names = {r.name for r in tiny_report.rows}
    assert "0SMOTE GaussianNB" in names and "0full C4.5" in names
    assert "1metalearner MLP" in names and "8metalearner RUSBoost" in names
    elements = [r.test_run for r in tiny_report.level1.rows if r.phase == "stack_element"]
    assert all(t[0] in "12345678" and "stack" in t for t in elements)


def test_trimmed_lists_scale_the_grid():
    rep = harness.run_experiment(small_config())
    assert len(rep.level0.rows) == 2 * 4
    assert len(rep.level1.rows) == 8 * 2 + 16


# ------------------------------------------------------------------ ranking


def test_rows_sorted_by_auc_then_f1_then_accuracy(tiny_report):
    keys = [sort_key(r, "auc") for r in tiny_report.rows]
    assert keys == sorted(keys)
    f1 = sorted(tiny_report.rows, key=lambda r: r.f1_rank)
    assert [r.f1_rank for r in f1] == list(range(1, 193))
    fk = [sort_key(r, "f1") for r in f1]
    assert fk == sorted(fk)


def test_improvement_flags_match_oracle(tiny_report):
    oracle = improvement_oracle(tiny_report.rows)
    got = {i.stack_id: i.improved for i in tiny_report.improvements}
    assert got == oracle and len(got) == 8


# ------------------------------------------------------------------ leakage


def test_every_fit_is_disjoint_from_its_eval_partition(tiny_report):
    audits = tiny_report.level0.audits + tiny_report.level1.audits
    members = {lab.split("-", 1)[1] for s in tiny_report.level1.notes["stacks"] for lab in s["members"]}
    # level-0 cells, each distinct member's folds plus its refit, meta fits
    assert len(audits) == 88 + len(members) * 6 + 88
    assert max(a.overlap for a in audits) == 0


def test_level_splits_are_stratified(tiny_config, tiny_data):
    for level in (0, 1):
        s = harness.phase_split(tiny_data, tiny_config, level)
        assert not np.intersect1d(s.train.row_ids, s.test.row_ids).size
        assert abs(s.test.n_minority / len(s.test) - tiny_data.n_minority / len(tiny_data)) < 0.005


# --------------------------------------------------------------- agreement


def test_meta_row_equals_library_stack(tiny_config, tiny_data, tiny_report):
    """The harness's meta scores are exactly what fit_stack/predict_stack give."""
    specs = sk.select_stacks(tiny_report.level0.rows,
                             {r.kind: r for r in tiny_config.resamplers},
                             {c.kind: c for c in tiny_config.classifiers})
    spec = specs[4]
    meta_spec = next(c for c in tiny_config.meta_learners if c.kind == "gaussian_nb")
    split = harness.phase_split(tiny_data, tiny_config, 1)
    stack = sk.fit_stack(spec, meta_spec, split.train, tiny_config.folds, tiny_config.seed)
    scores = sk.predict_stack(stack, split.test.features)
    got = tiny_report.level1.scores[("5metalearner", "GaussianNB")]
    assert np.array_equal(scores, got)


def test_level0_row_equals_direct_fit(tiny_config, tiny_data, tiny_report):
    from imbstack.resampling import apply
    from imbstack.seeding import derive_seed
    import dataclasses

    split = harness.phase_split(tiny_data, tiny_config, 0)
    method = next(r for r in tiny_config.resamplers if r.kind == "smote")
    out, _ = apply(dataclasses.replace(method, seed=derive_seed(0, "0SMOTE", "resample")), split.train)
    spec = next(c for c in tiny_config.classifiers if c.kind == "c45")
    model = clf.fit(spec.with_seed(derive_seed(0, "0SMOTE", "C4.5")), out)
    s = clf.predict_proba(model, split.test.features)
    row = next(r for r in tiny_report.rows if r.name == "0SMOTE C4.5")
    cm, metrics, _, _ = evaluate(s, split.test.labels, split.test.amounts)
    assert row.cm == cm and row.metrics == metrics


# -------------------------------------------------------------- determinism


def test_results_identical_across_worker_counts(tmp_path):
    files = []
    for w in (1, 2):
        rep = harness.run_experiment(small_config(workers=w))
        files.append(rp.write_results_csv(rep.rows, tmp_path / f"r{w}.csv").read_bytes())
    assert files[0] == files[1]


def test_seed_changes_results():
    a = harness.run_level0(small_config(seed=1))
    b = harness.run_level0(small_config(seed=2))
    assert [r.cm for r in a.rows] != [r.cm for r in b.rows]


# ---------------------------------------------------------- failure isolation


class Boom:
    def __init__(self, **kw):
        pass

    def fit(self, X, y, seed=None):
        raise RuntimeError("boom")


def test_failed_cell_becomes_na_row(monkeypatch):
    monkeypatch.setitem(clf._BUILDERS, "knn", Boom)
    rep = harness.run_experiment(small_config())
    na = [r for r in rep.rows if r.is_na]
    assert {r.name for r in na if r.phase == "level0"} == {"0SMOTE KNN", "0ROS KNN"}
    assert all("boom" in r.diagnostic for r in na)
    assert len(rep.rows) == 8 + 32
    # NA rows sort last and are never stack members
    assert all(r.is_na for r in rep.rows[-len(na):])
    assert all("KNN" not in lab for s in rep.level1.notes["stacks"] for lab in s["members"])
    text = rp.summary_text(rep)
    assert "Failed cells" in text and "boom" in text


def test_failed_resampler_fills_its_row_with_na(monkeypatch):
    from imbstack import resampling

    def broken(data, method):
        raise resampling.DataError("no minority")

    monkeypatch.setitem(resampling._DISPATCH, "smote", broken)
    rows = harness.run_level0(small_config()).rows
    bad = [r for r in rows if r.is_na]
    assert len(bad) == 4 and all(r.diagnostic.startswith("resampling failed") for r in bad)


# ------------------------------------------------------------------- report


def test_emit_report_files(tiny_report, tmp_path):
    files = rp.emit_report(tiny_report, tmp_path)
    res = rp.read_results_csv(files["results"])
    assert list(res[0]) == list(rp.RESULT_COLUMNS) and len(res) == 192
    man = json.loads(files["manifest"].read_text())
    assert man["counts"] == {"level0": 88, "level1": 104, "combined": 192, "na": 0}
    assert man["leakage_audit"]["max_overlap"] == 0
    assert len(man["improvements"]) == 8
    for f in man["files"]:
        assert (tmp_path / f).exists()
    curve = (tmp_path / man["files"][0]).read_text()
    assert "np." not in curve
    ranking = (tmp_path / "ranking.csv").read_text().splitlines()
    assert ranking[0].split(",") == list(rp.RANKING_COLUMNS) and len(ranking) == 193


def test_phase_save_load_roundtrip(tiny_config, tiny_report, tmp_path):
    rp.save_phase(tiny_report.level0, tmp_path, "level0")
    rp.save_phase(tiny_report.level1, tmp_path, "level1")
    l0 = rp.load_phase(tmp_path, "level0")
    l1 = rp.load_phase(tmp_path, "level1")
    assert l0.rows == tiny_report.level0.rows
    rebuilt = harness.build_report(tiny_config, l0, l1)
    a = rp.write_results_csv(rebuilt.rows, tmp_path / "a.csv").read_bytes()
    b = rp.write_results_csv(tiny_report.rows, tmp_path / "b.csv").read_bytes()
    assert a == b


def test_render_row_rounding(tiny_report):
    line = rp.render_row(tiny_report.rows[0])
    r = tiny_report.rows[0]
    assert f"{r.metric('accuracy'):.4f}" in line and f"{r.metric('auc'):.2f}" in line
    text = rp.summary_text(tiny_report)
    for title in ("Stacks", "Level-0 by F1", "Level-1 by F1", "Combined by AUC"):
        assert title in text


# ------------------------------------------------------------ worked examples


def test_single_classifier_and_single_meta_learner():
    rep = harness.run_experiment(from_mapping(dict(TINY, classifiers=["c45"], meta_learners=["gaussian_nb"])))
    assert len(rep.level0.rows) == 8
    assert len(rep.level1.rows) == 8 + 16


def test_each_stack_id_appears_once_per_meta_learner(tiny_report):
    metas = [r for r in tiny_report.level1.rows if r.phase == "meta"]
    n_meta = len(tiny_report.config.meta_learners)
    for sid in range(1, 9):
        assert sum(r.stack_id == sid for r in metas) == n_meta == 11

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from imbstack import classifiers as clf
from imbstack import stacking as sk
from imbstack.errors import ConfigError, DataError
from imbstack.metrics import ConfusionMatrix, MetricsRow
from imbstack.resampling import ResampleMethod
from imbstack.metrics import roc_auc
from imbstack.results import ResultRow, rank
from conftest import TINY, make_blobs
from reference_rows import ROWS

NB = clf.ClassifierSpec("gaussian_nb")
TREE = clf.ClassifierSpec("c45", {"max_depth": 3})


def member(res="smote", c=NB):
    return sk.Member(ResampleMethod(res), c)


@given(st.integers(5, 60), st.integers(5, 30), st.integers(2, 5), st.integers(0, 2**31))
@settings(max_examples=60, deadline=None)
def test_folds_are_stratified_round_robin(n_maj, n_min, folds, seed):
    y = np.r_[np.zeros(n_maj, int), np.ones(n_min, int)]
    f = sk.stratified_folds(y, folds, seed)
    for c, n in ((0, n_maj), (1, n_min)):
        counts = np.bincount(f[y == c], minlength=folds)
        assert counts.max() - counts.min() <= 1 and counts.sum() == n


def test_folds_errors():
    with pytest.raises(DataError):
        sk.stratified_folds([0] * 10 + [1] * 3, 5, 0)
    with pytest.raises(ConfigError):
        sk.stratified_folds([0, 1], 1, 0)


def test_stack_spec_validation_and_labels():
    s = sk.StackSpec((member(), member("ros", TREE)), "auc", "weak_strong", 5)
    assert s.labels() == ["w-SMOTE GaussianNB", "s-ROS C4.5"]
    with pytest.raises(ConfigError):
        sk.StackSpec((member(),), "auc", "weak_strong", 1)
    with pytest.raises(ConfigError):
        sk.StackSpec((member(), member()), "cost", "weak_strong", 1)


def test_meta_features_are_out_of_fold_and_leak_free():
    train = make_blobs(150, 30, 3, seed=1, shift=1.5)
    meta = sk.build_meta_features([member(), member("ros", TREE)], train, folds=5, seed=3)
    assert meta.meta_features.shape == (180, 2)
    assert ((meta.meta_features >= 0) & (meta.meta_features <= 1)).all()
    assert len(meta.audits) == 10 and meta.leakage_free()
    for a in meta.audits:
        assert not np.intersect1d(a.train_ids, a.scored_ids).size
        assert not np.intersect1d(a.parent_ids, a.scored_ids).size
    # each fold's column is exactly what a fit on the other folds scores
    f = meta.fold_assignment
    s, audit = sk.member_fold(member(), train, f, 2, 3)
    assert np.array_equal(meta.meta_features[f == 2, 0], s)


def test_leak_detector_fires():
    fit = sk.FoldFit("m", 0, np.array([1, 2]), np.array([7]), np.array([7, 8]), "x")
    assert fit.leaks()


def test_member_seeds_do_not_depend_on_stack():
    m = member()
    assert sk.member_seed(0, m, 1) == sk.member_seed(0, member(), 1)
    assert sk.member_seed(0, m, 1) != sk.member_seed(0, m, 2)


def test_fit_and_predict_stack():
    train = make_blobs(150, 30, 3, seed=1, shift=1.5)
    test = make_blobs(100, 20, 3, seed=2, shift=1.5)
    spec = sk.StackSpec((member(), member("ros", TREE)), "auc", "weak_strong", 1)
    stack = sk.fit_stack(spec, clf.ClassifierSpec("gaussian_nb"), train, folds=3, seed=4)
    p = sk.predict_stack(stack, test.features)
    assert p.shape == (120,) and ((p >= 0) & (p <= 1)).all()
    again = sk.predict_stack(sk.fit_stack(spec, clf.ClassifierSpec("gaussian_nb"), train, folds=3, seed=4),
                             test.features)
    assert np.array_equal(p, again)
    assert stack.meta.n_features == 2


def test_meta_feature_validation():
    train = make_blobs(10, 5, 2)
    with pytest.raises(DataError):
        sk.assemble_meta(train, np.zeros(15), [np.full(15, 2.0), np.zeros(15)])


def row(res, c, auc, f1, acc=0.9):
    m = MetricsRow(acc, 0.5, 0.5, 0.1, f1, auc, 1.0)
    return ResultRow(f"0{res}", c, ConfusionMatrix(1, 1, 1, 1), m, 0,
                     resampler_kind=res.lower(), classifier_kind=clf.canonical_kind(c))


def grid():
    return [
        row("SMOTE", "GaussianNB", 0.90, 0.30),
        row("SMOTE", "C4.5", 0.80, 0.70),
        row("ROS", "CSL", 0.95, 0.60),
        row("ROS", "KNN", 0.70, 0.20),
        row("RUS", "GBM", 0.99, 0.10),
        row("RUS", "C4.5", 0.85, 0.65),
    ]


def test_select_stacks_roles():
    specs = sk.select_stacks(grid())
    assert [s.stack_id for s in specs] == list(range(1, 9))
    keys = [[m.key for m in s.members] for s in specs]
    # F1 order: SMOTE C4.5 .70, RUS C4.5 .65, ROS CSL .60, SMOTE NB .30, ROS KNN .20, RUS GBM .10
    assert keys[0] == ["RUS GBM", "SMOTE C4.5"]
    assert keys[1] == ["RUS GBM", "ROS KNN"]
    assert keys[2] == ["SMOTE C4.5", "RUS C4.5"]
    assert keys[3] == ["SMOTE C4.5", "RUS C4.5"]
    # AUC order: RUS GBM .99, ROS CSL .95, SMOTE NB .90, RUS C4.5 .85, SMOTE C4.5 .80, ROS KNN .70
    assert keys[4] == ["ROS KNN", "RUS GBM"]
    assert keys[5] == ["ROS KNN", "SMOTE C4.5"]
    assert keys[6] == ["RUS GBM", "ROS CSL"]
    assert keys[7] == ["ROS CSL", "RUS C4.5"]
    assert [s.selection_role for s in specs[:4]] == list(sk.ROLES)


def test_select_stacks_skips_na_and_breaks_ties():
    rows = grid()
    rows.append(ResultRow("0full", "MLP", None, None, 0, resampler_kind="full", classifier_kind="mlp"))
    rows.append(row("full", "SVM", 0.99, 0.10, acc=0.95))  # ties RUS GBM on AUC and F1, wins on accuracy
    specs = sk.select_stacks(rows)
    assert all("MLP" not in m.key for s in specs for m in s.members)
    assert [m.key for m in specs[6].members] == ["full SVM", "RUS GBM"]


def test_select_stacks_needs_tree_rows():
    rows = [r for r in grid() if r.classifier_kind not in clf.TREE_FAMILY]
    with pytest.raises(DataError, match="tree-family"):
        sk.select_stacks(rows)
    with pytest.raises(DataError):
        sk.select_stacks(grid()[:1])


# ------------------------------------------------------------ worked examples


def tiny_params(kind):
    return {k.split(".", 1)[1]: v for k, v in TINY.items() if k.startswith(kind + ".")}


def test_two_folds_on_four_rows():
    f = sk.stratified_folds([0, 0, 1, 1], 2, 9)
    assert sorted(f[:2]) == [0, 1] and sorted(f[2:]) == [0, 1]


def test_full_resampler_gives_plain_cross_validation():
    train = make_blobs(60, 20, 2, seed=3, shift=1.0)
    m = member("full", NB)
    folds = sk.stratified_folds(train.labels, 4, 5)
    oof, _ = sk.member_oof(m, train, folds, 11)
    for f in range(4):
        _, s_fit = sk.member_seed(11, m, f)
        hold = folds == f
        model = clf.fit(NB.with_seed(s_fit), train.subset(np.flatnonzero(~hold)))
        assert np.array_equal(oof[hold], clf.predict_proba(model, train.features[hold]))


def test_perfect_meta_features_give_perfect_auc():
    train = make_blobs(40, 10, 2)
    y = train.labels.astype(float)
    meta = sk.assemble_meta(train, np.zeros(50), [y, y])
    model = clf.fit(TREE, meta.as_dataset())
    assert roc_auc(clf.predict_proba(model, meta.meta_features), train.labels)[1] == 1.0


def test_every_learner_works_as_meta_learner():
    train = make_blobs(80, 25, 2, seed=5, shift=1.5)
    spec = sk.StackSpec((member(), member("ros", TREE)), "auc", "weak_strong", 2)
    X = make_blobs(20, 5, 2, seed=6).features
    for kind in clf.KINDS:
        stack = sk.fit_stack(spec, clf.ClassifierSpec(kind, tiny_params(kind)), train, folds=3, seed=1)
        p = sk.predict_stack(stack, X)
        assert p.shape == (25,) and ((p >= 0) & (p <= 1)).all(), kind


def test_constant_member_scores_give_constant_meta_output():
    train = make_blobs(60, 20, 2, seed=2, shift=1.0)
    model = clf.fit(TREE, sk.assemble_meta(train, np.zeros(80), [train.features[:, 0] % 1, np.full(80, 0.5)]).as_dataset())
    out = sk.compose(model, [np.full(7, 0.3), np.full(7, 0.5)])
    assert len(set(out.tolist())) == 1


def test_stack_prediction_is_meta_of_member_refits():
    train = make_blobs(120, 30, 3, seed=7, shift=1.5)
    spec = sk.StackSpec((member("rus", NB), member("smote", TREE)), "f1", "weak_weak", 2)
    stack = sk.fit_stack(spec, TREE, train, folds=3, seed=3)
    rows = make_blobs(3, 2, 3, seed=8).features
    by_hand = [
        clf.predict_proba(stack.meta, np.array([[clf.predict_proba(stack.members[0], r[None])[0],
                                                clf.predict_proba(stack.members[1], r[None])[0]]]))[0]
        for r in rows
    ]
    assert sk.predict_stack(stack, rows).tolist() == by_hand


def test_dominating_pair_fills_the_strong_slots():
    rows = grid() + [row("ADASYN", "MLP", 0.999, 0.95), row("full", "SVM", 0.998, 0.90)]
    specs = sk.select_stacks(rows)
    for sid in (1, 5):
        assert specs[sid - 1].members[1].key == "ADASYN MLP"
    for sid in (3, 7):
        assert [m.key for m in specs[sid - 1].members] == ["ADASYN MLP", "full SVM"]


def _selection_oracle(rows):
    out = []
    for metric in ("f1", "auc"):
        live = [r for r in rows if r.metric(metric) is not None]
        best = sorted(live, key=lambda r: (-r.metric(metric), -r.metric("f1"), -r.metric("accuracy"),
                                           r.test_run, r.classifier))
        tree = [r for r in best if r.classifier in ("C4.5", "CSL")]
        for a, b in ((best[-1], best[0]), (best[-1], best[-2]), (best[0], best[1]), (tree[0], tree[1])):
            out.append([a.name, b.name])
    return out


@given(st.integers(0, 10_000))
@settings(max_examples=25, deadline=None)
def test_selection_over_a_full_grid_matches_resort(seed):
    gen = np.random.default_rng(seed)
    kinds = ("full", "ros", "rus", "smote", "smote_tomek", "smote_enn", "borderline_smote", "adasyn")
    rows = []
    for rk in kinds:
        for ck in clf.KINDS:
            # coarse values force plenty of ties
            auc, f1, acc = (round(float(v), 1) for v in gen.random(3))
            m = MetricsRow(acc, 0.5, 0.5, 0.1, f1, auc, 1.0)
            disp = ResampleMethod(rk).display
            rows.append(ResultRow(f"0{disp}", clf.DISPLAY[ck], ConfusionMatrix(1, 1, 1, 1), m, 0,
                                  resampler_kind=rk, classifier_kind=ck))
    assert len(rows) == 88
    got = [[f"0{m.key}" for m in s.members] for s in sk.select_stacks(rows)]
    assert got == _selection_oracle(rows)


def test_reference_rows_rank_meta_rows_first():
    rows = [ResultRow(run, c, ConfusionMatrix(tp, fp, fn, tn), MetricsRow(acc, None, None, None, f1, auc), 0)
            for run, c, tp, fp, fn, tn, acc, f1, auc in ROWS]
    top = [r.name for r in rank(rows)[:3]]
    assert top == ["6metalearner GBM", "1metalearner GaussianNB", "7metalearner EasyEnsemble"]

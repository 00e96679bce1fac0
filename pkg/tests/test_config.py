import pytest

from imbstack.config import ExperimentConfig, dump_config, from_mapping, load_config
from imbstack.errors import ConfigError


def test_defaults_cover_the_full_grid():
    cfg = ExperimentConfig()
    assert len(cfg.resamplers) == 8 and len(cfg.classifiers) == 11 and len(cfg.meta_learners) == 11
    assert (cfg.level0_test_fraction, cfg.level1_test_fraction, cfg.folds) == (0.4, 0.3, 5)
    s = cfg.synthetic
    assert (s.n, s.ir, s.dims, s.overlap) == (20000, 0.01, 8, 0.3)


def test_from_mapping_names_and_hyperparameters():
    cfg = from_mapping({
        "resamplers": ["SMOTETomek", "ros"],
        "classifiers": ["C4.5", "GBM"],
        "gbm.n_rounds": 7,
        "k_neighbors": 3,
        "c_admin": 2,
        "synthetic_n": 500,
    })
    assert [r.kind for r in cfg.resamplers] == ["smote_tomek", "ros"]
    assert all(r.k_neighbors == 3 for r in cfg.resamplers)
    gbm = cfg.classifiers[1]
    assert gbm.kind == "gbm" and gbm.params["n_rounds"] == 7
    assert cfg.meta_learners[[c.kind for c in cfg.meta_learners].index("gbm")].params["n_rounds"] == 7
    assert cfg.cost_model.c_admin == 2.0 and cfg.synthetic.n == 500


@pytest.mark.parametrize("doc", [
    {"bogus": 1},
    {"gbm.depth": 3},
    {"resamplers": ["nearmiss"]},
    {"classifiers": "knn"},
    {"folds": "five"},
    {"folds": 1},
    {"workers": 0},
    {"threshold": 1.5},
    {"resamplers": ["ros", "ROS"]},
    {"resamplers": []},
    {"svm.lam": -1.0},
])
def test_bad_documents_are_config_errors(doc):
    with pytest.raises(ConfigError):
        from_mapping(doc)


def test_roundtrip_through_toml(tmp_path):
    cfg = from_mapping({"classifiers": ["knn", "mlp"], "mlp.epochs": 3, "seed": 9, "amount_column": "Amount"})
    path = tmp_path / "c.toml"
    path.write_text(dump_config(cfg))
    assert load_config(path) == cfg
    assert from_mapping(cfg.to_dict()) == cfg


def test_load_config_errors(tmp_path):
    with pytest.raises(ConfigError, match="not found"):
        load_config(tmp_path / "none.toml")
    p = tmp_path / "nested.toml"
    p.write_text("[gbm]\nn_rounds = 3\n")
    with pytest.raises(ConfigError, match="flat"):
        load_config(p)
    p.write_text("seed = = 1\n")
    with pytest.raises(ConfigError):
        load_config(p)

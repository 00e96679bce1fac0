import numpy as np
import pytest

from imbstack.config import from_mapping
from imbstack.data import Dataset, synthesize_dataset

# learner sizes small enough that a whole two-level run takes seconds
TINY = {
    "synthetic_n": 3000,
    "synthetic_ir": 0.03,
    "csl.n_trees": 10,
    "bagging.n_trees": 5,
    "easy_ensemble.n_subsets": 2,
    "easy_ensemble.n_rounds": 10,
    "ada_boost.n_rounds": 10,
    "rus_boost.n_rounds": 10,
    "gbm.n_rounds": 10,
    "mlp.epochs": 5,
    "svm.epochs": 5,
}


def make_blobs(n_maj=60, n_min=20, d=3, seed=0, shift=2.0, amounts=False):
    gen = np.random.default_rng(seed)
    X = np.vstack([gen.standard_normal((n_maj, d)), shift + gen.standard_normal((n_min, d))])
    y = np.r_[np.zeros(n_maj, int), np.ones(n_min, int)]
    amt = gen.uniform(1, 100, n_maj + n_min) if amounts else None
    return Dataset(X, y, amt)


@pytest.fixture
def blobs():
    return make_blobs()


@pytest.fixture(scope="session")
def tiny_config():
    return from_mapping(dict(TINY))


@pytest.fixture(scope="session")
def tiny_data(tiny_config):
    s = tiny_config.synthetic
    return synthesize_dataset(s.n, s.ir, s.dims, s.overlap, s.seed)


@pytest.fixture(scope="session")
def tiny_report(tiny_config, tiny_data):
    from imbstack.harness import run_experiment

    return run_experiment(tiny_config, tiny_data)


def pytest_terminal_summary(terminalreporter):
    from acceptance_log import LINES

    if LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)

import numpy as np
import pytest
import scipy.sparse as sp

from mcgc.model import MultiViewDataset, View

ACCEPTANCE_LINES = []


def random_graph(rng, n, p=0.4):
    upper = np.triu(rng.random((n, n)) < p, k=1).astype(float)
    return sp.csr_matrix(upper + upper.T)


def random_dataset(rng, n=10, views=2, dim=3, clusters=2):
    vs = [View(random_graph(rng, n), rng.standard_normal((n, dim))) for _ in range(views)]
    labels = np.arange(n) % clusters
    return MultiViewDataset(n, vs, clusters, labels)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def two_view(rng):
    return random_dataset(rng)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)

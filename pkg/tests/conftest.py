import numpy as np
import pytest

from ardecomp.synth import generate_bipartite


@pytest.fixture
def het_fig():
    return generate_bipartite(4)


@pytest.fixture
def rng():
    return np.random.default_rng(20211206)


def random_symmetric(rng, n, scale=1.0):
    g = rng.normal(0.0, scale, (n, n))
    m = np.triu(g, 1)
    return m + m.T


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in RESULTS:
            terminalreporter.write_line(line)

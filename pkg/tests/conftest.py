import numpy as np
import pytest

from birthday_mcmc import graphs


@pytest.fixture
def rng():
    return np.random.default_rng(20241016)


def built_in_graphs(n):
    """Every built-in family at size n (n a power of two, 4 <= n <= 64)."""
    dim = n.bit_length() - 1
    return [
        graphs.complete_graph(n),
        graphs.glued_cliques(n),
        graphs.cycle(n),
        graphs.hypercube(dim),
        graphs.random_regular(n, 3, seed=n),
    ]


ACCEPTANCE_RESULTS = []


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for line in ACCEPTANCE_RESULTS:
        terminalreporter.write_line(line)

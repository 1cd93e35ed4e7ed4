import numpy as np
import pytest

from regdecomp.graph import Graph

ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


# Two ideal blocks: reference i sees every target of group v at distance
# BLOCK_MEANS[i, v] exactly.
BLOCK_MEANS = np.array([[1, 5], [2, 6], [5, 1], [6, 2]], dtype=float)
BLOCK_TRUTH = np.array([0, 0, 0, 0, 1, 1, 1, 1])


@pytest.fixture
def ideal_blocks():
    return BLOCK_MEANS[:, BLOCK_TRUTH].copy(), BLOCK_TRUTH.copy()


def make_graph(edges, n, directed=False):
    return Graph.from_edges(np.array(edges, dtype=np.int64).reshape(-1, 2), n, directed)


@pytest.fixture
def triangle():
    return make_graph([(0, 1), (1, 2), (0, 2)], 3)


@pytest.fixture
def path10():
    return make_graph([(i, i + 1) for i in range(9)], 10)


@pytest.fixture
def star5():
    return make_graph([(0, i) for i in range(1, 5)], 5)

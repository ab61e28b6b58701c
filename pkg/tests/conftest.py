import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from tvcn.graph import from_edges  # noqa: E402


def random_digraph(rng, n, p):
    edges = [(u, v) for u in range(n) for v in range(n) if u != v and rng.random() < p]
    return from_edges(n, edges), edges


def connected_random_digraph(rng, n, p):
    """Random digraph whose undirected view is connected (a random spanning path is added)."""
    order = rng.permutation(n)
    edges = {(int(order[i]), int(order[i + 1])) for i in range(n - 1)}
    edges |= {(u, v) for u in range(n) for v in range(n) if u != v and rng.random() < p}
    edges = sorted(edges)
    return from_edges(n, edges), edges


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    lines = getattr(mod, "RESULTS", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)

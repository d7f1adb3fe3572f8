import numpy as np
import pytest

from hororadon import Tree


def w(text: str) -> tuple:
    """Vertex from a digit string, e.g. w("01") == (0, 1)."""
    return tuple(int(c) for c in text)


@pytest.fixture(params=[2, 3], ids=["q2", "q3"])
def tree(request):
    return Tree(request.param)


@pytest.fixture
def tree2():
    return Tree(2)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def pytest_terminal_summary(terminalreporter):
    import sys
    mod = sys.modules.get("test_acceptance")
    lines = getattr(mod, "VERDICTS", [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines, key=lambda s: int(s.split()[1])):
            terminalreporter.write_line(line)

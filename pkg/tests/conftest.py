import numpy as np
import pytest
import scipy.linalg
from hypothesis import settings

from nilric.algebra import StructureTensor, act
from nilric.catalog import builtin

settings.register_profile("default", max_examples=40, deadline=None)
settings.load_profile("default")


@pytest.fixture
def h3():
    return builtin("heisenberg_3").tensor()


@pytest.fixture
def l53():
    return builtin("L_5_3").tensor()


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def random_two_step(rng, p=3, q=2):
    """Random 2-step nilpotent bracket: generators 1..p, central part p+1..p+q."""
    n = p + q
    c = np.zeros((n, n, n))
    for i in range(p):
        for j in range(i + 1, p):
            v = rng.standard_normal(q)
            c[i, j, p:] = v
            c[j, i, p:] = -v
    return StructureTensor(c)


SMALL_NAMES = ["heisenberg_3", "filiform_4", "L_5_3", "L_5_6", "L_5_9", "heisenberg_5", "free_2step_3gen"]


def mild_frame(rng, n, scale=0.4):
    """Random frame with moderate condition number, ``exp(scale S) (Id + N/2)``."""
    G = rng.standard_normal((n, n))
    S = scale * (G + G.T) / 2
    N = 0.5 * np.triu(rng.standard_normal((n, n)), 1)
    return scipy.linalg.expm(S) @ (np.eye(n) + N)


def random_nilpotent(rng):
    """A catalog bracket or a random 2-step bracket, moved by a random frame."""
    if rng.random() < 0.3:
        mu = random_two_step(rng, int(rng.integers(2, 5)), int(rng.integers(1, 3)))
    else:
        mu = builtin(SMALL_NAMES[rng.integers(len(SMALL_NAMES))]).tensor()
    return act(mild_frame(rng, mu.dim), mu)


# acceptance criteria report: one line per criterion, printed at the end of the run
ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)

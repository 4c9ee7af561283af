import random
import sys

import pytest
from hypothesis import strategies as st

from qkleitman.subspace import rref


@pytest.fixture
def rng():
    return random.Random(20261016)


@st.composite
def subspaces(draw, q=None, n=None, max_n=6):
    """Random subspace given by a random spanning list."""
    q = q if q is not None else draw(st.sampled_from([2, 3, 4]))
    n = n if n is not None else draw(st.integers(1, max_n))
    m = draw(st.integers(0, n + 1))
    rows = [draw(st.lists(st.integers(0, q - 1), min_size=n, max_size=n)) for _ in range(m)]
    return rref(rows, n, q)


@st.composite
def subspace_pairs(draw, max_n=6):
    q = draw(st.sampled_from([2, 3, 4]))
    n = draw(st.integers(1, max_n))
    return draw(subspaces(q=q, n=n)), draw(subspaces(q=q, n=n))


@st.composite
def subspace_triples(draw, max_n=6):
    q = draw(st.sampled_from([2, 3, 4]))
    n = draw(st.integers(1, max_n))
    return tuple(draw(subspaces(q=q, n=n)) for _ in range(3))


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for i, (ok, detail) in sorted(mod.RESULTS.items()):
        terminalreporter.write_line(f"criterion {i}: {'PASS' if ok else 'FAIL'}  {detail}")

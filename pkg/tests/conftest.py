import itertools
import random
import sys

import pytest
from hypothesis import strategies as st

from spinecensus.ograph import LETTERS, ClosedChainParams, Letter, OpenChainParams
from spinecensus.calibration import random_ograph

colors = st.integers(min_value=0, max_value=2)
letters = st.builds(Letter, colors, colors)


@st.composite
def open_chains(draw, min_n=2, max_n=8):
    n = draw(st.integers(min_value=min_n, max_value=max_n))
    word = draw(st.lists(letters, min_size=n - 1, max_size=n - 1))
    return OpenChainParams(n, draw(colors), draw(colors), tuple(word))


@st.composite
def closed_chains(draw, max_n=6):
    pairs = draw(st.lists(letters, min_size=1, max_size=max_n))
    return ClosedChainParams(tuple(pairs))


@st.composite
def ographs(draw, max_n=5):
    seed = draw(st.integers(min_value=0, max_value=2**32 - 1))
    n = draw(st.integers(min_value=1, max_value=max_n))
    return random_ograph(random.Random(seed), n)


def all_open_chains(n, alphas=range(3), deltas=range(3)):
    for a in alphas:
        for d in deltas:
            for w in itertools.product(LETTERS, repeat=n - 1):
                yield OpenChainParams(n, a, d, w)


@pytest.fixture(scope="session")
def rng():
    return random.Random(20240611)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for line in mod.report_lines():
        terminalreporter.write_line(line)

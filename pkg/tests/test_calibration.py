import pytest

from spinecensus.calibration import (
    CalibrationError,
    calibrate,
    calibrate_rotation,
    candidate_tables,
    chain_facts_hold,
)
from spinecensus.automaton import count_accepted
from spinecensus.census import ChainTracer
from spinecensus.invariants import homology_h1
from spinecensus.ograph import LETTERS, OpenChainParams, make_open_chain
from spinecensus.tracer import DEFAULT_MATCHING, is_single_face

import itertools


@pytest.fixture(scope="module")
def result():
    return calibrate()


def test_candidate_space():
    assert len(candidate_tables()) == 6**4


def test_selects_shipped_table(result):
    assert result.matching == DEFAULT_MATCHING
    assert result.classes == 1
    assert DEFAULT_MATCHING in result.mirror_survivors
    assert set(result.mirror_survivors) <= set(result.fact_survivors)


def test_survivor_counts_are_stable(result):
    # frozen from the exhaustive scan over all 1296 tables
    assert len(result.fact_survivors) == 12
    assert len(result.mirror_survivors) == 3


def test_default_table_passes_facts():
    assert chain_facts_hold(DEFAULT_MATCHING)


def test_invalid_candidates_are_rejected():
    with pytest.raises(CalibrationError, match="no consistent convention"):
        calibrate([((0, 1, 2), (0, 2, 3), (0, 1, 3), (0, 1, 2)), ((1, 1, 1),) * 4])


def test_rotation_keeps_colours():
    assert calibrate_rotation(DEFAULT_MATCHING) == (0, 1, 2)


def test_single_face_set_equals_counted_set():
    for n in range(2, 7):
        tracer = ChainTracer(n)
        hits = sum(
            tracer.relations(0, 0, w) is not None for w in itertools.product(range(9), repeat=n - 1)
        )
        assert hits == count_accepted(n - 1)


def test_one_face_instances_have_free_homology():
    for n in range(2, 5):
        for w in itertools.product(LETTERS, repeat=n - 1):
            g = make_open_chain(OpenChainParams(n, 0, 1, w))
            if is_single_face(g):
                assert homology_h1(g) == (n, [])

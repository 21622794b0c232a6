import json
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings

from _oracles import orbit_partition, single_face_tuples
from conftest import open_chains
from spinecensus.census import (
    AMPHICHIRAL,
    CHIRAL,
    CLOSED_CHAIN_FIRST,
    SCHEMA_VERSION,
    CensusError,
    ChainTracer,
    census_count,
    classify_chirality,
    closed_chain_exact_probability,
    closed_chain_monte_carlo,
    closed_chain_sample,
    cumulative_count,
    enumerate_canonical,
    enumerate_open_chain,
    export_gluing_table,
    gluing_table,
    merge_parts,
    validate_closed_chain,
    write_part,
)
from spinecensus.invariants import homology_h1
from spinecensus.ograph import (
    LETTERS,
    ClosedChainParams,
    OpenChainParams,
    canonical_form,
    make_closed_chain,
    make_open_chain,
    mirror_open_chain,
    open_chain_orbit,
)
from spinecensus.polyhedron import isomorphic
from spinecensus.tracer import face_count, is_single_face

RECORD_COUNTS = {2: 9, 3: 42, 4: 162, 5: 1620, 6: 10248, 7: 60048, 8: 469848}
AMPHICHIRAL_COUNTS = {2: 1, 3: 0, 4: 6, 5: 0, 6: 24}


def _params(n, a, d, w):
    return OpenChainParams(n, a, d, tuple(LETTERS[c] for c in w))


@pytest.mark.parametrize("n", [2, 3, 4, 5])
def test_dedup_matches_brute_force_orbits(n):
    orbits = orbit_partition(single_face_tuples(n))
    reps = sorted(min(o, key=OpenChainParams.key) for o in orbits)
    got = [(_params(n, a, d, w), size) for a, d, w, size in enumerate_canonical(n)]
    assert [p for p, _ in got] == sorted(reps, key=OpenChainParams.key)
    sizes = {min(o, key=OpenChainParams.key): len(o) for o in orbits}
    assert all(sizes[p] == s for p, s in got)
    assert sum(s for _, s in got) == sum(len(o) for o in orbits)


@pytest.mark.parametrize("n", [2, 3, 4, 5, 6, 7])
def test_orbit_sizes_add_up_to_accepted_tuples(n):
    # alpha, delta in {0, 1} times accepted words
    from spinecensus.automaton import count_accepted

    assert sum(s for *_, s in enumerate_canonical(n)) == 4 * count_accepted(n - 1)
    assert census_count(n) == RECORD_COUNTS[n]


def test_cumulative_count():
    assert cumulative_count(5) == 9 + 42 + 162 + 1620
    with pytest.raises(ValueError):
        cumulative_count(1)


def test_sharding_does_not_change_order():
    for depth in (0, 1, 2, 3):
        assert list(enumerate_canonical(5, prefix_depth=depth)) == list(enumerate_canonical(5))


def test_records_are_sorted_unique_and_canonical():
    recs = list(enumerate_open_chain(5, tv_levels=(3,)))
    keys = [r.params.key() for r in recs]
    assert keys == sorted(keys) and len(set(keys)) == len(keys)
    for r in recs[::37]:
        assert canonical_form(r.params) == r.params
        assert len(open_chain_orbit(r.params)) == r.orbit_size
        assert is_single_face(make_open_chain(r.params))


def test_orbit_members_are_isomorphic_polyhedra(rng):
    recs = list(enumerate_canonical(4))
    for a, d, w, _ in rng.sample(recs, 25):
        p = _params(4, a, d, w)
        g = make_open_chain(p)
        for q in open_chain_orbit(p):
            assert isomorphic(g, make_open_chain(q), "preserving")


def test_parallel_matches_serial():
    serial = [r.to_json() for r in enumerate_open_chain(5, jobs=1, tv_levels=(3, 5))]
    parallel = [r.to_json() for r in enumerate_open_chain(5, jobs=2, tv_levels=(3, 5))]
    assert serial == parallel


def test_record_json_fields():
    r = next(enumerate_open_chain(3))
    d = json.loads(r.to_json())
    assert set(d) == {"schema", "n", "alpha", "delta", "word", "orbit_size", "chirality", "h1_rank", "volume", "tv"}
    assert d["schema"] == SCHEMA_VERSION
    assert d["h1_rank"] == 3
    assert set(d["tv"]) == {"3", "5", "7"}


def test_enumerate_rejects_bad_arguments():
    with pytest.raises(ValueError):
        list(enumerate_open_chain(1))
    with pytest.raises(ValueError):
        list(enumerate_open_chain(3, jobs=0))
    with pytest.raises(ValueError):
        census_count(1)


def test_chain_tracer_relations_match_general_homology(rng):
    for n in (2, 3, 4, 5):
        tracer = ChainTracer(n)
        for _ in range(40):
            a, d = rng.randrange(3), rng.randrange(3)
            w = tuple(rng.randrange(9) for _ in range(n - 1))
            rel = tracer.relations(a, d, w)
            p = _params(n, a, d, w)
            assert (rel is not None) == is_single_face(make_open_chain(p))
            if rel is not None:
                from spinecensus.snf import abelian_quotient

                assert abelian_quotient([rel], len(rel)) == homology_h1(make_open_chain(p))


# -- chirality ---------------------------------------------------------------------------


@pytest.mark.parametrize("n", [2, 3, 4, 5])
def test_chirality_counts_and_isomorphism_oracle(n):
    amph = 0
    for a, d, w, _ in enumerate_canonical(n):
        p = _params(n, a, d, w)
        c = classify_chirality(p)
        g = make_open_chain(p)
        assert (c == AMPHICHIRAL) == isomorphic(g, g, "reversing")
        amph += c == AMPHICHIRAL
    assert amph == AMPHICHIRAL_COUNTS[n]


@settings(max_examples=60, deadline=None)
@given(open_chains(max_n=6))
def test_chirality_is_mirror_invariant(p):
    assert classify_chirality(p) == classify_chirality(mirror_open_chain(p))
    assert classify_chirality(p) in (CHIRAL, AMPHICHIRAL)


@settings(max_examples=60, deadline=None)
@given(open_chains(max_n=6))
def test_mirror_of_chain_is_reversing_isomorph(p):
    g = make_open_chain(p)
    assert isomorphic(g, make_open_chain(mirror_open_chain(p)), "reversing")
    assert canonical_form(mirror_open_chain(mirror_open_chain(p))) == canonical_form(p)


def test_record_chirality_matches_classifier():
    for r in enumerate_open_chain(4, tv_levels=(3,)):
        assert r.chirality == classify_chirality(r)


# -- closed chains -----------------------------------------------------------------------


def test_monte_carlo_is_deterministic():
    a = closed_chain_monte_carlo(10, 200, seed=7)
    b = closed_chain_monte_carlo(10, 200, seed=7)
    assert a == b
    assert a.to_dict() == b.to_dict()
    assert closed_chain_monte_carlo(10, 200, seed=8) != a


def test_monte_carlo_prefix_stability():
    # sample i does not depend on the sample count
    small = closed_chain_monte_carlo(12, 100, seed=3)
    direct = sum(face_count(make_closed_chain(closed_chain_sample(12, 3, i))) == 1 for i in range(100))
    assert small.single_face_count == direct
    assert closed_chain_monte_carlo(12, 300, seed=3).single_face_count >= direct


def test_sample_family():
    for i in range(40):
        s = closed_chain_sample(9, 11, i)
        assert s.n == 9
        assert s.pairs[0] == CLOSED_CHAIN_FIRST[i % 4]
        validate_closed_chain(s)
    with pytest.raises(ValueError):
        validate_closed_chain(ClosedChainParams(((2, 2), (0, 2))))


def test_monte_carlo_input_validation():
    with pytest.raises(ValueError):
        closed_chain_monte_carlo(1, 10, 0)
    with pytest.raises(ValueError):
        closed_chain_monte_carlo(5, 0, 0)


def test_per_first_letter_bookkeeping():
    rep = closed_chain_monte_carlo(8, 103, seed=1)
    assert sum(s for s, _ in rep.per_first_letter.values()) == 103
    assert sum(c for _, c in rep.per_first_letter.values()) == rep.single_face_count


def test_exact_probability_against_enumeration():
    from itertools import product

    from spinecensus.census import CLOSED_CHAIN_LETTERS

    for n in range(2, 7):
        for first in CLOSED_CHAIN_FIRST:
            hits = sum(
                face_count(make_closed_chain(ClosedChainParams((first,) + rest))) == 1
                for rest in product(CLOSED_CHAIN_LETTERS, repeat=n - 1)
            )
            assert closed_chain_exact_probability(n, first) == Fraction(hits, 4 ** (n - 1))


def test_exact_probability_is_one_half():
    assert all(closed_chain_exact_probability(2, f) == 0 for f in CLOSED_CHAIN_FIRST)
    for n in (3, 10, 20, 40, 80):
        for f in CLOSED_CHAIN_FIRST:
            assert closed_chain_exact_probability(n, f) == Fraction(1, 2)


def test_exact_probability_matches_sampled_chains():
    for i in range(150):
        s = closed_chain_sample(15, 99, i)
        # compare each sample's face count with the tangle route of the exact DP
        from spinecensus.census import _ChainTangle

        assert _ChainTangle().face_count(s.pairs) == face_count(make_closed_chain(s))


# -- gluing table ------------------------------------------------------------------------


def test_gluing_table_text_and_orbits():
    p = _params(3, *next(iter(enumerate_canonical(3)))[:3])
    t = export_gluing_table(p)
    lines = t.to_text().splitlines()
    assert lines[0] == "triangulation 3"
    assert len(lines) == 1 + 2 * 3
    for line in lines[1:]:
        tag, ta, fa, tb, fb, perm = line.split()
        assert tag == "glue" and sorted(perm) == ["0", "1", "2"]
    assert t.edge_orbits() == 1
    assert t.is_oriented()


@settings(max_examples=80, deadline=None)
@given(open_chains(max_n=6))
def test_edge_orbits_equal_faces(p):
    g = make_open_chain(p)
    t = gluing_table(g)
    assert t.edge_orbits() == face_count(g)
    assert t.is_oriented()


# -- persistence -------------------------------------------------------------------------


def test_write_and_merge_round_trip(tmp_path):
    r3 = list(enumerate_open_chain(3, tv_levels=(3,)))
    r4 = list(enumerate_open_chain(4, tv_levels=(3,)))
    a, b = tmp_path / "a.jsonl", tmp_path / "b.jsonl"
    assert write_part(r4, a) == len(r4)
    assert write_part(r3, b) == len(r3)
    assert not list(tmp_path.glob("*.tmp"))
    out = tmp_path / "all.jsonl"
    assert merge_parts([a, b], out) == len(r3) + len(r4)
    assert out.read_text().splitlines() == [r.to_json() for r in r3 + r4]


def test_merge_rejects_duplicates(tmp_path):
    recs = list(enumerate_open_chain(3, tv_levels=(3,)))
    a, b = tmp_path / "a.jsonl", tmp_path / "b.jsonl"
    write_part(recs, a)
    write_part(recs[:1], b)
    with pytest.raises(CensusError):
        merge_parts([a, b], tmp_path / "out.jsonl")

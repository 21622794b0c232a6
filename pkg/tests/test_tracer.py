import itertools

import pytest
from hypothesis import given, settings

from spinecensus.automaton import OPEN_CHAIN_FSA, accepts
from spinecensus.census import ChainTracer
from spinecensus.ograph import LETTERS, Edge, OGraph, OpenChainParams, make_closed_chain, make_open_chain, mirror
from spinecensus.tracer import (
    DEFAULT_MATCHING,
    StrandSlot,
    VertexMatching,
    boundary_word,
    face_count,
    is_single_face,
    spanning_tree,
    trace_faces,
    trace_strands,
)

from conftest import closed_chains, ographs, open_chains


def test_default_matching_germs_cover_port_pairs():
    germs = DEFAULT_MATCHING.germs()
    assert len(germs) == 6
    assert sorted(tuple(sorted((a[0], b[0]))) for a, b in germs) == sorted(itertools.combinations(range(4), 2))
    ends = [x for g in germs for x in g]
    assert len(set(ends)) == 12


@pytest.mark.parametrize(
    "bad",
    [((0, 2, 3), (2, 0, 3), (3, 0, 1), (0, 2, 1)), ((1, 2), (2, 0, 3), (3, 0, 1), (0, 2, 1)), ((1, 2, 3),) * 3],
)
def test_matching_validation(bad):
    with pytest.raises(ValueError):
        VertexMatching(bad)


@given(ographs())
def test_walks_partition_slot_ends(g):
    t = trace_faces(g)
    starts = [step for walk in t.faces for step, _ in walk]
    # each strand is entered once, from one of its two ends
    assert len(starts) == 3 * g.edge_count
    strands = set()
    for s in starts:
        other = StrandSlot(s.edge, 1 - s.end, (g.edges[s.edge].color - s.slot) % 3)
        key = frozenset({s, other})
        assert key not in strands
        strands.add(key)


@given(ographs())
def test_euler_characteristic(g):
    t = trace_faces(g)
    assert t.euler_characteristic == t.face_count - g.vertex_count
    assert t.face_count == face_count(g)
    assert is_single_face(g) == (t.face_count == 1)


@given(ographs())
def test_trace_is_deterministic(g):
    assert trace_faces(g) == trace_faces(g)


@given(ographs())
def test_mirror_preserves_face_count(g):
    assert face_count(mirror(g)) == face_count(g)


@given(open_chains())
def test_alpha_or_delta_two_gives_several_faces(p):
    for q in (
        OpenChainParams(p.n, 2, p.delta, p.word),
        OpenChainParams(p.n, p.alpha, 2, p.word),
    ):
        assert trace_faces(make_open_chain(q)).face_count >= 2
        assert not is_single_face(make_open_chain(q))


def test_total_strand_traversals():
    for p in [OpenChainParams(3, 0, 1, ((0, 2), (1, 0))), OpenChainParams(4, 1, 1, ((2, 2),) * 3)]:
        t = trace_faces(make_open_chain(p))
        assert sum(len(w) for w in t.faces) == 3 * 2 * p.n


@settings(max_examples=200)
@given(open_chains(max_n=7))
def test_accepted_words_give_one_face(p):
    g = make_open_chain(p)
    if p.alpha != 2 and p.delta != 2 and accepts(OPEN_CHAIN_FSA, p.word):
        t = trace_faces(g)
        assert t.face_count == 1 and t.euler_characteristic == 1 - p.n


@settings(max_examples=200)
@given(open_chains(max_n=7))
def test_single_face_relation_vector(p):
    g = make_open_chain(p)
    t = trace_faces(g)
    if t.face_count != 1:
        return
    (r,) = boundary_word(t, g).vectors
    assert len(r) == p.n + 1
    assert all(x in (-3, -1, 1, 3) for x in r)
    assert any(abs(x) == 1 for x in r)


def test_spanning_tree_is_bfs_lowest_index():
    g = make_open_chain(OpenChainParams(3, 0, 0, ((0, 0), (0, 0))))
    # edges: 0 alpha loop, 1/2 first double edge, 3/4 second, 5 delta loop
    assert spanning_tree(g) == [1, 3]


def test_spanning_tree_rejects_disconnected():
    g = OGraph(2, (Edge((0, 0), (0, 2), 0), Edge((0, 1), (0, 3), 0), Edge((1, 0), (1, 2), 0), Edge((1, 1), (1, 3), 0)))
    with pytest.raises(ValueError, match="disconnected"):
        boundary_word(trace_faces(g), g)


def test_strand_token_format():
    assert StrandSlot(3, 1, 2).token(-1) == "3:b:2:-"
    assert StrandSlot(0, 0, 0).token(1) == "0:a:0:+"


@given(closed_chains())
def test_partial_trace_of_complete_graph_matches_faces(p):
    g = make_closed_chain(p)
    st = trace_strands(g.vertex_count, [(e.a, e.b, e.color) for e in g.edges])
    assert not st.arcs
    assert st.closed == face_count(g)


@settings(max_examples=300)
@given(open_chains(max_n=8))
def test_chain_tracer_matches_general_tracer(p):
    g = make_open_chain(p)
    t = trace_faces(g)
    codes = tuple(x.code for x in p.word)
    r = ChainTracer(p.n).relations(p.alpha, p.delta, codes)
    if t.face_count == 1:
        assert r == boundary_word(t, g).vectors[0]
    else:
        assert r is None

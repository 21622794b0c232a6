import pytest
from hypothesis import given

from spinecensus.ograph import (
    LETTER_CLASSES,
    LETTERS,
    ClosedChainParams,
    Edge,
    Letter,
    OGraph,
    OGraphFormatError,
    OpenChainParams,
    canonical_form,
    half_turn,
    make_closed_chain,
    make_open_chain,
    mirror,
    mirror_open_chain,
    neg,
    open_chain_orbit,
    parse_ograph,
    rotation_move,
    serialize_ograph,
    swap_move,
)

from conftest import closed_chains, ographs, open_chains


def test_negation_table():
    assert [neg(c) for c in range(3)] == [0, 2, 1]


def test_letter_classes_partition_alphabet():
    members = [x for cls in LETTER_CLASSES.values() for x in cls]
    assert sorted(members) == sorted(LETTERS) and len(members) == 9
    assert LETTER_CLASSES[0] == {Letter(2, 2)}
    assert LETTER_CLASSES[3] == {Letter(0, 2), Letter(1, 2), Letter(2, 0), Letter(2, 1)}


def test_open_chain_n2_example():
    g = make_open_chain(OpenChainParams(2, 0, 0, ((0, 2),)))
    assert g.vertex_count == 2 and g.edge_count == 4
    assert sorted(g.colors()) == [0, 0, 0, 2]


@given(open_chains())
def test_open_chain_is_four_valent(p):
    g = make_open_chain(p)
    assert g.edge_count == 2 * p.n and g.vertex_count == p.n
    assert len(g.port_map) == 4 * p.n
    assert g.is_connected()


def test_open_chain_rejects_bad_params():
    with pytest.raises(ValueError):
        OpenChainParams(3, 0, 0, ((0, 0),))
    with pytest.raises(ValueError):
        OpenChainParams(1, 0, 0, ())
    with pytest.raises(ValueError):
        OpenChainParams(2, 3, 0, ((0, 0),))


@pytest.mark.parametrize("n", [1, 4])
def test_closed_chain_sizes(n):
    g = make_closed_chain(ClosedChainParams(((0, 1),) * n))
    assert g.vertex_count == n and g.edge_count == 2 * n


@given(closed_chains())
def test_closed_chain_four_valent(p):
    assert len(make_closed_chain(p).port_map) == 4 * p.n


def test_closed_chain_rejects_empty():
    with pytest.raises(ValueError):
        ClosedChainParams(())


@given(ographs())
def test_mirror_negates_colours(g):
    m = mirror(g)
    assert [e.color for e in m.edges] == [neg(e.color) for e in g.edges]


@given(ographs())
def test_mirror_twice_is_half_turn(g):
    # over/under exchange twice rotates every vertex by a half turn, a symmetry of the vertex
    assert mirror(mirror(g)) == half_turn(g)
    assert half_turn(half_turn(g)) == g


def test_mirror_open_chain_examples():
    p = OpenChainParams(2, 0, 0, ((0, 2),))
    m = mirror_open_chain(p)
    assert m.alpha == 1 and m.delta == 1
    assert m.word[0] == Letter(2, 1)


@given(open_chains())
def test_mirror_open_chain_is_involution(p):
    assert mirror_open_chain(mirror_open_chain(p)) == p


@given(open_chains())
def test_orbit_size_divides_four(p):
    orbit = open_chain_orbit(p)
    assert len(orbit) in (1, 2, 4)
    assert p in orbit
    for q in orbit:
        assert open_chain_orbit(q) == orbit


@given(open_chains())
def test_symmetric_word_has_small_orbit(p):
    sym = OpenChainParams(p.n, p.alpha, p.delta, tuple(Letter(b, b) for b, _ in p.word))
    assert swap_move(sym) == sym
    assert len(open_chain_orbit(sym)) <= 2


@given(open_chains())
def test_canonical_form(p):
    c = canonical_form(p)
    assert c in open_chain_orbit(p)
    assert canonical_form(c) == c
    for q in (swap_move(p), rotation_move(p), rotation_move(swap_move(p))):
        assert canonical_form(q) == c
    assert all(c.key() <= q.key() for q in open_chain_orbit(p))


@given(ographs())
def test_serialization_round_trip(g):
    text = serialize_ograph(g)
    assert parse_ograph(text) == g
    assert serialize_ograph(parse_ograph(text)) == text
    canon = serialize_ograph(g, canonical=True)
    assert parse_ograph(canon) == g.sorted_edges()


def test_parse_comments_and_blank_lines():
    text = "# a loop graph\nograph 1\n\nvertices 1\nedge 0 0 0 2 1  # over\nedge 0 1 0 3 0\n"
    g = parse_ograph(text)
    assert g == OGraph(1, (Edge((0, 0), (0, 2), 1), Edge((0, 1), (0, 3), 0)))


@pytest.mark.parametrize(
    "body, message, line",
    [
        ("edge 0 0 0 4 1\nedge 0 1 0 3 0", "port out of range", 3),
        ("edge 0 0 0 2 1\nedge 0 0 0 3 0", "duplicate port", 4),
        ("edge 0 0 0 2 3\nedge 0 1 0 3 0", "color out of range", 3),
        ("edge 0 0 1 2 1\nedge 0 1 0 3 0", "dangling endpoint", 3),
        ("edge 0 0 0 2 1", "dangling endpoint", 3),
        ("edge 0 0 0 2 x\nedge 0 1 0 3 0", "not an integer", 3),
    ],
)
def test_parse_errors_carry_line_numbers(body, message, line):
    with pytest.raises(OGraphFormatError, match=message) as info:
        parse_ograph("ograph 1\nvertices 1\n" + body + "\n")
    assert info.value.line == line


def test_parse_rejects_bad_header():
    with pytest.raises(OGraphFormatError, match="header"):
        parse_ograph("ograph 2\nvertices 1\n")

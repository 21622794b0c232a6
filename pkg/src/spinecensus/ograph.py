"""O-graphs: 4-valent graphs with a crossing at every vertex and Z/3 edge colours.

Ports at a vertex are numbered 0..3 counterclockwise in the local planar
picture. The overstrand always occupies ports {0, 2} and the understrand
ports {1, 3}; this normalization removes any per-vertex planar data.

Two graph families are built here:

* the open chain G_n: vertices v_0..v_{n-1} in a row, a loop at each end and
  a double edge between neighbours, parameterized by ``OpenChainParams``;
* the closed chain: n vertices on a cycle joined by double edges,
  parameterized by ``ClosedChainParams``.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, NamedTuple, Sequence

__all__ = [
    "Letter",
    "LETTERS",
    "LETTER_CLASSES",
    "letter_class",
    "neg",
    "Edge",
    "OGraph",
    "OGraphFormatError",
    "OpenChainParams",
    "ClosedChainParams",
    "make_open_chain",
    "make_closed_chain",
    "mirror",
    "half_turn",
    "mirror_open_chain",
    "swap_move",
    "rotation_move",
    "open_chain_orbit",
    "canonical_form",
    "parse_ograph",
    "serialize_ograph",
]


def check_color(c: int) -> int:
    if not isinstance(c, int) or isinstance(c, bool) or c not in (0, 1, 2):
        raise ValueError(f"colour must be a residue 0, 1 or 2, got {c!r}")
    return c


def neg(c: int) -> int:
    """Additive inverse in Z/3 (0->0, 1->2, 2->1)."""
    return (-c) % 3


class Letter(NamedTuple):
    """Colour pair (beta, gamma) on one double edge of a chain."""

    beta: int
    gamma: int

    @property
    def code(self) -> int:
        return 3 * self.beta + self.gamma

    def swapped(self) -> "Letter":
        return Letter(self.gamma, self.beta)


LETTERS: tuple[Letter, ...] = tuple(Letter(b, g) for b in range(3) for g in range(3))

LETTER_CLASSES: dict[int, frozenset[Letter]] = {
    0: frozenset({Letter(2, 2)}),
    1: frozenset({Letter(0, 0), Letter(1, 1)}),
    2: frozenset({Letter(1, 0), Letter(0, 1)}),
    3: frozenset({Letter(0, 2), Letter(1, 2), Letter(2, 0), Letter(2, 1)}),
}

_CLASS_OF = {letter: k for k, cls in LETTER_CLASSES.items() for letter in cls}


def letter_class(letter: Sequence[int]) -> int:
    return _CLASS_OF[Letter(*letter)]


def _as_letter(x: Sequence[int]) -> Letter:
    b, g = x
    return Letter(check_color(b), check_color(g))


@dataclass(frozen=True)
class Edge:
    """Edge joining port ``a[1]`` of vertex ``a[0]`` to port ``b[1]`` of ``b[0]``."""

    a: tuple[int, int]
    b: tuple[int, int]
    color: int

    def endpoint(self, end: int) -> tuple[int, int]:
        return self.b if end else self.a


class OGraphFormatError(ValueError):
    """Malformed o-graph; ``line`` is the 1-based input line (0 if not from text)."""

    def __init__(self, message: str, line: int = 0):
        self.line = line
        super().__init__(f"line {line}: {message}" if line else message)


@dataclass(frozen=True)
class OGraph:
    vertex_count: int
    edges: tuple[Edge, ...]

    def __post_init__(self):
        if self.vertex_count < 1:
            raise OGraphFormatError("an o-graph needs at least one vertex")
        object.__setattr__(self, "edges", tuple(self.edges))
        seen = set()
        for e in self.edges:
            check_color(e.color)
            for v, p in (e.a, e.b):
                if not 0 <= v < self.vertex_count:
                    raise OGraphFormatError(f"dangling endpoint: vertex {v} does not exist")
                if p not in (0, 1, 2, 3):
                    raise OGraphFormatError(f"port out of range: {p}")
                if (v, p) in seen:
                    raise OGraphFormatError(f"duplicate port ({v}, {p})")
                seen.add((v, p))
        if len(seen) != 4 * self.vertex_count:
            missing = sorted({(v, p) for v in range(self.vertex_count) for p in range(4)} - seen)
            raise OGraphFormatError(f"dangling endpoint: unused ports {missing}")

    @cached_property
    def port_map(self) -> dict[tuple[int, int], tuple[int, int]]:
        """(vertex, port) -> (edge index, end) with end 0 for ``a`` and 1 for ``b``."""
        out = {}
        for i, e in enumerate(self.edges):
            out[e.a] = (i, 0)
            out[e.b] = (i, 1)
        return out

    @property
    def edge_count(self) -> int:
        return len(self.edges)

    def colors(self) -> tuple[int, ...]:
        return tuple(e.color for e in self.edges)

    def sorted_edges(self) -> "OGraph":
        """Same graph with each edge's endpoints ordered and the edge list sorted."""
        edges = []
        for e in self.edges:
            a, b = (e.a, e.b) if e.a <= e.b else (e.b, e.a)
            edges.append(Edge(a, b, e.color))
        edges.sort(key=lambda e: (e.a, e.b, e.color))
        return OGraph(self.vertex_count, tuple(edges))

    def is_connected(self) -> bool:
        adj: dict[int, set[int]] = {v: set() for v in range(self.vertex_count)}
        for e in self.edges:
            adj[e.a[0]].add(e.b[0])
            adj[e.b[0]].add(e.a[0])
        seen = {0}
        stack = [0]
        while stack:
            for w in adj[stack.pop()]:
                if w not in seen:
                    seen.add(w)
                    stack.append(w)
        return len(seen) == self.vertex_count


@dataclass(frozen=True)
class OpenChainParams:
    """Colours of the open-chain o-graph: end loops ``alpha``/``delta`` and n-1 letters."""

    n: int
    alpha: int
    delta: int
    word: tuple[Letter, ...]

    def __post_init__(self):
        if not isinstance(self.n, int) or self.n < 2:
            raise ValueError(f"open chain needs n >= 2, got {self.n!r}")
        check_color(self.alpha)
        check_color(self.delta)
        word = tuple(_as_letter(x) for x in self.word)
        if len(word) != self.n - 1:
            raise ValueError(f"word length must be n-1 = {self.n - 1}, got {len(word)}")
        object.__setattr__(self, "word", word)

    @classmethod
    def of(cls, alpha: int, delta: int, word: Iterable[Sequence[int]]) -> "OpenChainParams":
        word = tuple(word)
        return cls(len(word) + 1, alpha, delta, word)

    def key(self) -> tuple[int, ...]:
        """Flat residue tuple (alpha, delta, beta_1, gamma_1, ...) used for ordering."""
        flat = [self.alpha, self.delta]
        for letter in self.word:
            flat.extend(letter)
        return tuple(flat)

    def __lt__(self, other: "OpenChainParams") -> bool:
        return (self.n, self.key()) < (other.n, other.key())


@dataclass(frozen=True)
class ClosedChainParams:
    pairs: tuple[Letter, ...]

    def __post_init__(self):
        pairs = tuple(_as_letter(x) for x in self.pairs)
        if not pairs:
            raise ValueError("closed chain needs n >= 1")
        object.__setattr__(self, "pairs", pairs)

    @property
    def n(self) -> int:
        return len(self.pairs)


def make_open_chain(params: OpenChainParams) -> OGraph:
    """O-graph on G_n.

    Layout (all crossings have the overstrand on ports 0 and 2): the loop at
    v_0 joins ports 1 and 2; letter k puts ``beta_k`` on the upper edge from
    port 0 of v_{k-1} to port 1 of v_k and ``gamma_k`` on the lower edge from
    port 3 of v_{k-1} to port 2 of v_k; the loop at v_{n-1} joins ports 0, 3.
    Edge order: alpha loop, (beta_1, gamma_1), ..., delta loop.
    """
    n = params.n
    edges = [Edge((0, 1), (0, 2), params.alpha)]
    for k, (b, g) in enumerate(params.word):
        edges.append(Edge((k, 0), (k + 1, 1), b))
        edges.append(Edge((k, 3), (k + 1, 2), g))
    edges.append(Edge((n - 1, 0), (n - 1, 3), params.delta))
    return OGraph(n, tuple(edges))


def make_closed_chain(params: ClosedChainParams) -> OGraph:
    """O-graph on the closed chain, same local layout as the open chain.

    Pair i colours the upper edge (v_i port 0 -> v_{i+1} port 1) with alpha_i
    and the lower edge (v_i port 3 -> v_{i+1} port 2) with beta_i, indices
    mod n. For n = 1 both edges are loops.
    """
    n = params.n
    edges = []
    for i, (a, b) in enumerate(params.pairs):
        j = (i + 1) % n
        edges.append(Edge((i, 0), (j, 1), a))
        edges.append(Edge((i, 3), (j, 2), b))
    return OGraph(n, tuple(edges))


def _relabel(g: OGraph, shift: int, negate: bool) -> OGraph:
    def port(x):
        return (x[0], (x[1] + shift) % 4)

    return OGraph(
        g.vertex_count,
        tuple(Edge(port(e.a), port(e.b), neg(e.color) if negate else e.color) for e in g.edges),
    )


def mirror(g: OGraph) -> OGraph:
    """O-graph of the orientation-reversed polyhedron.

    Over- and understrands are exchanged at every vertex and colours negated.
    The overstrand then sits on the old ports {1, 3}; ports are relabelled
    p -> p + 1 to restore the {0, 2} convention. ``mirror(mirror(g))`` is
    ``half_turn(g)``, the same polyhedron.
    """
    return _relabel(g, 1, True)


def half_turn(g: OGraph) -> OGraph:
    """Relabel every vertex by the half-turn p -> p + 2 (a symmetry of the vertex)."""
    return _relabel(g, 2, False)


def mirror_open_chain(params: OpenChainParams) -> OpenChainParams:
    """Colours of the mirrored polyhedron, again in open-chain normal form.

    Letters at odd positions (1-based) are swapped and every colour c becomes 1 - c.
    """

    def f(c):
        return (1 - c) % 3

    word = []
    for k, (b, g) in enumerate(params.word, start=1):
        word.append(Letter(f(g), f(b)) if k % 2 else Letter(f(b), f(g)))
    return OpenChainParams(params.n, f(params.alpha), f(params.delta), tuple(word))


def swap_move(params: OpenChainParams) -> OpenChainParams:
    """Exchange beta_k and gamma_k for every k."""
    return OpenChainParams(params.n, params.alpha, params.delta, tuple(x.swapped() for x in params.word))


def rotation_move(params: OpenChainParams) -> OpenChainParams:
    """Half-turn of the planar picture: the chain is reversed and upper/lower edges trade places."""
    word = tuple(x.swapped() for x in reversed(params.word))
    return OpenChainParams(params.n, params.delta, params.alpha, word)


def open_chain_orbit(params: OpenChainParams) -> frozenset[OpenChainParams]:
    s = swap_move(params)
    return frozenset({params, s, rotation_move(params), rotation_move(s)})


def canonical_form(params: OpenChainParams) -> OpenChainParams:
    return min(open_chain_orbit(params), key=OpenChainParams.key)


# -- text format -------------------------------------------------------------

FORMAT_VERSION = 1


def serialize_ograph(g: OGraph, canonical: bool = False) -> str:
    if canonical:
        g = g.sorted_edges()
    lines = [f"ograph {FORMAT_VERSION}", f"vertices {g.vertex_count}"]
    for e in g.edges:
        lines.append(f"edge {e.a[0]} {e.a[1]} {e.b[0]} {e.b[1]} {e.color}")
    return "\n".join(lines) + "\n"


def parse_ograph(text: str) -> OGraph:
    header_seen = False
    n = None
    edges: list[Edge] = []
    used: dict[tuple[int, int], int] = {}
    last = 0
    for lineno, raw in enumerate(text.splitlines(), start=1):
        last = lineno
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tok = line.split()
        if not header_seen:
            if tok != ["ograph", str(FORMAT_VERSION)]:
                raise OGraphFormatError(f"expected header 'ograph {FORMAT_VERSION}'", lineno)
            header_seen = True
            continue
        if n is None:
            if len(tok) != 2 or tok[0] != "vertices":
                raise OGraphFormatError("expected 'vertices <n>'", lineno)
            n = _parse_int(tok[1], lineno)
            if n < 1:
                raise OGraphFormatError("vertex count must be positive", lineno)
            continue
        if tok[0] != "edge" or len(tok) != 6:
            raise OGraphFormatError("expected 'edge <v_a> <p_a> <v_b> <p_b> <color>'", lineno)
        va, pa, vb, pb, c = (_parse_int(t, lineno) for t in tok[1:])
        for v, p in ((va, pa), (vb, pb)):
            if not 0 <= v < n:
                raise OGraphFormatError(f"dangling endpoint: vertex {v} does not exist", lineno)
            if not 0 <= p <= 3:
                raise OGraphFormatError(f"port out of range: {p}", lineno)
            if (v, p) in used:
                raise OGraphFormatError(
                    f"duplicate port ({v}, {p}), first used on line {used[(v, p)]}", lineno
                )
            used[(v, p)] = lineno
        if c not in (0, 1, 2):
            raise OGraphFormatError(f"color out of range: {c}", lineno)
        edges.append(Edge((va, pa), (vb, pb), c))
    if not header_seen or n is None:
        raise OGraphFormatError("truncated input", last)
    if len(used) != 4 * n:
        missing = sorted({(v, p) for v in range(n) for p in range(4)} - set(used))
        raise OGraphFormatError(f"dangling endpoint: unused ports {missing}", last)
    return OGraph(n, tuple(edges))


def _parse_int(tok: str, lineno: int) -> int:
    try:
        return int(tok)
    except ValueError:
        raise OGraphFormatError(f"not an integer: {tok!r}", lineno) from None

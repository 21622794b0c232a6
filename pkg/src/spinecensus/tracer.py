"""Face tracing for the standard polyhedron encoded by an o-graph.

Near a singular edge the polyhedron has three sheets. At each end of an edge
the sheets are indexed 0, 1, 2 counterclockwise in the cross-section seen
looking out of the vertex along the edge. A sheet leaving port p of a vertex
is a germ of the sector joining p to some other port q; the table that says
which q goes with which slot is a ``VertexMatching``.

Gluing rule along an edge of colour c: slot i at one end continues as slot j
at the other end exactly when i + j = c (mod 3). The rule is symmetric in the
two endpoints, so colours live on undirected edges.

A face of the polyhedron is traced as a closed walk that alternately runs
along an edge (one strand) and turns through a vertex sector.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import NamedTuple, Sequence

from .ograph import OGraph

__all__ = [
    "VertexMatching",
    "DEFAULT_MATCHING",
    "StrandSlot",
    "TraceResult",
    "Relations",
    "trace_faces",
    "face_count",
    "is_single_face",
    "boundary_word",
    "trace_strands",
    "StrandTrace",
]


@dataclass(frozen=True)
class VertexMatching:
    """Per-port slot table: ``targets[p][s]`` is the port reached by slot s of port p.

    The 12 slot-ends at a vertex pair up into 6 sector germs, one for each
    unordered pair of ports.
    """

    targets: tuple[tuple[int, int, int], ...]

    def __post_init__(self):
        t = tuple(tuple(row) for row in self.targets)
        object.__setattr__(self, "targets", t)
        if len(t) != 4:
            raise ValueError("a vertex matching needs a row for each of the 4 ports")
        for p, row in enumerate(t):
            if len(row) != 3 or sorted(row) != sorted(q for q in range(4) if q != p):
                raise ValueError(f"port {p}: slots must reach the three other ports once each, got {row}")
        slots = {}
        for p, row in enumerate(t):
            for s, q in enumerate(row):
                slots[(p, q)] = s
        object.__setattr__(self, "_slots", slots)

    def slot(self, p: int, q: int) -> int:
        return self._slots[(p, q)]

    def target(self, p: int, s: int) -> int:
        return self.targets[p][s]

    def germs(self) -> list[tuple[tuple[int, int], tuple[int, int]]]:
        """The 6 germs as pairs of (port, slot) ends."""
        return [((p, self.slot(p, q)), (q, self.slot(q, p))) for p in range(4) for q in range(p + 1, 4)]


# Slot 0 at port p is the sector towards port p+1 (its counterclockwise
# neighbour). Overstrand ports see (left, fin, right); understrand ports see
# (left, right, fin), since their fin hangs below the plane.
DEFAULT_MATCHING = VertexMatching(((1, 2, 3), (2, 0, 3), (3, 0, 1), (0, 2, 1)))


class StrandSlot(NamedTuple):
    edge: int
    end: int  # 0 = endpoint a, 1 = endpoint b
    slot: int

    def token(self, sign: int) -> str:
        return f"{self.edge}:{'ab'[self.end]}:{self.slot}:{'+' if sign > 0 else '-'}"


@dataclass(frozen=True)
class TraceResult:
    """Faces as cyclic walks.

    Each step of a walk is ``(StrandSlot, sign)``: the strand is entered at the
    given slot-end and the sign is +1 when it is run from endpoint a to b.
    """

    vertex_count: int
    edge_count: int
    faces: tuple[tuple[tuple[StrandSlot, int], ...], ...]

    @property
    def face_count(self) -> int:
        return len(self.faces)

    @property
    def euler_characteristic(self) -> int:
        return self.vertex_count - self.edge_count + self.face_count

    @property
    def edge_incidence(self) -> list[list[tuple[int, int]]]:
        """For each edge, the (face index, sign) of every strand traversal."""
        out: list[list[tuple[int, int]]] = [[] for _ in range(self.edge_count)]
        for f, walk in enumerate(self.faces):
            for step, sign in walk:
                out[step.edge].append((f, sign))
        return out

    def boundary_matrix(self) -> list[list[int]]:
        """faces x edges matrix of signed traversal counts (the cellular boundary of each face)."""
        rows = [[0] * self.edge_count for _ in self.faces]
        for f, walk in enumerate(self.faces):
            for step, sign in walk:
                rows[f][step.edge] += sign
        return rows


class _Arrays:
    """Flat successor tables over slot-end ids 6*edge + 3*end + slot."""

    __slots__ = ("size", "across", "turn")

    def __init__(self, g: OGraph, matching: VertexMatching):
        pm = g.port_map
        slot = matching._slots
        targets = matching.targets
        size = 6 * len(g.edges)
        across = [0] * size
        turn = [0] * size
        for e, edge in enumerate(g.edges):
            c = edge.color
            for end, (v, p) in ((0, edge.a), (1, edge.b)):
                base = 6 * e + 3 * end
                other = 6 * e + 3 * (1 - end)
                for s in range(3):
                    across[base + s] = other + (c - s) % 3
                    q = targets[p][s]
                    e2, end2 = pm[(v, q)]
                    turn[base + s] = 6 * e2 + 3 * end2 + slot[(q, p)]
        self.size = size
        self.across = across
        self.turn = turn


def trace_faces(g: OGraph, matching: VertexMatching = DEFAULT_MATCHING) -> TraceResult:
    arr = _Arrays(g, matching)
    across, turn = arr.across, arr.turn
    seen = bytearray(arr.size)
    faces = []
    for start in range(arr.size):
        if seen[start]:
            continue
        walk = []
        x = start
        while True:
            e, r = divmod(x, 6)
            end, s = divmod(r, 3)
            walk.append((StrandSlot(e, end, s), 1 if end == 0 else -1))
            y = across[x]
            seen[x] = seen[y] = 1
            x = turn[y]
            if x == start:
                break
        faces.append(tuple(walk))
    return TraceResult(g.vertex_count, len(g.edges), tuple(faces))


def face_count(g: OGraph, matching: VertexMatching = DEFAULT_MATCHING) -> int:
    arr = _Arrays(g, matching)
    across, turn = arr.across, arr.turn
    seen = bytearray(arr.size)
    count = 0
    for start in range(arr.size):
        if seen[start]:
            continue
        count += 1
        x = start
        while True:
            y = across[x]
            seen[x] = seen[y] = 1
            x = turn[y]
            if x == start:
                break
    return count


def is_single_face(g: OGraph, matching: VertexMatching = DEFAULT_MATCHING) -> bool:
    arr = _Arrays(g, matching)
    across, turn = arr.across, arr.turn
    x = turn[across[0]]
    steps = 1
    while x != 0:
        x = turn[across[x]]
        steps += 1
    return 2 * steps == arr.size


@dataclass(frozen=True)
class Relations:
    """Face boundaries written in the cotree-edge basis of H_1 of the graph."""

    tree_edges: tuple[int, ...]
    cotree_edges: tuple[int, ...]
    vectors: tuple[tuple[int, ...], ...]  # one per face


def spanning_tree(g: OGraph) -> list[int]:
    """Breadth-first from vertex 0, scanning incident edges in index order."""
    incident: list[list[int]] = [[] for _ in range(g.vertex_count)]
    for i, e in enumerate(g.edges):
        incident[e.a[0]].append(i)
        if e.b[0] != e.a[0]:
            incident[e.b[0]].append(i)
    for lst in incident:
        lst.sort()
    seen = {0}
    tree = []
    queue = deque([0])
    while queue:
        v = queue.popleft()
        for i in incident[v]:
            e = g.edges[i]
            w = e.b[0] if e.a[0] == v else e.a[0]
            if w not in seen:
                seen.add(w)
                tree.append(i)
                queue.append(w)
    if len(seen) != g.vertex_count:
        raise ValueError("o-graph is disconnected")
    return sorted(tree)


def boundary_word(t: TraceResult, g: OGraph) -> Relations:
    """Signed traversal sums of every face over each edge outside a spanning tree.

    For a one-face o-graph on G_n this is the vector (r_1, ..., r_{n+1}).
    """
    tree = spanning_tree(g)
    tree_set = set(tree)
    cotree = [i for i in range(len(g.edges)) if i not in tree_set]
    col = {e: j for j, e in enumerate(cotree)}
    vectors = []
    for walk in t.faces:
        v = [0] * len(cotree)
        for step, sign in walk:
            j = col.get(step.edge)
            if j is not None:
                v[j] += sign
        vectors.append(tuple(v))
    return Relations(tuple(tree), tuple(cotree), tuple(vectors))


# -- partial graphs ------------------------------------------------------------

Terminal = tuple[int, int, int]  # (vertex, port, open port the sector heads to)


@dataclass(frozen=True)
class StrandTrace:
    closed: int  # number of closed walks (completed faces)
    arcs: dict[Terminal, Terminal]  # symmetric pairing of terminals


def trace_strands(
    vertex_count: int,
    edges: Sequence[tuple[tuple[int, int], tuple[int, int], int]],
    matching: VertexMatching = DEFAULT_MATCHING,
) -> StrandTrace:
    """Trace a graph in which some ports are left open.

    A sector whose far port is open ends a walk at a terminal
    ``(vertex, port, open_port)``. Returns the number of closed walks and
    the pairing of terminals by the open walks.
    """
    pm = {}
    for i, (a, b, _c) in enumerate(edges):
        for end, x in ((0, a), (1, b)):
            if x in pm:
                raise ValueError(f"duplicate port {x}")
            pm[x] = (i, end)

    def across(node):
        e, end, s = node
        return (e, 1 - end, (edges[e][2] - s) % 3)

    def turn(node):
        e, end, s = node
        v, p = edges[e][end]
        q = matching.target(p, s)
        if (v, q) not in pm:
            return (v, p, q), None
        e2, end2 = pm[(v, q)]
        return None, (e2, end2, matching.slot(q, p))

    def run(node):
        # walk forward starting by crossing the strand at ``node``
        while True:
            seen.add(node)
            m = across(node)
            seen.add(m)
            term, nxt = turn(m)
            if term is not None:
                return term, None
            if nxt == first:
                return None, True
            node = nxt

    seen: set = set()
    closed = 0
    arcs: dict[Terminal, Terminal] = {}
    for e in range(len(edges)):
        for end in (0, 1):
            for s in range(3):
                first = (e, end, s)
                if first in seen:
                    continue
                term_fwd, is_closed = run(first)
                if is_closed:
                    closed += 1
                    continue
                # the walk is open; go backwards from ``first`` through its vertex sector
                term_back, nxt = turn(first)
                if term_back is None:
                    first = None  # no closing possible on this branch
                    term_back, _ = run(nxt)
                arcs[term_fwd] = term_back
                arcs[term_back] = term_fwd
    return StrandTrace(closed, arcs)

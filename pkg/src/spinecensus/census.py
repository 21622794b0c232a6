"""Census of one-face open-chain spines, chirality, closed-chain sampling and gluing export."""

from __future__ import annotations

import heapq
import json
import os
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import product
from multiprocessing import Pool
from pathlib import Path
from typing import Iterable, Iterator, Sequence

import numpy as np

from .automaton import FAIL, OPEN_CHAIN_FSA, Automaton
from .invariants import InvariantReport, invariant_report
from .ograph import (
    LETTERS,
    ClosedChainParams,
    Letter,
    OGraph,
    OpenChainParams,
    canonical_form,
    make_closed_chain,
    make_open_chain,
    mirror_open_chain,
)
from .snf import abelian_quotient
from .tracer import DEFAULT_MATCHING, VertexMatching, _Arrays, face_count, spanning_tree

__all__ = [
    "CHIRAL",
    "AMPHICHIRAL",
    "CensusRecord",
    "CensusError",
    "enumerate_canonical",
    "enumerate_open_chain",
    "census_count",
    "cumulative_count",
    "classify_chirality",
    "ChainTracer",
    "MonteCarloReport",
    "closed_chain_monte_carlo",
    "closed_chain_exact_probability",
    "CLOSED_CHAIN_LETTERS",
    "CLOSED_CHAIN_FIRST",
    "GluingTable",
    "export_gluing_table",
    "write_part",
    "merge_parts",
    "SCHEMA_VERSION",
]

CHIRAL, AMPHICHIRAL = "CHIRAL", "AMPHICHIRAL"
SCHEMA_VERSION = 1


class CensusError(RuntimeError):
    """An internal consistency check failed (tracer, automaton and duality disagree)."""


# -- letter codes (3*beta + gamma) ------------------------------------------------

_SWAP = tuple(3 * (c % 3) + c // 3 for c in range(9))


def _f(c: int) -> int:
    return (1 - c) % 3


_MIRROR_ODD = tuple(3 * _f(c % 3) + _f(c // 3) for c in range(9))  # swap, then 1 - c
_MIRROR_EVEN = tuple(3 * _f(c // 3) + _f(c % 3) for c in range(9))


def _orbit_keys(a: int, d: int, w: tuple[int, ...]) -> set[tuple]:
    sw = tuple(map(_SWAP.__getitem__, w))
    return {(a, d, w), (a, d, sw), (d, a, sw[::-1]), (d, a, w[::-1])}


def _params_from_codes(a: int, d: int, w: Sequence[int]) -> OpenChainParams:
    return OpenChainParams(len(w) + 1, a, d, tuple(LETTERS[c] for c in w))


def _codes(params: OpenChainParams) -> tuple[int, int, tuple[int, ...]]:
    return params.alpha, params.delta, tuple(x.code for x in params.word)


# -- accepted words by code ----------------------------------------------------------


@lru_cache(maxsize=None)
def _code_table(a: Automaton = OPEN_CHAIN_FSA):
    index = {s: i for i, s in enumerate(a.states)}
    nxt = tuple(tuple(index[a.transitions[(s, x)]] for x in LETTERS) for s in a.states)
    accept = frozenset(index[s] for s in a.accepts)
    return index[a.start], index[FAIL], nxt, accept


@lru_cache(maxsize=None)
def _tails(state: int, depth: int) -> tuple[tuple[int, ...], ...]:
    """All code words of the given length leading from ``state`` into an accept state."""
    _, fail, nxt, accept = _code_table()
    if depth == 0:
        return ((),) if state in accept else ()
    out = []
    for c in range(9):
        t = nxt[state][c]
        if t != fail:
            out.extend((c,) + rest for rest in _tails(t, depth - 1))
    return tuple(out)


def _run_codes(prefix: Sequence[int]) -> int:
    start, fail, nxt, _ = _code_table()
    s = start
    for c in prefix:
        s = nxt[s][c]
        if s == fail:
            break
    return s


def _words_with_prefix(length: int, prefix: tuple[int, ...]) -> Iterator[tuple[int, ...]]:
    """Accepted code words of ``length`` starting with ``prefix``, lexicographically."""
    _, fail, nxt, _ = _code_table()
    s = _run_codes(prefix)
    if s == fail:
        return
    rest = length - len(prefix)
    tail_len = min(rest, 3)
    walk = rest - tail_len
    # depth-first over the middle part, then splice cached tails
    stack: list[tuple[int, tuple[int, ...]]] = [(s, prefix)]
    while stack:
        state, w = stack.pop()
        if len(w) - len(prefix) == walk:
            for t in _tails(state, tail_len):
                yield w + t
            continue
        for c in range(8, -1, -1):
            t = nxt[state][c]
            if t != fail:
                stack.append((t, w + (c,)))


def _prefixes(length: int, depth: int) -> list[tuple[int, ...]]:
    _, fail, _, _ = _code_table()
    depth = min(depth, length)
    return [p for p in product(range(9), repeat=depth) if _run_codes(p) != fail]


# -- fast single-face tracer for open chains -----------------------------------------


class ChainTracer:
    """Face tracing specialized to the open chain on n vertices.

    The vertex-sector table only depends on n, so it is built once; each
    colouring only changes the strand crossings. ``relations`` reproduces
    ``boundary_word(trace_faces(g), g)`` for one-face colourings.
    """

    def __init__(self, n: int, matching: VertexMatching = DEFAULT_MATCHING):
        g = make_open_chain(OpenChainParams(n, 0, 0, ((0, 0),) * (n - 1)))
        arr = _Arrays(g, matching)
        self.n = n
        self.size = arr.size
        self.turn = arr.turn
        tree = set(spanning_tree(g))
        self.cotree = [i for i in range(2 * n) if i not in tree]
        col = [-1] * (2 * n)
        for j, e in enumerate(self.cotree):
            col[e] = j
        # per slot-end: cotree column and traversal sign (+1 from endpoint a)
        self._node_col = [col[x // 6] for x in range(self.size)]
        self._node_sign = [1 if x % 6 < 3 else -1 for x in range(self.size)]
        self._blocks = [[3 + (c - s) % 3 for s in range(3)] + [(c - s) % 3 for s in range(3)] for c in range(3)]

    def _across(self, colors: Sequence[int]) -> list[int]:
        blocks = self._blocks
        return [6 * e + off for e, c in enumerate(colors) for off in blocks[c]]

    @staticmethod
    def colors(a: int, d: int, w: Sequence[int]) -> list[int]:
        out = [a]
        for c in w:
            out.append(c // 3)
            out.append(c % 3)
        out.append(d)
        return out

    def relations(self, a: int, d: int, w: Sequence[int]) -> tuple[int, ...] | None:
        """Relation vector of the single face, or None if there are several faces."""
        across = self._across(self.colors(a, d, w))
        turn, node_col, node_sign = self.turn, self._node_col, self._node_sign
        vec = [0] * len(self.cotree)
        x = 0
        steps = 0
        while True:
            j = node_col[x]
            if j >= 0:
                vec[j] += node_sign[x]
            x = turn[across[x]]
            steps += 1
            if x == 0:
                break
        if 2 * steps != self.size:
            return None
        return tuple(vec)


# -- records -----------------------------------------------------------------------------


@dataclass(frozen=True)
class CensusRecord:
    n: int
    params: OpenChainParams
    orbit_size: int
    chirality: str
    invariants: InvariantReport
    relations: tuple[int, ...] = ()

    def to_json(self) -> str:
        tv = self.invariants.tv
        return json.dumps(
            {
                "schema": SCHEMA_VERSION,
                "n": self.n,
                "alpha": self.params.alpha,
                "delta": self.params.delta,
                "word": [list(x) for x in self.params.word],
                "orbit_size": self.orbit_size,
                "chirality": self.chirality,
                "h1_rank": self.invariants.h1_rank,
                "volume": self.invariants.volume,
                "tv": {str(r): tv[r] for r in sorted(tv)},
            },
            separators=(",", ":"),
        )


def _is_canonical(a: int, d: int, w: tuple[int, ...]) -> tuple[bool, int]:
    """Self-canonical test and orbit size on codes (flat residue order = code order)."""
    if a > d:
        return False, 0
    sw = tuple(map(_SWAP.__getitem__, w))
    if a < d:
        if w > sw:
            return False, 0
        return True, 2 if w == sw else 4
    rw, rsw = w[::-1], sw[::-1]
    if w > sw or w > rw or w > rsw:
        return False, 0
    return True, len({w, sw, rw, rsw})


def _mirror_codes(a: int, d: int, w: tuple[int, ...]) -> tuple[int, int, tuple[int, ...]]:
    return _f(a), _f(d), tuple((_MIRROR_ODD if k % 2 == 0 else _MIRROR_EVEN)[c] for k, c in enumerate(w))


def _chirality_codes(a: int, d: int, w: tuple[int, ...]) -> str:
    return AMPHICHIRAL if min(_orbit_keys(*_mirror_codes(a, d, w))) == (a, d, w) else CHIRAL


def classify_chirality(r: CensusRecord | OpenChainParams) -> str:
    """AMPHICHIRAL iff the mirrored colouring is in the same orbit."""
    params = r.params if isinstance(r, CensusRecord) else r
    return AMPHICHIRAL if canonical_form(mirror_open_chain(params)) == canonical_form(params) else CHIRAL


def enumerate_canonical(n: int, prefix_depth: int = 2) -> Iterator[tuple[int, int, tuple[int, ...], int]]:
    """(alpha, delta, word codes, orbit size) of every self-canonical accepted tuple, in order."""
    for task in _tasks(n, prefix_depth):
        yield from _canonical_in_shard(*task)


def _tasks(n: int, prefix_depth: int) -> list[tuple[int, int, int, tuple[int, ...]]]:
    m = n - 1
    prefixes = _prefixes(m, prefix_depth)
    return [(m, a, d, p) for a, d in ((0, 0), (0, 1), (1, 1)) for p in prefixes]


def _canonical_in_shard(m: int, a: int, d: int, prefix: tuple[int, ...]):
    for w in _words_with_prefix(m, prefix):
        ok, size = _is_canonical(a, d, w)
        if ok:
            yield a, d, w, size


def census_count(n: int) -> int:
    if n < 2:
        raise ValueError("n must be >= 2")
    return sum(1 for _ in enumerate_canonical(n))


def cumulative_count(max_n: int) -> int:
    if max_n < 2:
        raise ValueError("max_n must be >= 2")
    return sum(census_count(n) for n in range(2, max_n + 1))


def _shard_records(task) -> list[tuple]:
    """Worker: canonical tuples of one shard, re-verified by an independent trace."""
    (m, a, d, prefix), tv_levels, q0_multiplier = task
    tracer = _tracer(m + 1)
    out = []
    for a_, d_, w, size in _canonical_in_shard(m, a, d, prefix):
        rel = tracer.relations(a_, d_, w)
        if rel is None:
            raise CensusError(f"accepted colouring {(a_, d_, w)} traces to several faces")
        out.append((a_, d_, w, size, _chirality_codes(a_, d_, w), rel))
    return out


@lru_cache(maxsize=64)
def _tracer(n: int) -> ChainTracer:
    return ChainTracer(n)


def enumerate_open_chain(
    n: int,
    jobs: int = 1,
    tv_levels: Iterable[int] = (3, 5, 7),
    q0_multiplier: int = 1,
    prefix_depth: int = 2,
) -> Iterator[CensusRecord]:
    """Census records at n, lexicographic in canonical params.

    Shards are (alpha, delta, word prefix) triples; with ``jobs`` > 1 they are
    processed by a worker pool and merged in shard order, which is the
    global order. Each record is re-traced and its homology computed.
    """
    if n < 2:
        raise ValueError("n must be >= 2")
    if jobs < 1:
        raise ValueError("jobs must be >= 1")
    tv_levels = tuple(tv_levels)
    tasks = [(t, tv_levels, q0_multiplier) for t in _tasks(n, prefix_depth)]
    if jobs == 1:
        chunks: Iterable[list] = map(_shard_records, tasks)
        yield from _records(n, chunks, tv_levels, q0_multiplier)
    else:
        with Pool(jobs) as pool:
            chunks = pool.imap(_shard_records, tasks, chunksize=1)
            yield from _records(n, chunks, tv_levels, q0_multiplier)


def _records(n, chunks, tv_levels, q0_multiplier) -> Iterator[CensusRecord]:
    for chunk in chunks:
        for a, d, w, size, chir, rel in chunk:
            h1 = abelian_quotient([rel], len(rel))
            report = invariant_report(n, None, tv_levels, q0_multiplier, h1=h1)
            yield CensusRecord(n, _params_from_codes(a, d, w), size, chir, report, rel)


# -- closed chains -------------------------------------------------------------------

CLOSED_CHAIN_LETTERS = (Letter(0, 2), Letter(1, 2), Letter(2, 0), Letter(2, 1))
CLOSED_CHAIN_FIRST = (Letter(0, 0), Letter(0, 1), Letter(1, 0), Letter(1, 1))


@dataclass(frozen=True)
class MonteCarloReport:
    n: int
    samples: int
    seed: int
    single_face_count: int
    per_first_letter: dict  # first letter -> (samples, single-face count)

    @property
    def frequency(self) -> float:
        return self.single_face_count / self.samples

    def to_dict(self) -> dict:
        return {
            "schema": SCHEMA_VERSION,
            "n": self.n,
            "samples": self.samples,
            "seed": self.seed,
            "single_face_count": self.single_face_count,
            "frequency": self.frequency,
            "per_first_letter": [
                {"first": list(k), "samples": s, "single_face_count": c, "frequency": c / s if s else None}
                for k, (s, c) in sorted(self.per_first_letter.items())
            ],
        }


def closed_chain_sample(n: int, seed: int, index: int) -> ClosedChainParams:
    """Sample ``index``: first letter cycles through the 4 allowed values, the rest uniform."""
    rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=(index,))))
    rest = rng.integers(0, 4, size=n - 1)
    return ClosedChainParams((CLOSED_CHAIN_FIRST[index % 4],) + tuple(CLOSED_CHAIN_LETTERS[i] for i in rest))


def closed_chain_monte_carlo(n: int, samples: int, seed: int) -> MonteCarloReport:
    if n < 2:
        raise ValueError("n must be >= 2")
    if samples < 1:
        raise ValueError("samples must be >= 1")
    per = {x: [0, 0] for x in CLOSED_CHAIN_FIRST}
    hits = 0
    for i in range(samples):
        p = closed_chain_sample(n, seed, i)
        one = face_count(make_closed_chain(p)) == 1
        hits += one
        slot = per[p.pairs[0]]
        slot[0] += 1
        slot[1] += one
    return MonteCarloReport(n, samples, seed, hits, {k: tuple(v) for k, v in per.items()})


def validate_closed_chain(params: ClosedChainParams) -> None:
    """Reject colourings outside the sampled family."""
    if params.pairs[0] not in CLOSED_CHAIN_FIRST:
        raise ValueError(f"first letter {tuple(params.pairs[0])} is not one of {[tuple(x) for x in CLOSED_CHAIN_FIRST]}")
    for x in params.pairs[1:]:
        if x not in CLOSED_CHAIN_LETTERS:
            raise ValueError(f"letter {tuple(x)} is not one of {[tuple(x) for x in CLOSED_CHAIN_LETTERS]}")


class _ChainTangle:
    """Transfer matrix over pairings of the 12 open slot-ends of a chain segment.

    Points 0-5 are the slots of ports 1, 2 of the first vertex, 6-11 those of
    ports 0, 3 of the last vertex. A state is the pairing of these points by
    the partial face walks.
    """

    def __init__(self, matching: VertexMatching = DEFAULT_MATCHING):
        base = {1: 0, 2: 3, 0: 6, 3: 9}
        vert = [0] * 12
        for p in range(4):
            for s in range(3):
                q = matching.target(p, s)
                vert[base[p] + s] = base[q] + matching.slot(q, p)
        self.vertex = tuple(vert)
        self._cache: dict = {}

    @staticmethod
    def _walk(m1: Sequence[int], m2: dict, ends: Sequence[int], size: int):
        """Paths and cycles of the graph whose edges alternate between matchings m1 and m2."""
        pairs: dict = {}
        seen = bytearray(size)
        for e in ends:
            if seen[e]:
                continue
            x = e
            while True:
                seen[x] = 1
                y = m1[x]
                seen[y] = 1
                if y not in m2:
                    break
                x = m2[y]
            pairs[e], pairs[y] = y, e
        loops = 0
        for v in range(size):
            if seen[v]:
                continue
            loops += 1
            x = v
            while True:
                seen[x] = 1
                y = m1[x]
                seen[y] = 1
                x = m2[y]
                if x == v:
                    break
        return pairs, loops

    def extend(self, state: tuple[int, ...], letter: Letter) -> tuple[tuple[int, ...], int]:
        key = (state, letter)
        hit = self._cache.get(key)
        if hit is not None:
            return hit
        a, b = letter
        m1 = list(state) + [12 + j for j in self.vertex]
        m2 = {}
        for s in range(3):
            m2[6 + s] = 12 + (a - s) % 3
            m2[9 + s] = 15 + (b - s) % 3
        m2.update({v: k for k, v in list(m2.items())})
        pairs, loops = self._walk(m1, m2, list(range(6)) + list(range(18, 24)), 24)

        def idx(v):
            return v if v < 6 else v - 12

        new = [0] * 12
        for k, v in pairs.items():
            new[idx(k)] = idx(v)
        out = (tuple(new), loops)
        self._cache[key] = out
        return out

    def close(self, state: tuple[int, ...], letter: Letter) -> int:
        a, b = letter
        m2 = {}
        for s in range(3):
            m2[6 + s] = (a - s) % 3
            m2[9 + s] = 3 + (b - s) % 3
        m2.update({v: k for k, v in list(m2.items())})
        return self._walk(list(state), m2, (), 12)[1]

    def face_count(self, pairs: Sequence[Letter]) -> int:
        state, loops = self.vertex, 0
        for x in pairs[:-1]:
            state, k = self.extend(state, Letter(*x))
            loops += k
        return loops + self.close(state, Letter(*pairs[-1]))


def closed_chain_exact_probability(n: int, first: Sequence[int], matching: VertexMatching = DEFAULT_MATCHING) -> Fraction:
    """Exact single-face probability for the sampled closed-chain family with fixed first letter."""
    if n < 2:
        raise ValueError("n must be >= 2")
    first = Letter(*first)
    tangle = _ChainTangle(matching)
    state, loops = tangle.extend(tangle.vertex, first)
    dist = {state: 1} if loops == 0 else {}
    for _ in range(n - 2):
        nxt: dict = {}
        for s, c in dist.items():
            for x in CLOSED_CHAIN_LETTERS:
                t, k = tangle.extend(s, x)
                if k == 0:
                    nxt[t] = nxt.get(t, 0) + c
        dist = nxt
    good = sum(c for s, c in dist.items() for x in CLOSED_CHAIN_LETTERS if tangle.close(s, x) == 1)
    return Fraction(good, 4 ** (n - 1))


# -- dual triangulation ---------------------------------------------------------------


@dataclass(frozen=True)
class GluingTable:
    """Ideal triangulation dual to an o-graph: tetrahedron v per vertex, face p per port.

    Each gluing maps face ``fa`` of ``ta`` onto face ``fb`` of ``tb``; ``perm``
    is a permutation of {0,1,2,3} sending fa to fb.
    """

    tetrahedra: int
    gluings: tuple[tuple[int, int, int, int, tuple[int, ...]], ...]

    @staticmethod
    def perm_string(fa: int, fb: int, perm: Sequence[int]) -> str:
        """Digit i is the rank of the image of the i-th smallest vertex of face fa among the vertices of face fb."""
        src = [x for x in range(4) if x != fa]
        dst = [x for x in range(4) if x != fb]
        return "".join(str(dst.index(perm[x])) for x in src)

    def to_text(self) -> str:
        lines = [f"triangulation {self.tetrahedra}"]
        for ta, fa, tb, fb, perm in self.gluings:
            lines.append(f"glue {ta} {fa} {tb} {fb} {self.perm_string(fa, fb, perm)}")
        return "\n".join(lines) + "\n"

    def edge_orbits(self) -> int:
        parent = {(t, i, j): (t, i, j) for t in range(self.tetrahedra) for i in range(4) for j in range(i + 1, 4)}

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for ta, fa, tb, fb, perm in self.gluings:
            verts = [x for x in range(4) if x != fa]
            for i in range(3):
                for j in range(i + 1, 3):
                    u, v = verts[i], verts[j]
                    x, y = sorted((perm[u], perm[v]))
                    ra, rb = find((ta, *sorted((u, v)))), find((tb, x, y))
                    if ra != rb:
                        parent[ra] = rb
        return len({find(x) for x in parent})

    def is_oriented(self) -> bool:
        """All gluings reverse the standard orientation of the tetrahedra."""
        return all(_perm_parity(p) == 1 for *_, p in self.gluings)


def _perm_parity(p: Sequence[int]) -> int:
    return sum(1 for i in range(4) for j in range(i + 1, 4) if p[i] > p[j]) % 2


def gluing_table(g: OGraph, matching: VertexMatching = DEFAULT_MATCHING) -> GluingTable:
    """Dual triangulation of an o-graph.

    The sheet toward port q at port p is dual to the edge of face p opposite
    vertex q, so the strand bijection along an edge fixes the vertex map.
    """
    gl = []
    for e in g.edges:
        (va, pa), (vb, pb) = e.a, e.b
        perm = [0] * 4
        perm[pa] = pb
        for s in range(3):
            perm[matching.target(pa, s)] = matching.target(pb, (e.color - s) % 3)
        gl.append((va, pa, vb, pb, tuple(perm)))
    return GluingTable(g.vertex_count, tuple(gl))


def export_gluing_table(r: CensusRecord | OpenChainParams, matching: VertexMatching = DEFAULT_MATCHING) -> GluingTable:
    params = r.params if isinstance(r, CensusRecord) else r
    g = make_open_chain(params)
    table = gluing_table(g, matching)
    faces = face_count(g, matching)
    if table.edge_orbits() != faces:
        raise CensusError(f"triangulation has {table.edge_orbits()} edges but the spine has {faces} faces")
    return table


# -- persistence --------------------------------------------------------------------


def _sort_key(line: str) -> tuple:
    d = json.loads(line)
    return (d["n"], d["alpha"], d["delta"], [tuple(x) for x in d["word"]])


def write_part(records: Iterable[CensusRecord], path: str | os.PathLike) -> int:
    """Write records to ``path`` atomically (temp file then rename); returns the count."""
    path = Path(path)
    tmp = path.with_suffix(path.suffix + ".tmp")
    count = 0
    with open(tmp, "w", encoding="utf-8") as fh:
        for r in records:
            fh.write(r.to_json())
            fh.write("\n")
            count += 1
    os.replace(tmp, path)
    return count


def merge_parts(parts: Sequence[str | os.PathLike], out: str | os.PathLike) -> int:
    """Sorted merge of individually sorted part files into ``out``; duplicates are an error."""
    handles = [open(p, encoding="utf-8") for p in parts]
    try:
        streams = [((_sort_key(line), line) for line in h if line.strip()) for h in handles]
        count = 0
        last = None
        with open(out, "w", encoding="utf-8") as fh:
            for key, line in heapq.merge(*streams, key=lambda kv: kv[0]):
                if key == last:
                    raise CensusError(f"duplicate census record {key}")
                last = key
                fh.write(line if line.endswith("\n") else line + "\n")
                count += 1
        return count
    finally:
        for h in handles:
            h.close()

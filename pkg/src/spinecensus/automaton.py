"""Finite state automaton deciding single-facedness of open-chain o-graphs.

Cut the open chain vertically through vertex v_k. Four sector germs cross the
cut; read top to bottom they are the upper quadrant (N), the upper fin (U),
the lower fin (D) and the lower quadrant (S). The partial faces to the left of
the cut pair these four germs up, giving one of three patterns written as a
word in two symbols (XYYX pairs N-S and U-D, XXYY pairs N-U and D-S, XYXY
pairs N-D and U-S). FAIL records that a face closed up before the end.

The transition table is derived from the face tracer (``derive_fsa``) and is
also shipped as the constant ``OPEN_CHAIN_FSA``; the test-suite regenerates
it and compares.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from typing import Iterable, Iterator, NamedTuple, Sequence

from .ograph import LETTER_CLASSES, LETTERS, Letter, letter_class
from .tracer import DEFAULT_MATCHING, VertexMatching, trace_strands

__all__ = [
    "XYYX",
    "XXYY",
    "XYXY",
    "FAIL",
    "Automaton",
    "AutomatonError",
    "OPEN_CHAIN_FSA",
    "derive_fsa",
    "accepts",
    "count_accepted",
    "occupancy",
    "accepted_words",
    "transition_counts",
    "lower_bound_simple",
    "lower_bound_simple_ceil",
    "simple_construction_count",
    "lower_bound_refined",
    "upper_bounds",
    "UpperBounds",
    "double_factorial",
    "format_fsa",
]

XYYX, XXYY, XYXY, FAIL = "XYYX", "XXYY", "XYXY", "FAIL"


class AutomatonError(RuntimeError):
    """The traced chain behaviour does not fit a finite pattern automaton."""


@dataclass(frozen=True)
class Automaton:
    states: tuple[str, ...]
    start: str
    accepts: frozenset[str]
    transitions: dict = field(compare=True)  # (state, Letter) -> state

    def step(self, state: str, letter: Sequence[int]) -> str:
        return self.transitions[(state, Letter(*letter))]

    def run(self, word: Iterable[Sequence[int]]) -> str:
        s = self.start
        for letter in word:
            s = self.step(s, letter)
        return s

    def by_class(self) -> dict[str, dict[int, str]]:
        """Transitions as state -> letter class -> state (raises if not class-constant)."""
        out: dict[str, dict[int, str]] = {}
        for s in self.states:
            out[s] = {}
            for k, cls in LETTER_CLASSES.items():
                targets = {self.transitions[(s, x)] for x in cls}
                if len(targets) != 1:
                    raise AutomatonError(f"transition from {s} not constant on class A_{k}")
                out[s][k] = targets.pop()
        return out


def _from_class_table(table: dict[str, dict[int, str]], accept: Iterable[str]) -> Automaton:
    transitions = {}
    for s, row in table.items():
        for x in LETTERS:
            transitions[(s, x)] = row[letter_class(x)]
    return Automaton(tuple(table), XYYX, frozenset(accept), transitions)


OPEN_CHAIN_FSA = _from_class_table(
    {
        XYYX: {0: FAIL, 1: FAIL, 2: XXYY, 3: XXYY},
        XXYY: {0: FAIL, 1: XYYX, 2: XXYY, 3: XYXY},
        XYXY: {0: FAIL, 1: XYYX, 2: FAIL, 3: XYYX},
        FAIL: {0: FAIL, 1: FAIL, 2: FAIL, 3: FAIL},
    },
    accept=(XXYY, XYXY),
)


# -- derivation from the tracer -----------------------------------------------------


def _prefix_edges(alpha: int, word: Sequence[Letter], delta: int | None):
    m = len(word)
    edges = [((0, 1), (0, 2), alpha)]
    for k, (b, g) in enumerate(word):
        edges.append(((k, 0), (k + 1, 1), b))
        edges.append(((k, 3), (k + 1, 2), g))
    if delta is not None:
        edges.append(((m, 0), (m, 3), delta))
    return m + 1, edges


def cut_pattern(word: Sequence[Letter], alpha: int = 0, matching: VertexMatching = DEFAULT_MATCHING) -> str:
    """Pattern at the cut through the last vertex of the chain prefix ``word``."""
    nv, edges = _prefix_edges(alpha, word, None)
    st = trace_strands(nv, edges, matching)
    if st.closed:
        return FAIL
    v = nv - 1
    order = [(v, 1, 0), (v, 2, 0), (v, 1, 3), (v, 2, 3)]  # N, U, D, S
    labels: dict = {}
    out = []
    for t in order:
        if t not in labels:
            sym = "XY"[len(set(labels.values()))]
            labels[t] = sym
            labels[st.arcs[t]] = sym
        out.append(labels[t])
    return "".join(out)


def _closes_single(word: Sequence[Letter], delta: int, alpha: int, matching: VertexMatching) -> bool:
    nv, edges = _prefix_edges(alpha, word, delta)
    st = trace_strands(nv, edges, matching)
    return st.closed == 1 and not st.arcs


def derive_fsa(matching: VertexMatching = DEFAULT_MATCHING, check_depth: int = 2) -> Automaton:
    """Build the pattern automaton by tracing chain prefixes.

    Every reachable pattern gets a representative prefix; successors are
    computed by tracing representative + letter. With ``check_depth`` > 0
    every prefix of length <= check_depth is also traced and must land where
    the table says, which confirms that the pattern alone determines the
    future. Accept states are those closed to a single face by the final
    loop, required to agree for delta = 0 and delta = 1.
    """
    start = cut_pattern((), 0, matching)
    if cut_pattern((), 1, matching) != start:
        raise AutomatonError("alpha = 0 and alpha = 1 give different start patterns")
    if start == FAIL:
        raise AutomatonError("start pattern already has a closed face")
    reps: dict[str, tuple[Letter, ...]] = {start: ()}
    order = [start]
    transitions = {}
    i = 0
    while i < len(order):
        s = order[i]
        i += 1
        for x in LETTERS:
            t = cut_pattern(reps[s] + (x,), 0, matching)
            transitions[(s, x)] = t
            if t != FAIL and t not in reps:
                reps[t] = reps[s] + (x,)
                order.append(t)
    states = tuple(order) + (FAIL,)
    for x in LETTERS:
        transitions[(FAIL, x)] = FAIL

    for k in range(1, check_depth + 1):
        for word in product(LETTERS, repeat=k):
            s = start
            for x in word:
                s = transitions[(s, x)]
            if cut_pattern(word, 0, matching) != s:
                raise AutomatonError(f"pattern of {word} is not determined by the automaton")

    accepting = set()
    for s in order:
        closes = {d: _closes_single(reps[s], d, 0, matching) for d in (0, 1)}
        if closes[0] != closes[1]:
            raise AutomatonError(f"final loop colours 0 and 1 disagree on state {s}")
        if _closes_single(reps[s], 2, 0, matching):
            raise AutomatonError("final loop colour 2 closed a single face")
        if closes[0]:
            accepting.add(s)
    return Automaton(states, start, frozenset(accepting), transitions)


# -- running and counting -----------------------------------------------------


def accepts(a: Automaton, word: Iterable[Sequence[int]]) -> bool:
    return a.run(word) in a.accepts


def occupancy(length: int, a: Automaton = OPEN_CHAIN_FSA) -> dict[str, int]:
    """Number of words of the given length ending in each state."""
    vec = {s: 0 for s in a.states}
    vec[a.start] = 1
    for _ in range(length):
        nxt = {s: 0 for s in a.states}
        for s, c in vec.items():
            if c:
                for x in LETTERS:
                    nxt[a.transitions[(s, x)]] += c
        vec = nxt
    return vec


def count_accepted(length: int, a: Automaton = OPEN_CHAIN_FSA) -> int:
    if length < 0:
        raise ValueError("length must be non-negative")
    vec = occupancy(length, a)
    return sum(vec[s] for s in a.accepts)


def accepted_words(length: int, a: Automaton = OPEN_CHAIN_FSA) -> Iterator[tuple[Letter, ...]]:
    """Accepted words in lexicographic order, by depth-first walk with FAIL pruning."""
    word: list[Letter] = []

    def walk(state: str, depth: int):
        if depth == length:
            if state in a.accepts:
                yield tuple(word)
            return
        for x in LETTERS:
            t = a.transitions[(state, x)]
            if t == FAIL:
                continue
            word.append(x)
            yield from walk(t, depth + 1)
            word.pop()

    yield from walk(a.start, 0)


def transition_counts(a: Automaton = OPEN_CHAIN_FSA) -> Counter:
    """(source, target) -> number of letters."""
    return Counter((s, a.transitions[(s, x)]) for s in a.states for x in LETTERS)


# -- closed-form bounds -------------------------------------------------------


def lower_bound_simple(n: int) -> float:
    return 4.0 * 12.0 ** ((2 * n - 5) / 3)


def lower_bound_simple_ceil(n: int) -> int:
    """ceil(4 * 12^((2n-5)/3)) in exact integer arithmetic."""
    a = 2 * n - 5
    # x^3 = 64 * 12^a; find the least integer m >= 1 with m^3 >= 64 * 12^a
    num, den = (64 * 12**a, 1) if a >= 0 else (64, 12 ** (-a))
    # bisection on the exact inequality m^3 * den >= num
    lo, hi = 1, 1
    while hi**3 * den < num:
        hi *= 2
    while lo < hi:
        mid = (lo + hi) // 2
        if mid**3 * den >= num:
            hi = mid
        else:
            lo = mid + 1
    m = lo
    return m


def simple_construction_count(n: int) -> int:
    """Words built from XYYX->XXYY->XYXY->XYYX cycles, plus one XXYY self-loop when 3 | n-1."""
    m = n - 1
    h, r = divmod(m, 3)
    if r == 1:
        return 144**h * 6
    if r == 2:
        return 144**h * 24
    return h * 48 * 144 ** (h - 1)


def lower_bound_refined(n: int) -> int:
    if n < 2:
        raise ValueError("n must be >= 2")
    total = 0
    for k in range(n - 1):
        h, r = divmod(n - k - 1, 3)
        if r == 1:
            total += 2**k * 6 ** (2 * h + 1) * 4**h * math.comb(h + k, h)
        elif r == 2:
            total += 2**k * 6 ** (2 * h + 1) * 4 ** (h + 1) * math.comb(h + k, h)
    return total


def double_factorial(k: int) -> int:
    out = 1
    while k > 1:
        out *= k
        k -= 2
    return out


class UpperBounds(NamedTuple):
    open_chain: int
    per_graph: int
    total: int


def upper_bounds(n: int) -> UpperBounds:
    return UpperBounds(9**n, 18**n, 18**n * double_factorial(4 * n - 1))


def growth_rate(n: int) -> float:
    """n-th root of lower_bound_refined(n), computed without overflowing floats."""
    return math.exp(math.log(Fraction(lower_bound_refined(n))) / n) if n < 1000 else float("nan")


def format_fsa(a: Automaton = OPEN_CHAIN_FSA) -> str:
    head = "state  " + " ".join(f"{x.beta}{x.gamma}".rjust(4) for x in LETTERS)
    lines = [head]
    for s in a.states:
        mark = ("*" if s in a.accepts else " ") + (">" if s == a.start else " ")
        lines.append(f"{mark}{s:5}" + " ".join(a.transitions[(s, x)].rjust(4) for x in LETTERS))
    lines.append("start " + a.start)
    lines.append("accept " + " ".join(sorted(a.accepts)))
    return "\n".join(lines) + "\n"

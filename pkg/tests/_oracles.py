"""Brute-force references shared by the unit and acceptance tests.

Nothing here goes through the automaton or the census code tables: single
faces come from the general face tracer and orbits from applying the two
symmetry moves until closure.
"""

import itertools

from spinecensus.ograph import LETTERS, OpenChainParams, make_open_chain, rotation_move, swap_move
from spinecensus.tracer import is_single_face


def single_face_tuples(n, single_face=None):
    """Every (alpha, delta, word) on n vertices that traces to one face."""
    test = single_face or (lambda p: is_single_face(make_open_chain(p)))
    out = []
    for a in range(3):
        for d in range(3):
            for w in itertools.product(LETTERS, repeat=n - 1):
                p = OpenChainParams(n, a, d, w)
                if test(p):
                    out.append(p)
    return out


def orbit_partition(tuples):
    """Orbits under the group generated by the swap and rotation moves (BFS closure)."""
    pool = set(tuples)
    seen = set()
    orbits = []
    for p in sorted(pool, key=OpenChainParams.key):
        if p in seen:
            continue
        orbit = {p}
        frontier = [p]
        while frontier:
            q = frontier.pop()
            for r in (swap_move(q), rotation_move(q)):
                if r not in orbit:
                    orbit.add(r)
                    frontier.append(r)
        if not orbit <= pool:
            raise AssertionError(f"orbit of {p} leaves the single-face set")
        seen |= orbit
        orbits.append(frozenset(orbit))
    return orbits

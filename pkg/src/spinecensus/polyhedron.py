"""Abstract standard polyhedra and their isomorphisms.

A standard polyhedron is determined by a neighbourhood of its singular
graph: at each vertex a cone on the complete graph K4 (one sector per pair of
ports), and along each edge a bijection between the three sheets at its two
ends. Sheets at a port are named by the port their sector leads to.

All vertices of a normalized o-graph carry the same oriented local model,
whose orientation-preserving symmetries act on the ports as the even
permutations. An oriented isomorphism therefore uses even port permutations
at every vertex, an orientation-reversing one odd permutations everywhere.
"""

from __future__ import annotations

from itertools import permutations

from .ograph import OGraph
from .tracer import DEFAULT_MATCHING, VertexMatching

__all__ = ["SheetStructure", "sheet_structure", "isomorphic", "EVEN_PERMS", "ODD_PERMS"]


def _parity(p) -> int:
    inv = sum(1 for i in range(len(p)) for j in range(i + 1, len(p)) if p[i] > p[j])
    return inv % 2


EVEN_PERMS = tuple(p for p in permutations(range(4)) if _parity(p) == 0)
ODD_PERMS = tuple(p for p in permutations(range(4)) if _parity(p) == 1)

# (vertex, port) -> ((vertex', port'), {sheet target at this end: sheet target at the other end})
SheetStructure = dict


def sheet_structure(g: OGraph, matching: VertexMatching = DEFAULT_MATCHING) -> SheetStructure:
    out = {}
    for e in g.edges:
        (_, pa), (_, pb) = e.a, e.b
        bij = {matching.target(pa, s): matching.target(pb, (e.color - s) % 3) for s in range(3)}
        out[e.a] = (e.b, bij)
        out[e.b] = (e.a, {v: k for k, v in bij.items()})
    return out


def isomorphic(
    g1: OGraph,
    g2: OGraph,
    orientation: str = "preserving",
    matching: VertexMatching = DEFAULT_MATCHING,
) -> bool:
    """Whether g1 and g2 define isomorphic polyhedra.

    ``orientation='preserving'`` asks for an oriented isomorphism,
    ``'reversing'`` for an orientation-reversing one (so g1 is isomorphic to
    the mirror of g2). Port permutations are propagated along edges from a
    seed vertex, so the search is (vertices x 12) seeds each linear in size.
    """
    if orientation not in ("preserving", "reversing"):
        raise ValueError("orientation must be 'preserving' or 'reversing'")
    if g1.vertex_count != g2.vertex_count or g1.edge_count != g2.edge_count:
        return False
    perms = EVEN_PERMS if orientation == "preserving" else ODD_PERMS
    s1 = sheet_structure(g1, matching)
    s2 = sheet_structure(g2, matching)
    n = g1.vertex_count
    # components of g1 must be seeded separately
    comps = _components(g1)
    return _match_components(comps, 0, {}, {}, s1, s2, perms, n)


def _components(g: OGraph) -> list[int]:
    adj = {v: set() for v in range(g.vertex_count)}
    for e in g.edges:
        adj[e.a[0]].add(e.b[0])
        adj[e.b[0]].add(e.a[0])
    roots, seen = [], set()
    for v in range(g.vertex_count):
        if v in seen:
            continue
        roots.append(v)
        stack = [v]
        seen.add(v)
        while stack:
            for w in adj[stack.pop()]:
                if w not in seen:
                    seen.add(w)
                    stack.append(w)
    return roots


def _match_components(roots, k, phi, pis, s1, s2, perms, n) -> bool:
    if k == len(roots):
        return len(set(phi.values())) == n
    used = set(phi.values())
    for w0 in range(n):
        if w0 in used:
            continue
        for pi0 in perms:
            phi2, pis2 = dict(phi), dict(pis)
            if _propagate(roots[k], w0, pi0, phi2, pis2, s1, s2, perms):
                if _match_components(roots, k + 1, phi2, pis2, s1, s2, perms, n):
                    return True
    return False


def _propagate(v0, w0, pi0, phi, pis, s1, s2, perms) -> bool:
    used = set(phi.values())
    if w0 in used:
        return False
    phi[v0] = w0
    pis[v0] = pi0
    stack = [v0]
    while stack:
        v = stack.pop()
        pv = pis[v]
        for p in range(4):
            (w, q), bij = s1[(v, p)]
            (w2, q2), bij2 = s2[(phi[v], pv[p])]
            req = {q: q2}
            for t, u in bij.items():
                req[u] = bij2[pv[t]]
            if w in phi:
                if phi[w] != w2 or any(pis[w][x] != y for x, y in req.items()):
                    return False
                continue
            if w2 in set(phi.values()):
                return False
            cand = [pp for pp in perms if all(pp[x] == y for x, y in req.items())]
            if not cand:
                return False
            phi[w] = w2
            pis[w] = cand[0]
            stack.append(w)
    return True

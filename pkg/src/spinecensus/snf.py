"""Smith normal form over the integers, with exact Python ints."""

from __future__ import annotations

from typing import Sequence

__all__ = ["invariant_factors", "abelian_quotient"]


def invariant_factors(matrix: Sequence[Sequence[int]]) -> list[int]:
    """Nonzero diagonal entries d_1 | d_2 | ... of the Smith normal form (all positive)."""
    a = [list(map(int, row)) for row in matrix]
    rows = len(a)
    cols = len(a[0]) if rows else 0
    if any(len(r) != cols for r in a):
        raise ValueError("ragged matrix")
    diag = []
    t = 0
    while t < min(rows, cols):
        # pivot: smallest nonzero |entry| in the trailing block
        best = None
        for i in range(t, rows):
            for j in range(t, cols):
                x = a[i][j]
                if x and (best is None or abs(x) < best[0]):
                    best = (abs(x), i, j)
                    if best[0] == 1:
                        break
            if best and best[0] == 1:
                break
        if best is None:
            break
        _, i, j = best
        a[t], a[i] = a[i], a[t]
        for r in a:
            r[t], r[j] = r[j], r[t]
        while True:
            p = a[t][t]
            dirty = False
            for i in range(t + 1, rows):
                if a[i][t]:
                    q = a[i][t] // p
                    if q:
                        ri, rt = a[i], a[t]
                        for j in range(t, cols):
                            ri[j] -= q * rt[j]
                    if a[i][t]:
                        dirty = True
            for j in range(t + 1, cols):
                if a[t][j]:
                    q = a[t][j] // p
                    if q:
                        for r in a[t:]:
                            r[j] -= q * r[t]
                    if a[t][j]:
                        dirty = True
            if not dirty:
                # enforce divisibility into the trailing block
                bad = next(
                    ((i, j) for i in range(t + 1, rows) for j in range(t + 1, cols) if a[i][j] % p),
                    None,
                )
                if bad is None:
                    break
                i, _ = bad
                rt, ri = a[t], a[i]
                for j in range(t, cols):
                    rt[j] += ri[j]
                continue
            # move the smallest remaining entry of row/column t onto the pivot
            cand = [(abs(a[i][t]), i, t) for i in range(t, rows) if a[i][t]]
            cand += [(abs(a[t][j]), t, j) for j in range(t, cols) if a[t][j]]
            _, i, j = min(cand)
            a[t], a[i] = a[i], a[t]
            for r in a:
                r[t], r[j] = r[j], r[t]
        diag.append(abs(a[t][t]))
        t += 1
    return diag


def abelian_quotient(relations: Sequence[Sequence[int]], generators: int) -> tuple[int, list[int]]:
    """Z^generators modulo the row span of ``relations``: (free rank, torsion coefficients > 1)."""
    rel = [r for r in relations if any(r)]
    if any(len(r) != generators for r in rel):
        raise ValueError("relation length does not match generator count")
    d = invariant_factors(rel) if rel else []
    return generators - len(d), [x for x in d if x > 1]

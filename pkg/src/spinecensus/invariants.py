"""Invariants of the manifolds dual to one-face open-chain spines.

Volumes use the Lobachevsky function and the truncated-tetrahedron formula;
Turaev-Viro values use the symmetric quantum 6j-symbol; first homology comes
from the Smith normal form of the face relations.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Sequence

import numpy as np

from .ograph import OGraph, OpenChainParams, make_open_chain
from .quadrature import adaptive_simpson, gauss_legendre_panels
from .snf import abelian_quotient
from .tracer import DEFAULT_MATCHING, VertexMatching, boundary_word, trace_faces

__all__ = [
    "lobachevsky",
    "LOBACHEVSKY_PI_4_TIMES_8",
    "truncated_tetrahedron_volume",
    "manifold_volume",
    "QuantumContext",
    "quantum_integer",
    "quantum_factorial",
    "quantum_6j_sym",
    "admissible_colors",
    "turaev_viro",
    "homology_h1",
    "InvariantReport",
    "InvariantMismatch",
    "invariant_report",
]

# -- Lobachevsky function ---------------------------------------------------------

_K = 1000  # explicit terms of the Fourier series
_M = 6  # summation-by-parts terms for the tail


@lru_cache(maxsize=None)
def _tail_differences(start: int, order: int) -> tuple[float, ...]:
    """Forward differences Delta^j f(start), j < order, of f(k) = 1/k^2, exactly."""
    out = []
    for j in range(order):
        d = sum((-1) ** (j - i) * math.comb(j, i) * Fraction(1, (start + i) ** 2) for i in range(j + 1))
        out.append(float(d))
    return tuple(out)


_KS = np.arange(1, _K + 1, dtype=float)


def _fourier_direct(w: float) -> float:
    """(1/2) sum sin(2kw)/k^2 for w with sin(w) bounded away from 0."""
    partial = math.fsum(np.sin(2 * _KS * w) / _KS**2)
    z = cmath.exp(2j * w)
    ratio = z / (1 - z)
    diffs = _tail_differences(_K + 1, _M)
    # sum_{k>K} z^k f(k) = z^{K+1}/(1-z) * sum_j (z/(1-z))^j Delta^j f(K+1) + remainder
    head = z ** (_K + 1) / (1 - z)
    tail = sum(head * ratio**j * d for j, d in enumerate(diffs))
    return 0.5 * (partial + tail.imag)


def _fourier(w: float) -> float:
    # w in [0, pi/2]
    if w == 0.0:
        return 0.0
    if w < 1e-3:
        # log(sin u / u) = -u^2/6 - u^4/180 - u^6/2835 - ...; the next term is below w^9
        return w - w * math.log(2 * w) + w**3 / 18 + w**5 / 900 + w**7 / 19845
    if w >= math.pi / 8:
        return _fourier_direct(w)
    # L(w) = L(2w)/2 - L(w + pi/2), and L(w + pi/2) = -L(pi/2 - w)
    return _fourier(2 * w) / 2 + _fourier_direct(math.pi / 2 - w)


def _log_sinc(u: float) -> float:
    return math.log(math.sin(u) / u) if u else 0.0


def _quadrature(w: float) -> float:
    # -int_0^w log(2 sin u) du = w - w log(2w) - int_0^w log(sin u / u) du, for w in [0, pi/2]
    if w == 0.0:
        return 0.0
    return w - w * math.log(2 * w) - adaptive_simpson(_log_sinc, 0.0, w, tol=1e-15)


def lobachevsky(omega: float, method: str = "fourier") -> float:
    """L(omega) = -int_0^omega log|2 sin u| du.

    ``method`` is ``'fourier'`` (series with an explicit tail estimate) or
    ``'quadrature'`` (adaptive Simpson on the regularized integrand). The
    argument is first reduced using oddness and period pi.
    """
    if method not in ("fourier", "quadrature"):
        raise ValueError("method must be 'fourier' or 'quadrature'")
    w = math.fmod(float(omega), math.pi)
    sign = 1.0
    if w < 0:
        w, sign = -w, -1.0
    if w > math.pi / 2:
        w, sign = math.pi - w, -sign
    value = _fourier(w) if method == "fourier" else _quadrature(w)
    return sign * value


def lobachevsky_tail_bound() -> float:
    """Bound on the truncation error of the Fourier route at the worst reduced argument (pi/8)."""
    d = Fraction(0)
    j, start = _M, _K + 1
    for i in range(j):
        d += (-1) ** (j - 1 - i) * math.comb(j - 1, i) * Fraction(1, (start + i) ** 2)
    return 0.5 * abs(float(d)) / (2 * math.sin(math.pi / 8)) ** _M


LOBACHEVSKY_PI_4_TIMES_8 = 8 * lobachevsky(math.pi / 4)

# -- volumes -----------------------------------------------------------------------


def _arccosh_integrand(t: float) -> float:
    # arccosh(cos t / (2 cos t - 1)) = log1p(y + sqrt(y (y + 2))), y = 2 sin^2(t/2) / (2 cos t - 1)
    d = 2 * math.cos(t) - 1
    s = math.sin(t / 2)
    y = 2 * s * s / d
    return math.log1p(y + math.sqrt(y) * math.sqrt(y + 2))


def _arccosh_integrand_vec(t: np.ndarray) -> np.ndarray:
    d = 2 * np.cos(t) - 1
    s = np.sin(t / 2)
    y = 2 * s * s / d
    return np.log1p(y + np.sqrt(y) * np.sqrt(y + 2))


def _check_theta(theta: float) -> None:
    if not 0 < theta < math.pi / 3:
        raise ValueError(f"theta must lie in (0, pi/3), got {theta!r}")


def truncated_tetrahedron_volume(theta: float, backend: str = "simpson") -> float:
    """Volume of the regular truncated tetrahedron with internal dihedral angle theta.

    ``backend`` selects adaptive Simpson (``'simpson'``) or composite
    Gauss-Legendre (``'gauss'``) for the integral term.
    """
    _check_theta(theta)
    if backend == "simpson":
        integral = adaptive_simpson(_arccosh_integrand, 0.0, theta, tol=1e-14)
    elif backend == "gauss":
        # the integrand is analytic up to pi/3; grade panels toward that end
        panels = 8 if theta <= math.pi / 4 else 32
        integral = gauss_legendre_panels(_arccosh_integrand_vec, 0.0, theta, panels=panels, order=24)
    else:
        raise ValueError("backend must be 'simpson' or 'gauss'")
    return LOBACHEVSKY_PI_4_TIMES_8 - 3 * integral


def manifold_volume(n: int, backend: str = "simpson") -> float:
    if n < 2:
        raise ValueError("n must be >= 2")
    return n * truncated_tetrahedron_volume(math.pi / (3 * n), backend)


# -- quantum invariants ------------------------------------------------------------


@dataclass(frozen=True)
class QuantumContext:
    """Level r with q0 = exp(i pi m / r); q0^2 is a primitive r-th root of unity iff gcd(m, r) = 1."""

    r: int
    m: int = 1

    def __post_init__(self):
        if self.r < 3:
            raise ValueError("level r must be >= 3")
        if math.gcd(self.m, self.r) != 1:
            raise ValueError(f"q0^2 is not primitive for m={self.m}, r={self.r}")

    @property
    def q0(self) -> complex:
        return cmath.exp(1j * math.pi * self.m / self.r)

    @classmethod
    def parse(cls, r: int, text: str) -> "QuantumContext":
        """``'pi-over-r'`` (the default root) or ``'<m>pi-over-r'``."""
        text = text.strip()
        if text == "pi-over-r":
            return cls(r)
        if text.endswith("pi-over-r") and text[: -len("pi-over-r")].isdigit():
            return cls(r, int(text[: -len("pi-over-r")]))
        raise ValueError(f"unrecognized q0 specification {text!r}")


def quantum_integer(k: int, ctx: QuantumContext) -> float:
    q = ctx.q0
    val = (q**k - q ** (-k)) / (q - 1 / q)
    if abs(val.imag) > 1e-12:
        raise ArithmeticError(f"quantum integer [{k}] is not real: {val}")
    return val.real


def quantum_factorial(k: int, ctx: QuantumContext) -> float:
    out = 1.0
    for j in range(2, k + 1):
        out *= quantum_integer(j, ctx)
    return out


def admissible_colors(ctx: QuantumContext) -> list[int]:
    return [h for h in range(ctx.r) if 3 * h <= ctx.r - 2]


def quantum_6j_sym(h: int, ctx: QuantumContext) -> float:
    """Symmetric quantum 6j-symbol with all six entries equal to h.

    Delta(h,h,h)^4 times the alternating Racah sum over z in [3h, min(4h, r-2)],
    where Delta^2 = [h]!^3 / [3h+1]!. Four triads each sum to 3h and three
    quadrilaterals each sum to 4h.
    """
    if not isinstance(h, int) or h < 0 or 3 * h > ctx.r - 2:
        raise ValueError(f"colour {h!r} is not admissible at level {ctx.r}")
    fact = [quantum_factorial(k, ctx) for k in range(ctx.r)]
    delta_sq = fact[h] ** 3 / fact[3 * h + 1]
    total = 0.0
    for z in range(3 * h, min(4 * h, ctx.r - 2) + 1):
        total += (-1) ** z * fact[z + 1] / (fact[z - 3 * h] ** 4 * fact[4 * h - z] ** 3)
    return delta_sq**2 * total


def turaev_viro(n: int, ctx: QuantumContext) -> float:
    """sum over admissible h of {h h h; h h h}^n [2h+1]^(1-n)."""
    if n < 1:
        raise ValueError("n must be positive")
    terms = []
    for h in admissible_colors(ctx):
        terms.append(quantum_6j_sym(h, ctx) ** n * quantum_integer(2 * h + 1, ctx) ** (1 - n))
    return math.fsum(terms)


# -- homology -----------------------------------------------------------------------


def homology_h1(g: OGraph, matching: VertexMatching = DEFAULT_MATCHING) -> tuple[int, list[int]]:
    """H_1 of the polyhedron: Z^(cotree edges) modulo the face boundaries."""
    rel = boundary_word(trace_faces(g, matching), g)
    return abelian_quotient(rel.vectors, len(rel.cotree_edges))


class InvariantMismatch(RuntimeError):
    """Computed homology disagrees with H_1 = Z^n."""


@dataclass(frozen=True)
class InvariantReport:
    n: int
    volume: float
    h1_rank: int
    h1_torsion: tuple[int, ...]
    tv: dict = field(default_factory=dict)  # level r -> value

    @property
    def boundary_genus(self) -> int:
        return self.n

    @property
    def heegaard_genus(self) -> int:
        return self.n + 1

    @property
    def complexity(self) -> int:
        return self.n

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "volume": self.volume,
            "h1_rank": self.h1_rank,
            "h1_torsion": list(self.h1_torsion),
            "boundary_genus": self.boundary_genus,
            "heegaard_genus": self.heegaard_genus,
            "complexity": self.complexity,
            "tv": {str(r): v for r, v in sorted(self.tv.items())},
        }


@lru_cache(maxsize=4096)
def _tv_cached(n: int, r: int, m: int) -> float:
    return turaev_viro(n, QuantumContext(r, m))


@lru_cache(maxsize=4096)
def _volume_cached(n: int) -> float:
    return manifold_volume(n)


def invariant_report(
    n: int,
    params: OpenChainParams | None = None,
    tv_levels: Iterable[int] = (3, 5, 7),
    q0_multiplier: int = 1,
    h1: tuple[int, Sequence[int]] | None = None,
) -> InvariantReport:
    """Invariants of the manifold dual to ``params`` (an accepted open chain on n vertices).

    H_1 is computed from the o-graph unless precomputed as ``h1``; anything
    other than rank n and no torsion raises InvariantMismatch.
    """
    if n < 2:
        raise ValueError("n must be >= 2")
    if params is not None and params.n != n:
        raise ValueError("params do not have n vertices")
    if h1 is None:
        if params is None:
            raise ValueError("either params or a precomputed h1 is required")
        h1 = homology_h1(make_open_chain(params))
    rank, torsion = h1[0], tuple(h1[1])
    if rank != n or torsion:
        raise InvariantMismatch(f"H_1 has rank {rank} and torsion {list(torsion)}, expected Z^{n}")
    tv = {r: _tv_cached(n, r, q0_multiplier) for r in sorted(set(tv_levels))}
    return InvariantReport(n, _volume_cached(n), rank, torsion, tv)

"""Spectral distance predictions for the two-block planted partition model.

With intra/inter link probabilities a/n and b/n, the expected neighbourhood
growth from a node is driven by ``A = [[a, b], [b, a]] / 2`` whose
eigenvalues are ``lam1 = (a + b) / 2`` and ``lam2 = (a - b) / 2``.
Typical intra- and inter-block distances solve::

    lam1**(d+1) / (lam1 - 1) +/- lam2**(d+1) / (lam2 - 1) - 2 = n

and to leading order equal ``d -/+ c * n**(alpha - 1)``.
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np

__all__ = [
    "SpectralQuantities",
    "spectral_quantities",
    "above_ks_threshold",
    "growth_matrix",
    "neighborhood_growth",
    "cumulative_growth",
    "cumulative_growth_approx",
    "distance_equation",
    "solve_distances",
    "asymptotic_distances",
    "cost_gap",
]


@dataclass(frozen=True)
class SpectralQuantities:
    lambda1: float
    lambda2: float
    alpha: float
    beta: float
    c: float
    d: float
    delta: float

    def to_dict(self) -> dict:
        return asdict(self)


def spectral_quantities(a: float, b: float, n: float) -> SpectralQuantities:
    """Eigenvalues, exponents and the leading-order distance ``d`` and half-gap ``delta``.

    Requires ``a > b > 0`` and ``lam2 > 1``; the constant ``c`` is singular
    at ``lam2 = 1`` and the expansion is not meaningful below it.
    """
    if not a > b > 0:
        raise ValueError(f"need a > b > 0, got a={a}, b={b}")
    if n < 2:
        raise ValueError("n must be at least 2")
    lam1, lam2 = (a + b) / 2, (a - b) / 2
    if lam2 <= 1:
        raise ValueError(f"lambda2 = {lam2} <= 1: asymptotic expansion does not apply")
    log1 = math.log(lam1)
    alpha = math.log(lam2) / log1
    beta = math.log((lam1 - 1) / lam1) / log1
    c = lam2 / (lam2 - 1) * lam2 ** beta / log1
    d = math.log((lam1 - 1) / lam1 * n) / log1
    return SpectralQuantities(lam1, lam2, alpha, beta, c, d, c * n ** (alpha - 1))


def above_ks_threshold(a: float, b: float) -> bool:
    """Strict Kesten-Stigum condition ``(a - b)**2 > 2 (a + b)``."""
    if a <= 0 or b <= 0:
        raise ValueError("a and b must be positive")
    return (a - b) ** 2 > 2 * (a + b)


def growth_matrix(a: float, b: float) -> np.ndarray:
    return np.array([[a, b], [b, a]], dtype=np.float64) / 2


def neighborhood_growth(a: float, b: float, t: int) -> tuple[float, float]:
    """Expected same-/other-block node counts at distance ``t`` from a node."""
    if t < 0:
        raise ValueError("t must be nonnegative")
    l1t, l2t = ((a + b) / 2) ** t, ((a - b) / 2) ** t
    return (l1t + l2t) / 2, (l1t - l2t) / 2


def _geometric(lam: float, t: int) -> float:
    """sum_{s=1..t} lam**s."""
    if lam == 1:
        return float(t)
    return lam * (lam ** t - 1) / (lam - 1)


def cumulative_growth(a: float, b: float, t: int) -> tuple[float, float]:
    """Exact ``sum_{s=1..t}`` of :func:`neighborhood_growth`."""
    if t < 1:
        raise ValueError("t must be at least 1")
    g1, g2 = _geometric((a + b) / 2, t), _geometric((a - b) / 2, t)
    return (g1 + g2) / 2, (g1 - g2) / 2


def cumulative_growth_approx(a: float, b: float, t: float) -> tuple[float, float]:
    """The ``-2`` approximation behind the distance equations.

    Differs from the exact sum by a ``t``-independent constant in each
    component.
    """
    lam1, lam2 = (a + b) / 2, (a - b) / 2
    if lam1 == 1 or lam2 == 1:
        raise ValueError("approximation undefined when an eigenvalue equals 1")
    x1 = lam1 / (lam1 - 1) * lam1 ** t
    x2 = lam2 / (lam2 - 1) * lam2 ** t
    return (-2 + x1 + x2) / 2, (-2 + x1 - x2) / 2


def distance_equation(a: float, b: float, n: float, d: float, sign: int) -> float:
    """Residual of the intra (``sign=+1``) or inter (``sign=-1``) distance equation."""
    lam1, lam2 = (a + b) / 2, (a - b) / 2
    return (lam1 ** (d + 1) / (lam1 - 1)
            + sign * lam2 ** (d + 1) / (lam2 - 1) - 2 - n)


def _bisect(f, lo, hi, tol):
    flo, fhi = f(lo), f(hi)
    if flo > 0 or fhi < 0:
        raise ValueError(f"no sign change on [{lo:g}, {hi:g}]")
    while hi - lo > tol:
        mid = (lo + hi) / 2
        if f(mid) < 0:
            lo = mid
        else:
            hi = mid
    return (lo + hi) / 2


def solve_distances(a: float, b: float, n: float,
                    tol: float = 1e-9) -> tuple[float, float]:
    """Real solutions ``(d1, d2)`` of the intra/inter distance equations.

    Bisection on ``[0, 2 log n / log lam1]``; both residuals increase in d.
    """
    if not a > b:
        raise ValueError("need a > b")
    lam1, lam2 = (a + b) / 2, (a - b) / 2
    if lam1 <= 1:
        raise ValueError(f"lambda1 = {lam1} must exceed 1")
    if lam2 == 1:
        raise ValueError("distance equations are singular at lambda2 = 1")
    hi = 2 * math.log(n) / math.log(lam1)
    d1 = _bisect(lambda d: distance_equation(a, b, n, d, +1), 0.0, hi, tol)
    d2 = _bisect(lambda d: distance_equation(a, b, n, d, -1), 0.0, hi, tol)
    return d1, d2


def asymptotic_distances(a: float, b: float, n: float) -> tuple[float, float]:
    """Leading-order ``(d - delta, d + delta)``."""
    q = spectral_quantities(a, b, n)
    return q.d - q.delta, q.d + q.delta


def cost_gap(a: float, b: float, n: float) -> float:
    """Asymptotic cost of moving one node to the wrong block,
    ``2 log(lam1) c**2 n**(2 alpha - 1) / log n``."""
    q = spectral_quantities(a, b, n)
    return 2 * math.log(q.lambda1) * q.c ** 2 * n ** (2 * q.alpha - 1) / math.log(n)

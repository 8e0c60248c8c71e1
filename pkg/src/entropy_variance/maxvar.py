"""Stationary points and the maximum of the variance parameter on the simplex.

A stationary point in the interior of the simplex has ``k`` bins at a common
value ``p0`` and the remaining ``m - k`` bins at ``q0``. In the coordinate
``v = 2 k p0 - 1`` the stationarity condition reads

    v ln((1 + v) / (1 - v)) = 2 - v ln((m - k) / k)

and the variance parameter at a root is ``1 / v**2 - 1``. For every ``k``
there is one negative and one positive root. The global maximum is the
positive root at ``k = 1``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .core import ProbabilityDistribution, make_distribution
from .exceptions import DomainError, IndexOutOfRange

_EDGE = 1e-12
XTOL = 1e-14
FTOL = 1e-13
_MAXITER = 400


def f_of_v(v: float) -> float:
    """``v ln((1+v)/(1-v))``: even, non-negative, zero only at the origin."""
    if not -1.0 < v < 1.0:
        raise DomainError(f"f(v) is defined for |v| < 1, got {v!r}")
    return v * (math.log1p(v) - math.log1p(-v))


def _slope(m: int, k: int) -> float:
    return math.log((m - k) / k)


def _residual(v: float, slope: float) -> float:
    return f_of_v(v) - 2.0 + v * slope


def _bracketed_root(g, lo: float, hi: float) -> float:
    """Bisection safeguarded with Illinois-style regula falsi steps.

    ``g(lo)`` and ``g(hi)`` must have opposite signs.
    """
    glo, ghi = g(lo), g(hi)
    if glo == 0.0:
        return lo
    if ghi == 0.0:
        return hi
    if (glo > 0) == (ghi > 0):
        raise DomainError(f"no sign change on [{lo!r}, {hi!r}]")
    side = 0
    for it in range(_MAXITER):
        # alternate a false-position step with a plain bisection so the
        # bracket at least halves every two iterations
        if it % 2 == 0:
            x = (lo * ghi - hi * glo) / (ghi - glo)
            if not lo < x < hi:
                x = 0.5 * (lo + hi)
        else:
            x = 0.5 * (lo + hi)
        gx = g(x)
        if gx == 0.0:
            return x
        if (gx > 0) == (glo > 0):
            lo, glo = x, gx
            if side == -1:
                ghi *= 0.5
            side = -1
        else:
            hi, ghi = x, gx
            if side == 1:
                glo *= 0.5
            side = 1
        if hi - lo < XTOL and abs(gx) < FTOL:
            break
        if hi - lo <= 2.0 * math.ulp(max(abs(lo), abs(hi))):
            break
    # return the endpoint with the smaller true residual
    return lo if abs(g(lo)) <= abs(g(hi)) else hi


@dataclass(frozen=True)
class MaxVarSolution:
    """Roots of the stationarity condition for support size ``m`` and ``k`` outliers.

    ``v_neg`` and ``v_pos`` are the two roots. ``p0``, ``q0`` and ``lambda0``
    are evaluated at ``v``, which is ``v_pos`` unless constructed otherwise.
    """

    m: int
    k: int
    v_neg: float
    v_pos: float
    v: float
    p0: float
    q0: float
    lambda0: float

    @property
    def v_tilde_1(self) -> float:
        return -self.v_neg

    @property
    def v_tilde_2(self) -> float:
        return self.v_pos


def _check_mk(m: int, k: int) -> None:
    if m < 2:
        raise DomainError(f"support size must be at least 2, got {m}")
    if not 1 <= k <= m - 1:
        raise DomainError(f"k must lie in [1, {m - 1}], got {k}")


def stationary_roots(m: int, k: int) -> tuple[float, float]:
    """Return ``(v_neg, v_pos)`` for the given support size and outlier count."""
    _check_mk(m, k)
    slope = _slope(m, k)

    def g(v):
        return _residual(v, slope)

    v_pos = _bracketed_root(g, 0.0, 1.0 - _EDGE)
    v_neg = _bracketed_root(g, -1.0 + _EDGE, 0.0)
    return v_neg, v_pos


def solve_stationary(m: int, k: int, root: str = "pos") -> MaxVarSolution:
    """Stationary point with ``k`` bins at ``p0`` and ``m - k`` bins at ``q0``.

    ``root`` selects which root the distribution fields describe: ``"pos"``
    (the default, closest to the origin when ``k <= m/2``) or ``"neg"``.
    """
    v_neg, v_pos = stationary_roots(m, k)
    if root == "pos":
        v = v_pos
    elif root == "neg":
        v = v_neg
    else:
        raise ValueError(f"root must be 'pos' or 'neg', got {root!r}")
    return MaxVarSolution(
        m=m,
        k=k,
        v_neg=v_neg,
        v_pos=v_pos,
        v=v,
        p0=(1.0 + v) / (2.0 * k),
        q0=(1.0 - v) / (2.0 * (m - k)),
        lambda0=1.0 / (v * v) - 1.0,
    )


@lru_cache(maxsize=4096)
def max_variance(m: int) -> MaxVarSolution:
    """The distribution maximizing the variance parameter for support size ``m``.

    One bin carries ``p0`` and the other ``m - 1`` bins carry ``q0``.
    """
    if m < 2:
        raise DomainError(f"support size must be at least 2, got {m}")
    return solve_stationary(int(m), 1)


def lambda0_max(m: int) -> float:
    return max_variance(m).lambda0


def approx_root(m: int) -> float:
    """Positive root for ``k = 1`` after replacing ``f(v)`` by ``2 v**2``."""
    if m < 2:
        raise DomainError(f"support size must be at least 2, got {m}")
    a = math.log(m - 1) / 4.0
    return math.sqrt(a * a + 1.0) - a


def lambda0_max_asymptotic(m: int) -> float:
    """Large-``m`` form ``ln(m)**2 / 4`` of the maximum variance parameter."""
    if m < 2:
        raise DomainError(f"support size must be at least 2, got {m}")
    return math.log(m) ** 2 / 4.0


def build_stationary_distribution(sol: MaxVarSolution, outlier_index: int = 0) -> ProbabilityDistribution:
    """Materialize a stationary point as a distribution.

    The ``k`` bins at ``p0`` start at ``outlier_index`` and wrap around; the
    rest hold ``q0``. Every rotation is an equivalent stationary point.
    """
    if not 0 <= outlier_index < sol.m:
        raise IndexOutOfRange(f"outlier_index must lie in [0, {sol.m - 1}], got {outlier_index}")
    probs = np.full(sol.m, sol.q0)
    probs[:sol.k] = sol.p0
    probs = np.roll(probs, outlier_index)
    return make_distribution(probs)


def hessian_at_max(m: int) -> np.ndarray:
    """Second derivatives of the variance parameter at the maximum.

    Coordinates are the ``m - 1`` bins at ``q0``; the outlier bin at ``p0`` is
    the dependent one, ``1 - sum`` of the others.
    """
    sol = max_variance(m)
    p0, q0 = sol.p0, sol.q0
    log_ratio = math.log(p0 / q0)
    size = m - 1
    off = -log_ratio * (-1.0 / p0 + 2.0 * log_ratio)
    hess = np.full((size, size), off)
    hess[np.diag_indices(size)] += -log_ratio / q0
    return hess


def hessian_at_max_asymptotic(m: int) -> np.ndarray:
    """Large-``m`` approximation ``-8 L (1 + delta_ij m / ln m)``."""
    lam = lambda0_max(m)
    size = m - 1
    hess = np.full((size, size), -8.0 * lam)
    hess[np.diag_indices(size)] *= 1.0 + m / math.log(m)
    return hess

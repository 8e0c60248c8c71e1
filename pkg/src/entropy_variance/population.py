"""Exact functionals of a known distribution.

Everything here is in nats. Zero-probability bins follow the continuous
extension ``x ln^n x = 0`` at ``x = 0``; the bias and variance coefficients
of the plug-in variance estimator (``gamma`` and ``big_gamma``) additionally
require a strictly positive distribution.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import ProbabilityDistribution
from .exceptions import DomainError, ZeroProbability


def _support_logs(dist: ProbabilityDistribution):
    s = dist.probs[dist.probs > 0]
    return s, np.log(s)


def _require_positive(dist: ProbabilityDistribution, what: str):
    if not dist.strictly_positive:
        zeros = np.flatnonzero(dist.probs == 0).tolist()
        raise ZeroProbability(
            f"{what} needs strictly positive probabilities; bins {zeros} are zero "
            "(drop them with restrict_to_support)"
        )
    return dist.probs, np.log(dist.probs)


def shannon_entropy(dist: ProbabilityDistribution) -> float:
    s, ell = _support_logs(dist)
    h = -math.fsum(s * ell)
    # clip round-off outside [0, ln M]
    return min(max(h, 0.0), math.log(dist.m))


def log_moment(dist: ProbabilityDistribution, n: int) -> float:
    """Raw moment ``sum_i s_i (-ln s_i)^n`` of the per-bin surprisal."""
    if n < 0:
        raise DomainError(f"moment order must be non-negative, got {n}")
    s, ell = _support_logs(dist)
    if n == 0:
        return math.fsum(s)
    return math.fsum(s * (-ell) ** n)


def variance_parameter(dist: ProbabilityDistribution) -> float:
    """Variance of the surprisal ``-ln s_i`` under ``dist``.

    Evaluated in the centered form ``sum_i s_i (H + ln s_i)^2`` so the result
    is non-negative by construction and exactly zero for a distribution that
    is uniform on its support.
    """
    s, ell = _support_logs(dist)
    h = -math.fsum(s * ell)
    dev = h + ell
    if np.all(ell == ell[0]):
        return 0.0
    return math.fsum(s * dev * dev)


def covariance_matrix(dist: ProbabilityDistribution) -> np.ndarray:
    """Multinomial rate covariance ``diag(s) - s s^T`` (times ``1/N``)."""
    s = dist.probs
    chi = np.diag(s) - np.outer(s, s)
    return chi


def gamma_parameter(dist: ProbabilityDistribution) -> float:
    """Coefficient of ``1/N`` in the bias of the plug-in variance estimator."""
    s, ell = _require_positive(dist, "gamma")
    m = dist.m
    h = shannon_entropy(dist)
    return m * h + m - 1 - variance_parameter(dist) + math.fsum(ell)


def gamma_via_covariance(dist: ProbabilityDistribution) -> float:
    """``gamma`` from its defining sums over the covariance matrix."""
    s, ell = _require_positive(dist, "gamma")
    h = shannon_entropy(dist)
    chi = covariance_matrix(dist)
    diag = math.fsum((1 + h + ell) / s * np.diag(chi))
    cross = math.fsum((chi * np.outer(ell, ell)).ravel())
    return diag - cross


def big_gamma_parameter(dist: ProbabilityDistribution) -> float:
    """Coefficient of ``1/N`` in the variance of the plug-in variance estimator.

    Closed form in the surprisal moments; non-negative up to round-off.
    """
    _require_positive(dist, "big_gamma")
    h = shannon_entropy(dist)
    lam = variance_parameter(dist)
    mu3 = log_moment(dist, 3)
    mu4 = log_moment(dist, 4)
    terms = [
        mu4,
        -4.0 * mu3 * (h + 1.0),
        h**3 * (3.0 * h + 4.0),
        2.0 * lam * (3.0 * h * h + 6.0 * h + 2.0),
        -lam * lam,
    ]
    return math.fsum(terms)


def big_gamma_via_covariance(dist: ProbabilityDistribution) -> float:
    """Same quantity as :func:`big_gamma_parameter`, as an explicit O(M^2) double sum."""
    s, ell = _require_positive(dist, "big_gamma")
    h = shannon_entropy(dist)
    bracket = ell * ell + 2.0 * (1.0 + h) * ell
    chi = covariance_matrix(dist)
    return math.fsum((chi * np.outer(bracket, bracket)).ravel())


@dataclass(frozen=True)
class PopulationStats:
    h: float
    lambda0: float
    mu3: float
    mu4: float
    gamma: float
    big_gamma: float

    @property
    def mu2(self) -> float:
        return self.lambda0 + self.h**2

    def predicted_mean(self, n):
        """Expected plug-in variance estimate after ``n`` observations."""
        return self.lambda0 + self.gamma / np.asarray(n, dtype=float)

    def predicted_var(self, n):
        # big_gamma can come out a few ulps below zero
        return max(self.big_gamma, 0.0) / np.asarray(n, dtype=float)


def population_stats(dist: ProbabilityDistribution) -> PopulationStats:
    _require_positive(dist, "population_stats")
    return PopulationStats(
        h=shannon_entropy(dist),
        lambda0=variance_parameter(dist),
        mu3=log_moment(dist, 3),
        mu4=log_moment(dist, 4),
        gamma=gamma_parameter(dist),
        big_gamma=big_gamma_parameter(dist),
    )

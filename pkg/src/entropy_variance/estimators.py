"""Sample-side statistics computed from a count histogram.

The functions here accept a :class:`~entropy_variance.core.CountHistogram`.
Vectorized variants (``*_rows``) take a 2-D array of counts, one histogram
per row, and are what the Monte Carlo harness and the transformer use.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from . import maxvar
from .core import CountHistogram, ProbabilityDistribution
from .exceptions import DomainError, SupportTooSmall
from .population import big_gamma_parameter, gamma_parameter, variance_parameter


def _xlogx_terms(rates: np.ndarray):
    """``(p ln p, p ln^2 p)`` with the ``0 ln 0 = 0`` convention."""
    with np.errstate(divide="ignore", invalid="ignore"):
        logs = np.where(rates > 0, np.log(np.where(rates > 0, rates, 1.0)), 0.0)
    return rates * logs, rates * logs * logs, logs


def plugin_entropy_rows(counts: np.ndarray) -> np.ndarray:
    counts = np.atleast_2d(counts)
    rates = counts / counts.sum(axis=1, keepdims=True)
    plogp, _, _ = _xlogx_terms(rates)
    return np.maximum(-plogp.sum(axis=1), 0.0)


def plugin_lambda0_rows(counts: np.ndarray) -> np.ndarray:
    counts = np.atleast_2d(counts)
    rates = counts / counts.sum(axis=1, keepdims=True)
    plogp, _, logs = _xlogx_terms(rates)
    h = -plogp.sum(axis=1, keepdims=True)
    # centered form; empty bins carry zero weight
    dev = np.where(rates > 0, h + logs, 0.0)
    return (rates * dev * dev).sum(axis=1)


def roulston_lambda_rows(counts: np.ndarray) -> np.ndarray:
    counts = np.atleast_2d(counts)
    rates = counts / counts.sum(axis=1, keepdims=True)
    plogp, _, logs = _xlogx_terms(rates)
    h = -plogp.sum(axis=1, keepdims=True)
    dev = np.where(rates > 0, h + logs, 0.0)
    return (dev * dev * rates * (1.0 - rates)).sum(axis=1)


def plug_in_entropy(hist: CountHistogram) -> float:
    """Entropy of the observed rates, in nats."""
    rates = hist.rates
    nz = rates[rates > 0]
    h = -math.fsum(nz * np.log(nz))
    return min(max(h, 0.0), math.log(hist.m))


def miller_madow_entropy(hist: CountHistogram, m: int | None = None) -> float:
    """Plug-in entropy plus the ``(m - 1) / (2 n)`` bias correction.

    ``m`` is the declared support size and defaults to the histogram length.
    """
    if m is None:
        m = hist.m
    if m < hist.m_support:
        raise SupportTooSmall(
            f"declared support {m} is smaller than the {hist.m_support} bins observed"
        )
    return plug_in_entropy(hist) + (m - 1) / (2.0 * hist.n)


def plug_in_lambda0(hist: CountHistogram) -> float:
    """Variance parameter evaluated at the observed rates.

    Computed in the centered form, which cannot go negative; the result is
    clamped at zero all the same before any square root is taken downstream.
    """
    rates = hist.rates
    nz = rates[rates > 0]
    logs = np.log(nz)
    if np.all(logs == logs[0]):
        return 0.0
    h = -math.fsum(nz * logs)
    dev = h + logs
    return max(math.fsum(nz * dev * dev), 0.0)


def entropy_error_bar(hist: CountHistogram) -> float:
    """Standard error of the plug-in entropy, ``sqrt(lambda0_hat / n)``."""
    return math.sqrt(plug_in_lambda0(hist) / hist.n)


def roulston_lambda(hist: CountHistogram) -> float:
    """Error-propagation variance coefficient that treats counts as independent."""
    rates = hist.rates
    nz = rates[rates > 0]
    logs = np.log(nz)
    h = -math.fsum(nz * logs)
    dev = logs + h
    return max(math.fsum(dev * dev * nz * (1.0 - nz)), 0.0)


def antos_kontoyiannis_bound(n: int) -> float:
    """Distribution-free variance bound ``(ln n)**2 / n``."""
    if n < 2:
        raise DomainError(f"sample size must be at least 2, got {n}")
    return math.log(n) ** 2 / n


class ErrorBarBound(NamedTuple):
    exact: float
    asymptotic: float


def worst_case_error_bar(m: int, n: int) -> ErrorBarBound:
    """Largest entropy standard error any distribution on ``m`` bins can have.

    ``exact`` uses the true maximum of the variance parameter; ``asymptotic``
    is the large-``m`` form ``ln(m) / (2 sqrt(n))``.
    """
    if m < 2:
        raise DomainError(f"support size must be at least 2, got {m}")
    if n < 1:
        raise DomainError(f"sample size must be positive, got {n}")
    exact = math.sqrt(maxvar.lambda0_max(m) / n)
    return ErrorBarBound(exact, math.log(m) / (2.0 * math.sqrt(n)))


def predicted_lambda0_mean(dist: ProbabilityDistribution, n) -> float:
    """Expected plug-in variance estimate at sample size ``n``, to order ``1/n``."""
    if np.any(np.asarray(n) < 1):
        raise DomainError("sample size must be positive")
    return variance_parameter(dist) + gamma_parameter(dist) / np.asarray(n, dtype=float)


def predicted_lambda0_variance(dist: ProbabilityDistribution, n) -> float:
    if np.any(np.asarray(n) < 1):
        raise DomainError("sample size must be positive")
    return max(big_gamma_parameter(dist), 0.0) / np.asarray(n, dtype=float)


@dataclass(frozen=True)
class EntropyEstimate:
    h_plugin: float
    h_miller_madow: float
    lambda0_hat: float
    sigma_h: float
    n: int
    m_support: int
    m_declared: int
    # Miller-Madow fell back to the observed bin count
    support_from_observed: bool = False


def estimate(hist: CountHistogram, m: int | None = None, use_observed_support: bool = False) -> EntropyEstimate:
    """All histogram-side estimates at once.

    ``m`` is the declared support size (default: histogram length). With
    ``use_observed_support`` the Miller-Madow term uses the number of
    non-empty bins instead.
    """
    declared = hist.m if m is None else int(m)
    if declared < hist.m_support:
        raise SupportTooSmall(
            f"declared support {declared} is smaller than the {hist.m_support} bins observed"
        )
    mm_support = hist.m_support if use_observed_support else declared
    lam = plug_in_lambda0(hist)
    return EntropyEstimate(
        h_plugin=plug_in_entropy(hist),
        h_miller_madow=miller_madow_entropy(hist, mm_support),
        lambda0_hat=lam,
        sigma_h=math.sqrt(lam / hist.n),
        n=hist.n,
        m_support=hist.m_support,
        m_declared=declared,
        support_from_observed=use_observed_support,
    )

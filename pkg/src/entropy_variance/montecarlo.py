"""Seeded multinomial sampling and the estimator-scaling experiment harness.

Reproducibility contract: trial ``t`` at grid position ``g`` draws from a
Philox stream keyed by ``(seed, g, t)``. Results therefore do not depend on
how trials are scheduled across workers. Binomial variates are produced by
the samplers in this module from uniform doubles only, so they do not depend
on numpy's own binomial implementation either.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, fields
from typing import Sequence

import numpy as np

from .core import CountHistogram, ProbabilityDistribution
from .estimators import plugin_entropy_rows, plugin_lambda0_rows, roulston_lambda_rows
from .exceptions import DegenerateInput, DomainError, ResourceBudgetExceeded, ZeroProbability
from .population import population_stats

ESTIMATORS = ("plugin_lambda0", "plugin_entropy", "roulston")
DEFAULT_BUDGET = 10**10

# below this mean count, sequential inversion is cheaper than rejection
_INVERSION_CUTOFF = 10.0


def make_stream(seed: int, *key: int) -> np.random.Generator:
    """Independent Philox stream for ``seed`` and an integer key path."""
    ss = np.random.SeedSequence(int(seed), spawn_key=tuple(int(k) for k in key))
    return np.random.Generator(np.random.Philox(ss))


def _binomial_inversion(n: int, p: float, rng) -> int:
    q = 1.0 - p
    ratio = p / q
    while True:
        u = rng.random()
        prob = q**n
        x = 0
        while u > prob:
            u -= prob
            x += 1
            if x > n:
                break
            prob *= ratio * (n - x + 1) / x
        if x <= n:
            return x


def _binomial_btrs(n: int, p: float, rng) -> int:
    """Transformed rejection with squeeze (Hörmann 1993); needs n*p >= 10, p <= 1/2."""
    spq = math.sqrt(n * p * (1.0 - p))
    b = 1.15 + 2.53 * spq
    a = -0.0873 + 0.0248 * b + 0.01 * p
    c = n * p + 0.5
    alpha = (2.83 + 5.1 / b) * spq
    v_r = 0.92 - 4.2 / b
    lpq = math.log(p / (1.0 - p))
    mode = math.floor((n + 1) * p)
    h = math.lgamma(mode + 1) + math.lgamma(n - mode + 1)
    while True:
        u = rng.random() - 0.5
        v = rng.random()
        us = 0.5 - abs(u)
        k = math.floor((2.0 * a / us + b) * u + c)
        if k < 0 or k > n:
            continue
        if us >= 0.07 and v <= v_r:
            return k
        v = math.log(v * alpha / (a / (us * us) + b))
        if v <= h - math.lgamma(k + 1) - math.lgamma(n - k + 1) + (k - mode) * lpq:
            return k


def binomial(n: int, p: float, rng) -> int:
    """One Binomial(n, p) variate using only ``rng.random()``."""
    if n < 0 or not 0.0 <= p <= 1.0:
        raise DomainError(f"invalid binomial parameters n={n}, p={p}")
    if n == 0 or p == 0.0:
        return 0
    if p == 1.0:
        return n
    if p > 0.5:
        return n - binomial(n, 1.0 - p, rng)
    if n * p < _INVERSION_CUTOFF:
        return _binomial_inversion(n, p, rng)
    return _binomial_btrs(n, p, rng)


def _multinomial_counts(probs: np.ndarray, n: int, rng) -> np.ndarray:
    # conditional-binomial decomposition: O(M) draws regardless of n
    m = probs.size
    counts = np.zeros(m, dtype=np.int64)
    left = n
    mass = 1.0
    for i in range(m - 1):
        if left == 0:
            break
        p = probs[i] / mass if mass > 0 else 0.0
        x = binomial(left, min(max(p, 0.0), 1.0), rng)
        counts[i] = x
        left -= x
        mass -= probs[i]
    counts[m - 1] += left
    return counts


def sample_multinomial(dist: ProbabilityDistribution, n: int, stream) -> CountHistogram:
    """Draw visit counts for ``n`` independent steps from ``dist``."""
    if n < 1:
        raise DomainError(f"number of steps must be positive, got {n}")
    return CountHistogram(_multinomial_counts(dist.probs, int(n), stream))


@dataclass(frozen=True)
class ExperimentConfig:
    dist: ProbabilityDistribution
    n_values: Sequence[int]
    trials: int = 10_000
    seed: int = 0
    estimators: Sequence[str] = ESTIMATORS
    budget: int = DEFAULT_BUDGET
    workers: int = 1

    def __post_init__(self):
        n_values = tuple(int(n) for n in self.n_values)
        object.__setattr__(self, "n_values", n_values)
        object.__setattr__(self, "estimators", tuple(self.estimators))
        if self.trials < 2:
            raise DomainError(f"at least 2 trials are needed for a sample variance, got {self.trials}")
        if not n_values:
            raise DomainError("n_values is empty")
        if any(n < 1 for n in n_values):
            raise DomainError("every sample size must be positive")
        if any(b <= a for a, b in zip(n_values, n_values[1:])):
            raise DomainError("n_values must be strictly increasing")
        unknown = set(self.estimators) - set(ESTIMATORS)
        if unknown:
            raise DomainError(f"unknown estimators {sorted(unknown)}; choose from {ESTIMATORS}")


@dataclass(frozen=True)
class ExperimentRow:
    n: int
    mean_lambda0_hat: float
    var_lambda0_hat: float
    std_lambda0_hat: float
    se_mean_lambda0_hat: float
    se_var_lambda0_hat: float
    mean_h_hat: float
    var_h_hat: float
    se_mean_h_hat: float
    se_var_h_hat: float
    mean_roulston: float
    se_mean_roulston: float
    predicted_mean: float
    predicted_var: float
    predicted_var_h: float


@dataclass
class ExperimentResult:
    config: ExperimentConfig
    rows: list = field(default_factory=list)

    def column(self, name: str) -> np.ndarray:
        return np.array([getattr(r, name) for r in self.rows])

    @staticmethod
    def columns() -> list:
        return [f.name for f in fields(ExperimentRow)]


def _moments(x: np.ndarray):
    """Sample mean, variance (ddof=1) and their standard errors."""
    s = x.size
    mean = float(np.mean(x))
    var = float(np.var(x, ddof=1))
    se_mean = math.sqrt(var / s)
    m4 = float(np.mean((x - mean) ** 4))
    var_of_var = (m4 - var * var * (s - 3) / (s - 1)) / s
    return mean, var, se_mean, math.sqrt(max(var_of_var, 0.0))


def _draw_block(probs: np.ndarray, n: int, seed: int, g: int, start: int, stop: int) -> np.ndarray:
    out = np.empty((stop - start, probs.size), dtype=np.int64)
    for row, t in enumerate(range(start, stop)):
        out[row] = _multinomial_counts(probs, n, make_stream(seed, g, t))
    return out


def _draw_trials(config: ExperimentConfig, g: int, n: int, pool) -> np.ndarray:
    probs = config.dist.probs
    if pool is None:
        return _draw_block(probs, n, config.seed, g, 0, config.trials)
    step = math.ceil(config.trials / (4 * config.workers))
    bounds = [(a, min(a + step, config.trials)) for a in range(0, config.trials, step)]
    futures = [pool.submit(_draw_block, probs, n, config.seed, g, a, b) for a, b in bounds]
    # concatenation in trial order keeps the reduction deterministic
    return np.concatenate([f.result() for f in futures])


def run_experiment(config: ExperimentConfig, progress=None) -> ExperimentResult:
    """Sample ``config.trials`` histograms at every ``n`` and aggregate the estimators.

    ``progress``, if given, is called with each finished :class:`ExperimentRow`.
    """
    if not config.dist.strictly_positive:
        raise ZeroProbability("experiment predictions need a strictly positive distribution")
    events = config.trials * max(config.n_values)
    if events > config.budget:
        raise ResourceBudgetExceeded(
            f"trials x max(n) = {events:.3g} exceeds the budget of {config.budget:.3g}"
        )
    stats = population_stats(config.dist)
    result = ExperimentResult(config)
    nan = float("nan")
    pool = ProcessPoolExecutor(config.workers) if config.workers > 1 else None
    try:
        for g, n in enumerate(config.n_values):
            counts = _draw_trials(config, g, n, pool)
            lam = (nan,) * 4
            h = (nan,) * 4
            rou = (nan,) * 4
            if "plugin_lambda0" in config.estimators:
                lam = _moments(plugin_lambda0_rows(counts))
            if "plugin_entropy" in config.estimators:
                h = _moments(plugin_entropy_rows(counts))
            if "roulston" in config.estimators:
                rou = _moments(roulston_lambda_rows(counts))
            row = ExperimentRow(
                n=n,
                mean_lambda0_hat=lam[0],
                var_lambda0_hat=lam[1],
                std_lambda0_hat=math.sqrt(lam[1]) if lam[1] == lam[1] else nan,
                se_mean_lambda0_hat=lam[2],
                se_var_lambda0_hat=lam[3],
                mean_h_hat=h[0],
                var_h_hat=h[1],
                se_mean_h_hat=h[2],
                se_var_h_hat=h[3],
                mean_roulston=rou[0],
                se_mean_roulston=rou[2],
                predicted_mean=stats.lambda0 + stats.gamma / n,
                predicted_var=float(stats.predicted_var(n)),
                predicted_var_h=stats.lambda0 / n,
            )
            result.rows.append(row)
            if progress is not None:
                progress(row)
    finally:
        if pool is not None:
            pool.shutdown()
    return result


def fit_power_law(points) -> tuple[float, float]:
    """Least-squares line through ``(ln n, ln y)``; returns ``(slope, intercept)``."""
    pts = [(float(n), float(y)) for n, y in points]
    if len(pts) < 2:
        raise DegenerateInput("need at least two points")
    x = np.array([p[0] for p in pts])
    y = np.array([p[1] for p in pts])
    if np.any(x <= 0) or np.any(y <= 0):
        raise DegenerateInput("power-law fit needs positive n and y")
    if np.unique(x).size < 2:
        raise DegenerateInput("need at least two distinct n")
    lx, ly = np.log(x), np.log(y)
    slope, intercept = np.polyfit(lx, ly, 1)
    return float(slope), float(intercept)


def log_grid(start: float, stop: float, per_decade: int = 9) -> list[int]:
    """Integer sample sizes spaced evenly in ``log10`` from ``start`` to ``stop``."""
    if start < 1 or stop < start:
        raise DomainError(f"invalid grid bounds {start}..{stop}")
    if per_decade < 1:
        raise DomainError("per_decade must be positive")
    decades = math.log10(stop) - math.log10(start)
    count = max(int(round(decades * per_decade)), 0) + 1
    raw = np.logspace(math.log10(start), math.log10(stop), count)
    out = []
    for v in raw:
        k = int(round(v))
        if not out or k > out[-1]:
            out.append(k)
    return out

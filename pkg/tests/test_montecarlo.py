import math

import numpy as np
import pytest
from scipy import stats

from entropy_variance import (
    DegenerateInput,
    DomainError,
    ResourceBudgetExceeded,
    ZeroProbability,
    arithmetic,
    fit_power_law,
    make_distribution,
    make_stream,
    population_stats,
    sample_multinomial,
    uniform,
)
from entropy_variance.montecarlo import (
    ExperimentConfig,
    ExperimentResult,
    _draw_block,
    binomial,
    log_grid,
    run_experiment,
)


def test_degenerate_dist():
    d = make_distribution([1.0])
    for n in (1, 17, 10**6):
        assert sample_multinomial(d, n, make_stream(1)).counts.tolist() == [n]


def test_zero_bins_never_visited():
    d = make_distribution([0.5, 0.0, 0.5])
    h = sample_multinomial(d, 10**5, make_stream(2))
    assert h.counts[1] == 0 and h.n == 10**5


def test_uniform_two_large_n():
    h = sample_multinomial(uniform(2), 10**6, make_stream(7))
    assert h.n == 10**6
    assert abs(h.counts[0] - 5 * 10**5) < 5 * 500


def test_same_seed_same_histogram(arith5):
    a = sample_multinomial(arith5, 12345, make_stream(99, 3, 4))
    b = sample_multinomial(arith5, 12345, make_stream(99, 3, 4))
    c = sample_multinomial(arith5, 12345, make_stream(99, 3, 5))
    assert a == b
    assert a != c


def test_sample_multinomial_domain(arith5):
    with pytest.raises(DomainError):
        sample_multinomial(arith5, 0, make_stream(1))


@pytest.mark.parametrize("n,p", [(1, 0.3), (8, 0.5), (40, 0.1), (60, 0.35), (500, 0.02), (2000, 0.5), (10**6, 0.2)])
def test_binomial_matches_pmf(n, p):
    rng = make_stream(424242, n)
    x = np.array([binomial(n, p, rng) for _ in range(20_000)])
    assert x.min() >= 0 and x.max() <= n
    se = math.sqrt(n * p * (1 - p) / x.size)
    assert abs(x.mean() - n * p) < 5 * se
    k = np.arange(n + 1)
    expected = stats.binom.pmf(k, n, p) * x.size
    keep = expected > 5
    observed = np.bincount(x, minlength=n + 1)
    # pool the tails so every cell has a usable expectation
    obs = np.append(observed[keep], observed[~keep].sum())
    exp = np.append(expected[keep], expected[~keep].sum())
    if exp[-1] < 5:
        obs, exp = obs[:-1], exp[:-1]
    chi2 = ((obs - exp) ** 2 / exp).sum()
    if obs.size > 1:
        assert stats.chi2.sf(chi2, obs.size - 1) > 1e-4


def test_binomial_edges():
    rng = make_stream(1)
    assert binomial(0, 0.3, rng) == 0
    assert binomial(10, 0.0, rng) == 0
    assert binomial(10, 1.0, rng) == 10
    with pytest.raises(DomainError):
        binomial(5, 1.5, rng)


def test_multinomial_marginals(arith5):
    n = 1000
    counts = _draw_block(arith5.probs, n, 5, 0, 0, 10_000)
    assert np.all(counts.sum(axis=1) == n)
    s = arith5.probs
    se = np.sqrt(n * s * (1 - s) / counts.shape[0])
    assert np.all(np.abs(counts.mean(axis=0) - n * s) < 5 * se)
    # covariance of bins 0 and 4 is -n s0 s4
    cov = np.cov(counts[:, 0], counts[:, 4])[0, 1]
    assert cov == pytest.approx(-n * s[0] * s[4], rel=0.1)


def test_smoke_experiment():
    res = run_experiment(ExperimentConfig(uniform(2), [10], trials=2, seed=1))
    (row,) = res.rows
    assert row.n == 10
    for name in ExperimentResult.columns():
        assert math.isfinite(getattr(row, name))
    assert row.var_lambda0_hat >= 0 and row.var_h_hat >= 0


def test_experiment_determinism_and_workers(arith5):
    cfg = ExperimentConfig(arith5, [50, 500], trials=40, seed=11)
    a = run_experiment(cfg)
    b = run_experiment(cfg)
    c = run_experiment(ExperimentConfig(arith5, [50, 500], trials=40, seed=11, workers=2))
    assert a.rows == b.rows == c.rows
    d = run_experiment(ExperimentConfig(arith5, [50, 500], trials=40, seed=12))
    assert a.rows != d.rows


def test_experiment_fields(arith5):
    res = run_experiment(ExperimentConfig(arith5, [100, 1000], trials=200, seed=3))
    st = population_stats(arith5)
    for row in res.rows:
        assert row.se_mean_lambda0_hat == pytest.approx(math.sqrt(row.var_lambda0_hat / 200))
        assert row.se_mean_h_hat == pytest.approx(math.sqrt(row.var_h_hat / 200))
        assert row.std_lambda0_hat == pytest.approx(math.sqrt(row.var_lambda0_hat))
        assert row.predicted_mean == pytest.approx(st.lambda0 + st.gamma / row.n)
        assert row.predicted_var == pytest.approx(st.big_gamma / row.n)
        assert row.predicted_var_h == pytest.approx(st.lambda0 / row.n)
        assert row.se_var_lambda0_hat > 0
    assert res.column("n").tolist() == [100, 1000]


def test_estimator_subset(arith5):
    res = run_experiment(ExperimentConfig(arith5, [100], trials=10, estimators=["plugin_entropy"]))
    row = res.rows[0]
    assert math.isnan(row.mean_lambda0_hat) and math.isnan(row.mean_roulston)
    assert math.isfinite(row.mean_h_hat)


@pytest.mark.parametrize("kwargs", [
    dict(trials=1),
    dict(n_values=[]),
    dict(n_values=[10, 10]),
    dict(n_values=[100, 10]),
    dict(n_values=[0, 10]),
    dict(estimators=["jackknife"]),
])
def test_config_validation(arith5, kwargs):
    base = dict(dist=arith5, n_values=[10, 100], trials=10)
    base.update(kwargs)
    with pytest.raises(DomainError):
        ExperimentConfig(**base)


def test_zero_probability_rejected():
    cfg = ExperimentConfig(make_distribution([0.5, 0.5, 0.0]), [10], trials=2)
    with pytest.raises(ZeroProbability):
        run_experiment(cfg)


def test_budget_guard(arith5):
    cfg = ExperimentConfig(arith5, [10**6], trials=100, budget=10**7)
    with pytest.raises(ResourceBudgetExceeded):
        run_experiment(cfg)


def test_fit_power_law():
    slope, _ = fit_power_law([(10, 1), (100, 0.1), (1000, 0.01)])
    assert slope == pytest.approx(-1, abs=1e-12)
    slope, intercept = fit_power_law([(10, 1), (100, 0.01)])
    assert slope == pytest.approx(-2, abs=1e-12)
    assert intercept == pytest.approx(2 * math.log(10))
    for bad in ([(10, 1)], [(10, 1), (10, 2)], [(10, 1), (100, 0)], []):
        with pytest.raises(DegenerateInput):
            fit_power_law(bad)


def test_log_grid():
    g = log_grid(100, 10**6, 9)
    assert g[0] == 100 and g[-1] == 10**6
    assert len(g) == 37
    assert all(a < b for a, b in zip(g, g[1:]))
    assert log_grid(1000, 100000, 1) == [1000, 10000, 100000]
    assert log_grid(1, 3, 9) == [1, 2, 3]
    with pytest.raises(DomainError):
        log_grid(0, 10)


# -- scaling laws -------------------------------------------------------------


@pytest.fixture(scope="module")
def arith_run():
    return run_experiment(ExperimentConfig(arithmetic(5), [1000, 10_000, 100_000], trials=10_000, seed=2024))


@pytest.mark.slow
def test_bias_law_flat(arith_run):
    st = population_stats(arithmetic(5))
    scaled = [((r.mean_lambda0_hat - st.lambda0) * r.n, r.se_mean_lambda0_hat * r.n) for r in arith_run.rows]
    for (a, sa), (b, sb) in zip(scaled, scaled[1:]):
        assert abs(a - b) < 3 * math.hypot(sa, sb)


@pytest.mark.slow
def test_bias_coefficient_at_1e4():
    # (mean - lambda0) * n has standard error sqrt(big_gamma * n / S); S = 6.4e5
    # puts it near 2% of gamma so the 10% window is a 3-sigma test
    arith = arithmetic(5)
    st = population_stats(arith)
    res = run_experiment(ExperimentConfig(arith, [10_000], trials=640_000, seed=77,
                                          estimators=["plugin_lambda0"]))
    row = res.rows[0]
    coeff = (row.mean_lambda0_hat - st.lambda0) * row.n
    assert coeff == pytest.approx(st.gamma, rel=0.10)


@pytest.mark.slow
def test_variance_laws(arith_run):
    st = population_stats(arithmetic(5))
    for r in arith_run.rows:
        if r.n >= 10_000:
            assert r.var_lambda0_hat * r.n == pytest.approx(st.big_gamma, rel=0.10)
            assert r.var_h_hat * r.n == pytest.approx(st.lambda0, rel=0.10)


@pytest.mark.slow
def test_roulston_differs_in_mean(arith_run):
    for r in arith_run.rows:
        assert abs(r.mean_roulston - r.mean_lambda0_hat) > 10 * (r.se_mean_roulston + r.se_mean_lambda0_hat)


@pytest.mark.slow
def test_zero_big_gamma_variance_falls_faster(maxvar5):
    grid = log_grid(1000, 100_000, 2)
    res = run_experiment(ExperimentConfig(maxvar5, grid, trials=10_000, seed=5))
    slope, _ = fit_power_law([(r.n, r.var_lambda0_hat) for r in res.rows])
    assert slope == pytest.approx(-2, abs=0.15)

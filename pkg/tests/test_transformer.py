import math

import numpy as np
import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError
from sklearn.pipeline import make_pipeline
from sklearn.preprocessing import StandardScaler

from entropy_variance import (
    AllZero,
    NegativeEntry,
    ParseError,
    PluginEntropyEstimator,
    SupportTooSmall,
    entropy_error_bar,
    make_histogram,
    miller_madow_entropy,
    plug_in_entropy,
    plug_in_lambda0,
    roulston_lambda,
)
from entropy_variance.transformer import check_counts

X = np.array([[1, 2, 3, 4, 5], [5, 5, 0, 0, 0], [10, 0, 0, 0, 0], [3, 1, 4, 1, 5]])


def test_get_params_and_clone():
    est = PluginEntropyEstimator(support_size=7, features=("h_plugin",))
    assert est.get_params() == {"support_size": 7, "use_observed_support": False, "features": ("h_plugin",)}
    twin = clone(est)
    assert twin is not est and twin.get_params() == est.get_params()
    est.set_params(support_size=9)
    assert est.support_size == 9


def test_fit_pools_rows():
    est = PluginEntropyEstimator().fit(X)
    pooled = make_histogram(X.sum(axis=0))
    assert est.n_features_in_ == 5 and est.support_size_ == 5
    assert est.estimate_.h_plugin == pytest.approx(plug_in_entropy(pooled))
    assert est.estimate_.n == X.sum()
    assert est.lambda0_max_ == pytest.approx(1.2464472142872691)
    assert est.worst_case_sigma_ == pytest.approx(math.sqrt(est.lambda0_max_ / X.sum()))


def test_transform_matches_scalar_functions():
    est = PluginEntropyEstimator(features=("h_plugin", "h_miller_madow", "lambda0_hat", "sigma_h", "roulston"))
    out = est.fit_transform(X)
    assert out.shape == (4, 5)
    for row, counts in zip(out, X):
        h = make_histogram(counts)
        np.testing.assert_allclose(row, [
            plug_in_entropy(h),
            miller_madow_entropy(h, 5),
            plug_in_lambda0(h),
            entropy_error_bar(h),
            roulston_lambda(h),
        ], rtol=1e-10, atol=1e-14)
    assert list(est.get_feature_names_out()) == list(est.features)


def test_observed_support_mode():
    out = PluginEntropyEstimator(use_observed_support=True, features=("h_miller_madow",)).fit_transform(X)
    assert out[1, 0] == pytest.approx(math.log(2) + 1 / 20)
    assert out[2, 0] == 0.0


def test_float_integral_counts_accepted():
    a = PluginEntropyEstimator().fit_transform(X.astype(float))
    b = PluginEntropyEstimator().fit_transform(X)
    np.testing.assert_array_equal(a, b)


def test_pipeline():
    pipe = make_pipeline(PluginEntropyEstimator(), StandardScaler())
    out = pipe.fit_transform(X)
    assert out.shape == (4, 4)
    np.testing.assert_allclose(out.mean(axis=0), 0, atol=1e-12)


@pytest.mark.parametrize("bad,exc", [
    ([[1, -1, 2]], NegativeEntry),
    ([[0, 0, 0]], AllZero),
    ([[1.5, 2.0]], ParseError),
    ([["a", "b"]], ParseError),
    (np.zeros((2, 2, 2), dtype=int), ValueError),
])
def test_check_counts_rejects(bad, exc):
    with pytest.raises(exc):
        check_counts(bad)


def test_check_counts_promotes_1d():
    assert check_counts([1, 2, 3]).shape == (1, 3)


def test_errors():
    with pytest.raises(NotFittedError):
        PluginEntropyEstimator().transform(X)
    with pytest.raises(SupportTooSmall):
        PluginEntropyEstimator(support_size=2).fit(X)
    with pytest.raises(ValueError):
        PluginEntropyEstimator(features=("nope",)).fit(X)
    est = PluginEntropyEstimator().fit(X)
    with pytest.raises(ValueError):
        est.transform(X[:, :3])


def test_single_bin():
    est = PluginEntropyEstimator().fit([[4], [2]])
    assert est.worst_case_sigma_ == 0.0
    assert est.transform([[3]]).tolist() == [[0.0, 0.0, 0.0, 0.0]]

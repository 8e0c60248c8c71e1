"""scikit-learn compatible wrapper around the histogram estimators.

Rows of ``X`` are count histograms over the same set of bins. ``fit`` pools
the rows into one histogram and stores its estimates; ``transform`` returns
per-row estimates, so the estimator drops into a ``Pipeline`` as a feature
extractor.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from . import estimators, maxvar
from .core import make_histogram
from .exceptions import AllZero, NegativeEntry, ParseError, SupportTooSmall

FEATURES = ("h_plugin", "h_miller_madow", "lambda0_hat", "sigma_h", "roulston")


def check_counts(X) -> np.ndarray:
    """Validate a 2-D array of non-negative integer counts, one histogram per row."""
    X = np.asarray(X)
    if X.ndim == 1:
        X = X.reshape(1, -1)
    if X.ndim != 2:
        raise ValueError(f"expected a 2-D array of counts, got shape {X.shape}")
    if X.shape[1] == 0:
        raise AllZero("histograms have no bins")
    if X.dtype.kind == "f":
        if not np.all(np.isfinite(X)) or np.any(X != np.floor(X)):
            raise ParseError("counts must be integers")
    elif X.dtype.kind not in "iub":
        raise ParseError(f"counts must be integers, got dtype {X.dtype}")
    X = X.astype(np.int64)
    if np.any(X < 0):
        raise NegativeEntry("counts must be non-negative")
    empty = np.flatnonzero(X.sum(axis=1) == 0)
    if empty.size:
        raise AllZero(f"rows {empty.tolist()} have no observations")
    return X


class PluginEntropyEstimator(TransformerMixin, BaseEstimator):
    """Plug-in entropy with a variance-parameter error bar.

    Parameters
    ----------
    support_size : int or None
        Declared number of states. ``None`` uses the number of columns.
    use_observed_support : bool
        Use each histogram's count of non-empty bins in the Miller-Madow term
        instead of ``support_size``.
    features : tuple of str
        Columns returned by ``transform``, any of ``h_plugin``,
        ``h_miller_madow``, ``lambda0_hat``, ``sigma_h``, ``roulston``.

    Attributes
    ----------
    n_features_in_ : int
    support_size_ : int
    estimate_ : EntropyEstimate
        Estimates for the histogram pooled over all rows seen in ``fit``.
    worst_case_sigma_ : float
        Largest possible entropy standard error for ``support_size_`` bins at
        the pooled sample size.
    """

    def __init__(self, support_size=None, use_observed_support=False,
                 features=("h_plugin", "h_miller_madow", "lambda0_hat", "sigma_h")):
        self.support_size = support_size
        self.use_observed_support = use_observed_support
        self.features = features

    def _check_features(self):
        unknown = [f for f in self.features if f not in FEATURES]
        if unknown:
            raise ValueError(f"unknown features {unknown}; choose from {FEATURES}")

    def fit(self, X, y=None):
        self._check_features()
        X = check_counts(X)
        self.n_features_in_ = X.shape[1]
        m = X.shape[1] if self.support_size is None else int(self.support_size)
        observed = int(np.count_nonzero(X.sum(axis=0)))
        if m < observed:
            raise SupportTooSmall(f"support_size {m} is smaller than the {observed} bins observed")
        self.support_size_ = m
        pooled = make_histogram(X.sum(axis=0))
        self.estimate_ = estimators.estimate(pooled, m, self.use_observed_support)
        if m >= 2:
            self.worst_case_sigma_ = estimators.worst_case_error_bar(m, pooled.n).exact
            self.lambda0_max_ = maxvar.lambda0_max(m)
        else:
            self.worst_case_sigma_ = 0.0
            self.lambda0_max_ = 0.0
        return self

    def transform(self, X):
        check_is_fitted(self, "estimate_")
        X = check_counts(X)
        if X.shape[1] != self.n_features_in_:
            raise ValueError(
                f"X has {X.shape[1]} bins, but the estimator was fitted with {self.n_features_in_}"
            )
        n = X.sum(axis=1).astype(float)
        cols = {}
        need = set(self.features)
        if need & {"h_plugin", "h_miller_madow"}:
            h = estimators.plugin_entropy_rows(X)
            cols["h_plugin"] = h
            if self.use_observed_support:
                m = np.count_nonzero(X, axis=1)
            else:
                m = self.support_size_
                observed = np.count_nonzero(X, axis=1)
                if np.any(observed > m):
                    raise SupportTooSmall(f"a row has more than {m} non-empty bins")
            cols["h_miller_madow"] = h + (m - 1) / (2.0 * n)
        if need & {"lambda0_hat", "sigma_h"}:
            lam = estimators.plugin_lambda0_rows(X)
            cols["lambda0_hat"] = lam
            cols["sigma_h"] = np.sqrt(lam / n)
        if "roulston" in need:
            cols["roulston"] = estimators.roulston_lambda_rows(X)
        return np.column_stack([cols[f] for f in self.features])

    def get_feature_names_out(self, input_features=None):
        check_is_fitted(self, "estimate_")
        return np.asarray(self.features, dtype=object)

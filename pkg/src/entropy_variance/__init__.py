"""Plug-in Shannon entropy estimation with variance-parameter error bars."""

from .core import (
    CountHistogram,
    ProbabilityDistribution,
    arithmetic,
    load_distribution,
    load_histogram,
    make_distribution,
    make_histogram,
    restrict_to_support,
    save_distribution,
    save_histogram,
    uniform,
)
from .estimators import (
    EntropyEstimate,
    ErrorBarBound,
    antos_kontoyiannis_bound,
    entropy_error_bar,
    estimate,
    miller_madow_entropy,
    plug_in_entropy,
    plug_in_lambda0,
    predicted_lambda0_mean,
    predicted_lambda0_variance,
    roulston_lambda,
    worst_case_error_bar,
)
from .exceptions import (
    AllZero,
    DegenerateInput,
    DomainError,
    EntropyVarianceError,
    IndexOutOfRange,
    NegativeEntry,
    ParseError,
    ResourceBudgetExceeded,
    SumNotOne,
    SupportTooSmall,
    ZeroProbability,
)
from .maxvar import (
    MaxVarSolution,
    approx_root,
    build_stationary_distribution,
    f_of_v,
    hessian_at_max,
    lambda0_max,
    lambda0_max_asymptotic,
    max_variance,
    solve_stationary,
)
from .montecarlo import (
    ExperimentConfig,
    ExperimentResult,
    fit_power_law,
    make_stream,
    run_experiment,
    sample_multinomial,
)
from .population import (
    PopulationStats,
    big_gamma_parameter,
    big_gamma_via_covariance,
    covariance_matrix,
    gamma_parameter,
    log_moment,
    population_stats,
    shannon_entropy,
    variance_parameter,
)
from .transformer import PluginEntropyEstimator

__version__ = "0.1.0"

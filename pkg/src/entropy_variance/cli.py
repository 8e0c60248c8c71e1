"""Command-line interface.

Exit codes: 0 success, 2 input/validation error, 3 resource budget exceeded.
Data goes to stdout (or ``--output``); diagnostics go to stderr.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import os
import sys
from contextlib import contextmanager

import numpy as np

from . import estimators, maxvar, montecarlo, population
from .core import arithmetic, load_distribution, load_histogram
from .exceptions import EntropyVarianceError, ResourceBudgetExceeded, ZeroProbability

DEFAULT_SEED = 12345
SEED_ENV = "ENTROPY_SEED"

SIMULATE_COLUMNS = [
    ("n", "n"),
    ("mean_lh", "mean_lambda0_hat"),
    ("se_mean_lh", "se_mean_lambda0_hat"),
    ("var_lh", "var_lambda0_hat"),
    ("se_var_lh", "se_var_lambda0_hat"),
    ("pred_mean", "predicted_mean"),
    ("pred_var", "predicted_var"),
    ("mean_h", "mean_h_hat"),
    ("var_h", "var_h_hat"),
    ("pred_var_h", "predicted_var_h"),
    ("mean_roulston", "mean_roulston"),
]

MAXVAR_COLUMNS = ["m", "k", "v_pos", "v_neg", "p0", "q0", "lambda0_max", "approx_v", "lambda0_asymptotic"]


class CliError(Exception):
    def __init__(self, message, code=2):
        super().__init__(message)
        self.code = code


def fmt(value) -> str:
    """CSV cell: integers verbatim, reals with 17 significant digits."""
    if isinstance(value, (bool, np.bool_)):
        return str(bool(value)).lower()
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if value is None:
        return ""
    return format(float(value), ".17g")


@contextmanager
def _sink(path):
    if path is None or path == "-":
        yield sys.stdout
    else:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            yield fh


def _emit_table(header, rows, out, form):
    if form == "json":
        json.dump([dict(zip(header, r)) for r in rows], out, indent=2, default=float)
        out.write("\n")
        return
    if form == "csv":
        writer = csv.writer(out, lineterminator="\n")
        writer.writerow(header)
        for r in rows:
            writer.writerow([fmt(v) for v in r])
        return
    cells = [[_short(v) for v in r] for r in rows]
    widths = [max(len(h), *(len(c[i]) for c in cells)) if cells else len(h) for i, h in enumerate(header)]
    out.write("  ".join(h.rjust(w) for h, w in zip(header, widths)) + "\n")
    for c in cells:
        out.write("  ".join(v.rjust(w) for v, w in zip(c, widths)) + "\n")


def _emit_record(record: dict, out, form):
    if form == "json":
        json.dump(record, out, indent=2, default=float)
        out.write("\n")
    elif form == "csv":
        writer = csv.writer(out, lineterminator="\n")
        writer.writerow(["quantity", "value"])
        for k, v in record.items():
            writer.writerow([k, fmt(v)])
    else:
        width = max(len(k) for k in record)
        for k, v in record.items():
            out.write(f"{k.ljust(width)}  {_short(v)}\n")


def _short(v) -> str:
    if isinstance(v, (int, np.integer)) and not isinstance(v, bool):
        return str(int(v))
    if v is None:
        return "n/a"
    if isinstance(v, float) and math.isnan(v):
        return "nan"
    return f"{float(v):.6g}"


# -- subcommands ------------------------------------------------------------


def cmd_analyze(args, out):
    hist = load_histogram(args.histogram)
    m = args.support if args.support is not None else hist.m
    est = estimators.estimate(hist, m, use_observed_support=args.observed_support)
    record = {
        "n": est.n,
        "m_declared": est.m_declared,
        "m_observed": est.m_support,
        "h_plugin": est.h_plugin,
        "h_miller_madow": est.h_miller_madow,
        "lambda0_hat": est.lambda0_hat,
        "sigma_h": est.sigma_h,
        "roulston_lambda": estimators.roulston_lambda(hist),
    }
    if m >= 2:
        bound = estimators.worst_case_error_bar(m, hist.n)
        record["lambda0_max"] = maxvar.lambda0_max(m)
        record["sigma_h_worst_case"] = bound.exact
        record["sigma_h_worst_case_asymptotic"] = bound.asymptotic
    else:
        record["lambda0_max"] = 0.0
        record["sigma_h_worst_case"] = 0.0
        record["sigma_h_worst_case_asymptotic"] = 0.0
    if hist.n >= 2:
        record["antos_kontoyiannis_var"] = estimators.antos_kontoyiannis_bound(hist.n)
        record["antos_kontoyiannis_sigma"] = math.sqrt(record["antos_kontoyiannis_var"])
    else:
        record["antos_kontoyiannis_var"] = None
        record["antos_kontoyiannis_sigma"] = None
    _emit_record(record, out, args.format)


def cmd_population(args, out):
    dist = load_distribution(args.distribution, normalize=args.normalize)
    try:
        stats = population.population_stats(dist)
    except ZeroProbability as exc:
        raise CliError(f"{exc}. Remove zero entries first (restrict to the support).") from None
    record = {
        "m": dist.m,
        "h": stats.h,
        "lambda0": stats.lambda0,
        "mu3": stats.mu3,
        "mu4": stats.mu4,
        "gamma": stats.gamma,
        "big_gamma": stats.big_gamma,
    }
    ns = _parse_grid(args.n, args.per_decade) if args.n else []
    if args.format == "json":
        record["predictions"] = [
            {"n": n, "pred_mean": float(stats.predicted_mean(n)), "pred_var": float(stats.predicted_var(n))}
            for n in ns
        ]
        _emit_record(record, out, "json")
        return
    _emit_record(record, out, args.format)
    if ns:
        out.write("\n")
        rows = [(n, float(stats.predicted_mean(n)), float(stats.predicted_var(n))) for n in ns]
        _emit_table(["n", "pred_mean", "pred_var"], rows, out, args.format)


def _maxvar_row(m, k):
    sol = maxvar.solve_stationary(m, k)
    return (
        m, k, sol.v_pos, sol.v_neg, sol.p0, sol.q0, sol.lambda0,
        maxvar.approx_root(m), maxvar.lambda0_max_asymptotic(m),
    )


def cmd_maxvar(args, out):
    if args.m is not None:
        ms = [args.m]
    else:
        a, b = args.m_range
        if a > b:
            raise CliError(f"empty range {a}..{b}")
        ms = list(range(a, b + 1))
    if ms[0] < 2:
        raise CliError(f"support size must be at least 2, got {ms[0]}")
    rows = []
    for m in ms:
        if args.k is None:
            rows.append(_maxvar_row(m, 1))
        elif args.k == 0:
            rows.extend(_maxvar_row(m, k) for k in range(1, m))
        else:
            rows.append(_maxvar_row(m, args.k))
    _emit_table(MAXVAR_COLUMNS, rows, out, args.format)


def _resolve_seed(flag):
    if flag is not None:
        return flag
    env = os.environ.get(SEED_ENV)
    if env:
        try:
            return int(env, 0)
        except ValueError:
            raise CliError(f"{SEED_ENV}={env!r} is not an integer") from None
    return DEFAULT_SEED


def _parse_grid(spec: str, per_decade: int) -> list[int]:
    spec = spec.strip()
    try:
        if ":" in spec:
            lo, hi = spec.split(":", 1)
            return montecarlo.log_grid(float(lo), float(hi), per_decade)
        values = [int(float(tok)) for tok in spec.split(",") if tok.strip()]
    except ValueError:
        raise CliError(f"cannot parse n-grid {spec!r}; use START:STOP or a comma list") from None
    return values


def _simulation_dist(args):
    if args.dist is not None:
        return load_distribution(args.dist, normalize=args.normalize)
    if args.m < 2:
        raise CliError("--m must be at least 2")
    if args.preset == "arithmetic":
        return arithmetic(args.m)
    return maxvar.build_stationary_distribution(maxvar.max_variance(args.m))


def cmd_simulate(args, out):
    dist = _simulation_dist(args)
    ns = _parse_grid(args.n_grid, args.per_decade)
    config = montecarlo.ExperimentConfig(
        dist=dist,
        n_values=ns,
        trials=args.trials,
        seed=_resolve_seed(args.seed),
        budget=int(args.budget),
        workers=args.workers,
    )
    writer = csv.writer(out, lineterminator="\n")
    # validate the budget before any output is written
    events = config.trials * max(config.n_values)
    if events > config.budget:
        raise ResourceBudgetExceeded(
            f"trials x max(n) = {events:.3g} exceeds the budget of {config.budget:.3g} (raise --budget)"
        )
    writer.writerow([c for c, _ in SIMULATE_COLUMNS])

    def on_row(row):
        writer.writerow([fmt(getattr(row, attr)) for _, attr in SIMULATE_COLUMNS])
        out.flush()

    montecarlo.run_experiment(config, progress=on_row)


def cmd_simplex_grid(args, out):
    if args.m != 3:
        raise CliError(f"simplex grids are only exported for m = 3, got {args.m}")
    r = args.resolution
    if r < 2:
        raise CliError(f"resolution must be at least 2, got {r}")
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(["s0", "s1", "s2", "lambda0", "entropy"])
    for rows in simplex_grid(r):
        writer.writerow([fmt(v) for v in rows])


def simplex_grid(resolution: int):
    """Barycentric grid on the 3-simplex with variance parameter and entropy."""
    from .core import ProbabilityDistribution

    r = resolution
    for i in range(r + 1):
        for j in range(r + 1 - i):
            k = r - i - j
            s = np.array([i, j, k], dtype=float) / r
            dist = ProbabilityDistribution(s)
            yield (s[0], s[1], s[2], population.variance_parameter(dist), population.shannon_entropy(dist))


# -- entry point ------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="entropy-variance",
        description="Plug-in entropy estimates with variance-parameter error bars.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, formats=("text", "csv", "json")):
        p.add_argument("-o", "--output", help="write data here instead of stdout")
        if formats:
            p.add_argument("--format", choices=formats, default=formats[0])

    p = sub.add_parser("analyze", help="estimate entropy and its uncertainty from a count histogram")
    p.add_argument("histogram", help="counts file: one per line, single-column CSV, or JSON array")
    p.add_argument("--support", type=int, help="declared support size M (default: number of bins)")
    p.add_argument("--observed-support", action="store_true",
                   help="use the number of non-empty bins in the Miller-Madow correction")
    common(p)
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("population", help="exact functionals of a known distribution")
    p.add_argument("distribution")
    p.add_argument("--normalize", action="store_true", help="divide entries by their sum")
    p.add_argument("--n", help="sample sizes for the prediction curves (START:STOP or comma list)")
    p.add_argument("--per-decade", type=int, default=9)
    common(p)
    p.set_defaults(func=cmd_population)

    p = sub.add_parser("maxvar", help="maximum variance parameter and stationary roots")
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--m", type=int)
    g.add_argument("--m-range", type=int, nargs=2, metavar=("A", "B"))
    p.add_argument("--k", type=int, help="outlier count (default 1; 0 lists every k)")
    common(p, formats=("csv", "text", "json"))
    p.set_defaults(func=cmd_maxvar)

    p = sub.add_parser("simulate", help="Monte Carlo scaling of the plug-in estimators (CSV)")
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--dist", help="distribution file")
    g.add_argument("--preset", choices=("arithmetic", "maxvar"))
    p.add_argument("--m", type=int, default=5, help="support size for presets (default 5)")
    p.add_argument("--normalize", action="store_true")
    p.add_argument("--n-grid", default="1e2:1e6", help="START:STOP (log grid) or comma list")
    p.add_argument("--per-decade", type=int, default=9)
    p.add_argument("--trials", type=int, default=10_000)
    p.add_argument("--seed", type=lambda s: int(s, 0), help=f"default: ${SEED_ENV} or {DEFAULT_SEED}")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--budget", type=float, default=montecarlo.DEFAULT_BUDGET,
                   help="maximum trials x max(n)")
    common(p, formats=())
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("simplex-grid", help="variance parameter over a grid on the 3-simplex (CSV)")
    p.add_argument("--m", type=int, default=3)
    p.add_argument("--resolution", type=int, default=200)
    common(p, formats=())
    p.set_defaults(func=cmd_simplex_grid)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        with _sink(args.output) as out:
            args.func(args, out)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code
    except ResourceBudgetExceeded as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except EntropyVarianceError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())

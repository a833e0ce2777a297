"""Command-line driver.

Subcommands: ``fit`` (single pipeline run, prints diagnostics), ``sweep``
(order sweep to CSV), ``heatmap`` (pointwise-error grid CSV), ``budget``
(stability sample budgets).  Flags mirror the config-file keys; ``--config``
loads a file and flags override it.  Exit codes: 0 success, 2 configuration
error, 3 pipeline failure on a fit/heatmap run.
"""
import argparse
import logging
import sys

from .bench import (
    base_stream,
    builtin_function,
    emit_heatmap,
    make_domain,
    resolve_eta,
    run_pipeline_once,
    run_sweep,
    sample_counts,
)
from .config import ConfigError, build_config, read_config_file
from .estimator import ParameterOutOfRange, sample_budgets
from .index_sets import hyperbolic_cross_set, total_degree_set

# flag destination -> (section, key) in the config schema
_FLAG_KEYS = {
    "index_set": ("index_sets", "index_set"),
    "order": ("index_sets", "order"),
    "orders": ("index_sets", "orders"),
    "dimension": ("index_sets", "dimension"),
    "domain": ("domains", "domain"),
    "mandelbrot_max_iter": ("domains", "mandelbrot.max_iter"),
    "seed": ("domains", "seed"),
    "stream": ("domains", "stream"),
    "algorithm": ("surrogate", "algorithm"),
    "epsilon_threshold": ("surrogate", "epsilon_threshold"),
    "theta": ("surrogate", "theta"),
    "c": ("sampling", "c"),
    "replacement": ("sampling", "replacement"),
    "eta": ("estimator", "eta"),
    "alpha": ("estimator", "alpha"),
    "delta": ("estimator", "delta"),
    "delta_tilde": ("estimator", "delta_tilde"),
    "function": ("bench", "function"),
    "repetitions": ("bench", "repetitions"),
    "m_cv": ("bench", "m_cv"),
    "grid_resolution": ("bench", "grid_resolution"),
    "output": ("bench", "output"),
}


def _add_config_flags(parser):
    parser.add_argument("--config", metavar="PATH", help="configuration file")
    for dest in _FLAG_KEYS:
        flag = "--" + dest.replace("_", "-")
        parser.add_argument(flag, dest=dest, metavar="VALUE")


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="domlsq",
        description="Weighted least-squares approximation on irregular domains",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, desc in (
        ("fit", "run the pipeline once and print diagnostics"),
        ("sweep", "sweep polynomial orders and emit a CSV table"),
        ("heatmap", "run the pipeline once and emit a pointwise-error grid CSV"),
    ):
        p = sub.add_parser(name, help=desc)
        _add_config_flags(p)
    b = sub.add_parser("budget", help="print stability sample budgets")
    b.add_argument("--config", metavar="PATH", help="configuration file")
    for dest in ("index_set", "order", "dimension", "alpha", "delta", "delta_tilde"):
        b.add_argument("--" + dest.replace("_", "-"), dest=dest, metavar="VALUE")
    b.add_argument("--n", dest="n", metavar="VALUE", help="space dimension (overrides order)")
    b.add_argument("--epsilon", dest="epsilon", metavar="VALUE", default="0")
    b.add_argument("--christoffel-sup", dest="christoffel_sup", metavar="VALUE",
                   help="sup of the basis concentration (default n^2)")
    return parser


def _config_from_args(args):
    file_values = read_config_file(args.config) if args.config else None
    overrides = {}
    for dest, key in _FLAG_KEYS.items():
        value = getattr(args, dest, None)
        if value is not None:
            overrides[key] = value
    return build_config(file_values, overrides)


def _print_fit(record, fit, config, n):
    m_tilde, m = sample_counts(n, config.theta, config.c)
    print(f"domain          : {config.domain}")
    print(f"function        : {config.function}")
    print(f"space           : {config.family} order {config.order}, n = {n}")
    print(f"anchors m_tilde : {m_tilde}")
    print(f"draws m         : {m}")
    print(f"algorithm       : {config.algorithm}")
    print(f"status          : {record.status}")
    print(f"epsilon         : {record.epsilon:.6e}")
    print(f"gamma           : {record.gamma:.12g}")
    if fit is not None:
        print(f"kappa           : {fit.kappa:.6g}")
        print(f"gram deviation  : {fit.gram_deviation:.6e}")
        print(f"eta             : {fit.eta}")
        print(f"degenerate      : {fit.degenerate}")
    print(f"cv error        : {record.cv_error:.6e}")


def main(argv=None):
    logging.basicConfig(level=logging.INFO, format="%(levelname)s %(name)s: %(message)s")
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "budget":
            return _cmd_budget(args)
        config = _config_from_args(args)
        if args.command == "fit":
            return _cmd_fit(config)
        if args.command == "sweep":
            return _cmd_sweep(config)
        return _cmd_heatmap(config)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2


def _cmd_fit(config):
    stream = base_stream(config).split(config.order, 0)
    record, fit = run_pipeline_once(config, config.order, stream)
    from .bench import make_index_set

    _print_fit(record, fit, config, make_index_set(config, config.order).size)
    return 0 if record.status == "ok" else 3


def _cmd_sweep(config):
    records = run_sweep(config)
    for r in records:
        print(
            f"k={r.order} n={r.n} m={r.m} m_tilde={r.m_tilde} "
            f"mean_cv_error={r.mean_cv_error!r} max_kappa={r.max_kappa!r} "
            f"failures={r.failures}"
        )
    if config.output:
        print(f"wrote {config.output}")
    return 0


def _cmd_heatmap(config):
    stream = base_stream(config).split(config.order, 0)
    record, fit = run_pipeline_once(config, config.order, stream)
    if fit is None:
        print(f"pipeline failed: {record.status}", file=sys.stderr)
        return 3
    domain = make_domain(config)
    u, default_eta = builtin_function(config.function)
    path = config.output or "heatmap.csv"
    emit_heatmap(u, fit, domain, config.grid_resolution, path)
    print(f"wrote {path}")
    return 0


def _cmd_budget(args):
    overrides = {}
    for dest in ("index_set", "order", "dimension", "alpha", "delta", "delta_tilde"):
        value = getattr(args, dest, None)
        if value is not None:
            key = _FLAG_KEYS[dest]
            overrides[key] = value
    file_values = read_config_file(args.config) if args.config else None
    config = build_config(file_values, overrides)
    if args.n is not None:
        n = int(args.n)
    else:
        family = total_degree_set if config.family == "total_degree" else hyperbolic_cross_set
        n = family(config.dimension, config.order).size
    epsilon = float(args.epsilon)
    sup = float(args.christoffel_sup) if args.christoffel_sup is not None else float(n * n)
    try:
        budget = sample_budgets(n, config.alpha, config.delta, config.delta_tilde,
                                epsilon, sup)
    except ParameterOutOfRange as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2
    print(f"n                 : {budget.n}")
    print(f"alpha             : {budget.alpha}")
    print(f"delta             : {budget.delta}")
    print(f"delta_tilde       : {budget.delta_tilde}")
    print(f"epsilon           : {budget.epsilon}")
    print(f"rate              : {budget.rate:.6f}")
    print(f"christoffel sup   : {budget.christoffel_sup}")
    print(f"draw budget m     : {budget.draw_budget}")
    print(f"anchor budget     : {budget.anchor_budget}")
    print(f"error factor (L2) : {budget.error_factor_l2:.6g}")
    print(f"error factor (sup): {budget.error_factor_sup:.6g}")
    return 0


if __name__ == "__main__":
    sys.exit(main())

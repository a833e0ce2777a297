"""End-to-end pipeline, order sweeps, cross-validated errors and heatmaps.

One pipeline run executes, in order: anchor sampling, design-matrix
construction, rank test, column scaling or adaptation, QR, orthogonality
test, sampling-measure construction, index draws, function evaluation at the
drawn anchors, the weighted normal-equation solve, truncation, and the
cross-validated error.  A failed rank or orthogonality test yields the zero
estimator for that repetition, never a silent skip.
"""
import csv
import logging
import math
from dataclasses import dataclass
from typing import Callable, List, Optional, Tuple

import numpy as np

from .config import ExperimentConfig
from .domains import (
    AcceptanceTooLow,
    Domain,
    RngStream,
    make_annulus,
    make_hypercube,
    make_mandelbrot,
    make_swiss_cheese,
    sample_uniform,
)
from .estimator import LeastSquaresFit, assemble_design, assemble_rhs, evaluate_fit, solve_fit
from .index_sets import hyperbolic_cross_set, total_degree_set
from .sampling import build_sigma_tilde, draw_indices, draw_indices_without_replacement
from .surrogate import OrthogonalityLost, RankDeficient, SingularPivot, build_basis

logger = logging.getLogger(__name__)

# substream tags; repetition streams are base.split(order, repetition)
_ANCHOR, _SUBSAMPLE, _CV = 0, 1, 2

CSV_COLUMNS = (
    "k", "n", "m", "m_tilde",
    "mean_cv_error", "min_kappa", "max_kappa", "max_epsilon", "failures",
)


class UnknownFunction(KeyError):
    """Requested test function is not built in."""


class DimensionUnsupported(ValueError):
    """Heatmaps are only defined for two-dimensional domains."""


def _cheese(y):
    return 1.0 / (1.0 + 0.2 * y[:, 0] + 0.1 * y[:, 1])


def _cossin(y):
    return np.cos(2.0 * y[:, 0]) * np.sin(y[:, 1])


def _singular(y):
    return np.abs(y[:, 0]) ** -0.5 + np.abs(y[:, 1]) ** -0.5


# name -> (callable, default truncation level)
_BUILTINS = {
    "cheese": (_cheese, 1.0 / 0.7),
    "cossin": (_cossin, 1.0),
    "singular": (_singular, math.inf),
}


def builtin_function(name):
    """Built-in test function and its default truncation level.

    The rational 'cheese' function is bounded by 1/0.7 on the box; 'cossin'
    by 1; 'singular' is unbounded along the coordinate axes, so its default
    disables truncation (logged, since the clamp normally caps tail risk).
    """
    try:
        u, eta = _BUILTINS[name]
    except KeyError:
        raise UnknownFunction(name) from None
    if math.isinf(eta):
        logger.warning(
            "function %r is unbounded on the axes: truncation disabled by default", name
        )
    return u, eta


@dataclass(frozen=True)
class RepetitionRecord:
    """Outcome of a single pipeline repetition."""

    cv_error: float
    kappa: float
    epsilon: float
    gamma: float
    status: str  # ok | rank_deficient | orthogonality_lost | acceptance_too_low


@dataclass(frozen=True)
class RunRecord:
    """All repetitions at one polynomial order, plus sample budgets."""

    order: int
    n: int
    m: int
    m_tilde: int
    repetitions: Tuple[RepetitionRecord, ...]

    @property
    def mean_cv_error(self):
        return float(np.mean([r.cv_error for r in self.repetitions]))

    @property
    def min_kappa(self):
        ok = [r.kappa for r in self.repetitions if r.status == "ok"]
        return float(min(ok)) if ok else float("nan")

    @property
    def max_kappa(self):
        ok = [r.kappa for r in self.repetitions if r.status == "ok"]
        return float(max(ok)) if ok else float("nan")

    @property
    def max_epsilon(self):
        eps = [r.epsilon for r in self.repetitions if not math.isnan(r.epsilon)]
        return float(max(eps)) if eps else float("nan")

    @property
    def failures(self):
        return sum(1 for r in self.repetitions if r.status != "ok")


def make_domain(config):
    if config.domain == "hypercube":
        return make_hypercube(config.dimension)
    if config.domain == "swiss_cheese":
        return make_swiss_cheese()
    if config.domain == "annulus":
        return make_annulus()
    return make_mandelbrot(config.mandelbrot_max_iter)


def make_index_set(config, order):
    if config.family == "total_degree":
        return total_degree_set(config.dimension, order)
    return hyperbolic_cross_set(config.dimension, order)


def sample_counts(n, theta, c):
    """Anchor and draw counts: ceil(theta n ln n) and ceil(c n ln n).

    ln 1 = 0 would zero the budgets, so the log factor is floored at 1.
    """
    lnn = max(math.log(n), 1.0)
    return math.ceil(theta * n * lnn), math.ceil(c * n * lnn)


def base_stream(config):
    return RngStream(config.seed, config.stream)


def experiment_cv_points(config, domain):
    """The fixed cross-validation sample, identical across orders and repetitions."""
    pts, _ = sample_uniform(domain, config.m_cv, base_stream(config).split(_CV))
    return pts


def cv_error_at(u, fit, points):
    """Root-mean-square error of the (possibly zero) estimator on given points."""
    exact = u(points)
    if fit is None:
        estimate = np.zeros(points.shape[0])
    else:
        estimate = evaluate_fit(fit, points)
    return float(np.sqrt(np.mean((exact - estimate) ** 2)))


def cv_error(u, fit, domain, m_cv, rng):
    """Root-mean-square error over m_cv uniform points drawn from rng."""
    if m_cv < 1:
        raise ValueError("m_cv must be >= 1")
    pts, _ = sample_uniform(domain, m_cv, rng)
    return cv_error_at(u, fit, pts)


def _run_once(config, index_set, domain, u, eta, stream, cv_points):
    """One pipeline repetition; returns (record, fit or None)."""
    n = index_set.size
    m_tilde, m = sample_counts(n, config.theta, config.c)
    failure = dict(kappa=float("nan"), gamma=float("nan"))
    try:
        anchors, _ = sample_uniform(domain, m_tilde, stream.split(_ANCHOR))
    except AcceptanceTooLow:
        rec = RepetitionRecord(
            cv_error=cv_error_at(u, None, cv_points),
            epsilon=float("nan"), status="acceptance_too_low", **failure,
        )
        return rec, None
    try:
        basis = build_basis(
            index_set, anchors,
            algorithm=config.algorithm,
            epsilon_threshold=config.epsilon_threshold,
        )
    except (RankDeficient, SingularPivot):
        rec = RepetitionRecord(
            cv_error=cv_error_at(u, None, cv_points),
            epsilon=float("nan"), status="rank_deficient", **failure,
        )
        return rec, None
    except OrthogonalityLost as exc:
        rec = RepetitionRecord(
            cv_error=cv_error_at(u, None, cv_points),
            epsilon=exc.epsilon if exc.epsilon is not None else float("nan"),
            status="orthogonality_lost", **failure,
        )
        return rec, None
    measure = build_sigma_tilde(basis)
    sub_stream = stream.split(_SUBSAMPLE)
    if config.replacement:
        subsample = draw_indices(measure, m, sub_stream)
    else:
        subsample = draw_indices_without_replacement(measure, min(m, m_tilde), sub_stream)
    # evaluate u once per distinct anchor; duplicated draws reuse the value
    unique, inverse = np.unique(subsample, return_inverse=True)
    u_sub = u(basis.anchors[unique])[inverse]
    design = assemble_design(basis, subsample)
    rhs = assemble_rhs(basis, subsample, u_sub)
    fit = solve_fit(design, rhs, eta, basis)
    rec = RepetitionRecord(
        cv_error=cv_error_at(u, fit, cv_points),
        kappa=fit.kappa,
        epsilon=basis.epsilon,
        gamma=basis.gamma,
        status="ok",
    )
    return rec, fit


def resolve_eta(config, default_eta):
    return default_eta if config.eta is None else config.eta


def run_pipeline_once(config, order, stream):
    """Full single-repetition pipeline at the given order.

    The cross-validation points are derived from the configuration's fixed
    stream, so repeated calls score against the same sample.
    """
    domain = make_domain(config)
    u, default_eta = builtin_function(config.function)
    index_set = make_index_set(config, order)
    cv_points = experiment_cv_points(config, domain)
    return _run_once(config, index_set, domain, u, resolve_eta(config, default_eta),
                     stream, cv_points)


def run_sweep(config):
    """One RunRecord per order in config.orders; optionally emit the CSV table."""
    orders = config.orders if config.orders is not None else (config.order,)
    if not orders:
        raise ValueError("order range is empty")
    domain = make_domain(config)
    u, default_eta = builtin_function(config.function)
    eta = resolve_eta(config, default_eta)
    cv_points = experiment_cv_points(config, domain)
    base = base_stream(config)
    records = []
    for order in orders:
        index_set = make_index_set(config, order)
        m_tilde, m = sample_counts(index_set.size, config.theta, config.c)
        reps = []
        for rep in range(config.repetitions):
            rec, _ = _run_once(config, index_set, domain, u, eta,
                               base.split(order, rep), cv_points)
            reps.append(rec)
        record = RunRecord(order=order, n=index_set.size, m=m, m_tilde=m_tilde,
                           repetitions=tuple(reps))
        logger.info(
            "order %d: n=%d mean_cv_error=%.3e max_kappa=%.3g failures=%d",
            order, record.n, record.mean_cv_error, record.max_kappa, record.failures,
        )
        records.append(record)
    if config.output:
        write_sweep_csv(records, config.output)
    return records


def _fmt(value):
    """Shortest round-trip decimal for floats; plain str for ints."""
    if isinstance(value, float):
        return repr(value)
    return str(value)


def write_sweep_csv(records, path):
    with open(path, "w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(CSV_COLUMNS)
        for r in records:
            writer.writerow([
                _fmt(r.order), _fmt(r.n), _fmt(r.m), _fmt(r.m_tilde),
                _fmt(r.mean_cv_error), _fmt(r.min_kappa), _fmt(r.max_kappa),
                _fmt(r.max_epsilon), _fmt(r.failures),
            ])


def emit_heatmap(u, fit, domain, grid_resolution, path):
    """Grid CSV of log10 |u - estimate| over the box; blank outside the domain.

    Values are clamped to [-16, 3] so exact matches do not produce -inf in
    the file.  Rows scan the grid with the first coordinate varying fastest.
    """
    if domain.dimension != 2:
        raise DimensionUnsupported("heatmaps require a two-dimensional domain")
    if grid_resolution < 2:
        raise ValueError("grid_resolution must be >= 2")
    xs = np.linspace(-1.0, 1.0, grid_resolution)
    g1, g2 = np.meshgrid(xs, xs)
    pts = np.column_stack([g1.ravel(), g2.ravel()])
    inside = domain.contains(pts)
    values = np.full(pts.shape[0], np.nan)
    if inside.any():
        chosen = pts[inside]
        with np.errstate(divide="ignore", invalid="ignore"):
            err = np.log10(np.abs(u(chosen) - evaluate_fit(fit, chosen)))
        values[inside] = np.clip(err, -16.0, 3.0)
    with open(path, "w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(("y1", "y2", "log10_abs_error"))
        for point, keep, val in zip(pts, inside, values):
            writer.writerow([
                _fmt(float(point[0])), _fmt(float(point[1])),
                _fmt(float(val)) if keep else "",
            ])
    return values.reshape(grid_resolution, grid_resolution)

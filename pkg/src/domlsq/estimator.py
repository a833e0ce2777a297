"""Weighted least-squares system assembly, normal-equation solve, truncation.

The design matrix subsamples and reweights the rows of the orthonormal anchor
factor; the normal equations are solved through the eigendecomposition of the
small Gram matrix, which also supplies the conditioning diagnostics and a
minimal-norm fallback when the system is numerically singular.  Sample-size
budgets from the concentration analysis are provided for diagnostics.
"""
import logging
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
import scipy.linalg

from .domains import sample_uniform
from .linalg import EPS
from .surrogate import christoffel_row_sums, evaluate_basis, evaluate_combination

logger = logging.getLogger(__name__)


class ParameterOutOfRange(ValueError):
    """Budget parameters violate the admissible ranges."""


@dataclass(frozen=True)
class LeastSquaresFit:
    """Solved least-squares coefficients plus conditioning diagnostics."""

    coefficients: np.ndarray = field(repr=False)
    eta: float
    basis: object = field(repr=False)
    kappa: float
    gram_deviation: float
    epsilon: float
    m: int
    m_tilde: int
    degenerate: bool = False


@dataclass(frozen=True)
class SampleBudget:
    """Sample counts certifying stability at the requested confidence.

    ``draw_budget`` bounds the number of reweighted draws (the function
    evaluations); ``anchor_budget`` bounds the anchor count and scales with
    the sup of the basis concentration over the domain.
    """

    n: int
    alpha: float
    delta: float
    delta_tilde: float
    epsilon: float
    rate: float
    draw_budget: int
    anchor_budget: int
    error_factor_l2: float
    error_factor_sup: float
    christoffel_sup: float


def bernstein_rate(delta):
    """Rate function (1 + delta) ln(1 + delta) - delta of the matrix tail bound."""
    if delta <= 0:
        raise ParameterOutOfRange("delta must be positive")
    return (1.0 + delta) * math.log1p(delta) - delta


def assemble_design(basis, subsample):
    """Design matrix D: subsampled rows of Q scaled by the root weights.

    Row i is sqrt(total / rowsum[s_i]) * Q[s_i, :] where total is the squared
    Frobenius norm of Q; equivalently sqrt(w(y_i)) times the basis values at
    the i-th drawn anchor.  The Gram matrix of the fit is D^T D / m.
    """
    subsample = np.asarray(subsample)
    rows = basis.q[subsample, :]
    rowsum = np.einsum("ij,ij->i", rows, rows)
    return np.sqrt(basis.gamma / rowsum)[:, None] * rows


def assemble_rhs(basis, subsample, u_values):
    """Right-hand side b with b_j = (1/m) sum_i w_i * L_j(y_i) * u(y_i)."""
    subsample = np.asarray(subsample)
    u_values = np.asarray(u_values, dtype=np.float64)
    if u_values.shape[0] != subsample.shape[0]:
        raise ValueError("u_values must match the subsample order")
    m = subsample.shape[0]
    rows = basis.q[subsample, :]
    rowsum = np.einsum("ij,ij->i", rows, rows)
    k_vals = basis.anchor_count * rowsum
    w = basis.gamma / k_vals
    scaled = w * u_values * math.sqrt(basis.anchor_count)
    return rows.T @ scaled / m


def solve_fit(design, rhs, eta, basis=None):
    """Solve the normal equations G a = b with G = D^T D / m.

    Uses the symmetric eigendecomposition of G, which also yields the
    condition number and the spectral deviation ||G - I||.  When G is
    numerically singular (eigenvalues at or below EPS * n * largest) the
    minimal-norm solution is returned and the fit is flagged degenerate
    rather than raising: rank and orthogonality failures are caught earlier
    in the pipeline.
    """
    design = np.asarray(design, dtype=np.float64)
    rhs = np.asarray(rhs, dtype=np.float64)
    m, n = design.shape
    if m < n:
        raise ValueError("need at least as many draws as basis functions")
    gram = design.T @ design / m
    evals, evecs = scipy.linalg.eigh(gram)
    largest = float(evals[-1])
    cut = EPS * n * largest
    good = evals > cut
    degenerate = not bool(good.all())
    proj = evecs.T @ rhs
    coeffs = np.zeros(n)
    coeffs[good] = proj[good] / evals[good]
    a = evecs @ coeffs
    smallest = float(evals[0])
    if largest <= 0.0 or smallest <= EPS * largest:
        kappa = float("inf")
    else:
        kappa = largest / smallest
    gram_deviation = float(np.abs(evals - 1.0).max())
    return LeastSquaresFit(
        coefficients=a,
        eta=float(eta),
        basis=basis,
        kappa=kappa,
        gram_deviation=gram_deviation,
        epsilon=basis.epsilon if basis is not None else float("nan"),
        m=m,
        m_tilde=basis.anchor_count if basis is not None else 0,
        degenerate=degenerate,
    )


def truncate(values, eta):
    """Clamp to [-eta, eta]; the identity when eta is infinite."""
    values = np.asarray(values, dtype=np.float64)
    if math.isinf(eta):
        return values
    return np.clip(values, -eta, eta)


def evaluate_fit(fit, points):
    """Truncated estimator values at arbitrary points of the domain."""
    if fit.basis is None:
        raise ValueError("fit carries no basis to evaluate")
    raw = evaluate_combination(fit.basis, fit.coefficients, points)
    return truncate(raw, fit.eta)


def sample_budgets(n, alpha, delta, delta_tilde, epsilon, christoffel_sup):
    """Sample counts and error factors from the stability analysis.

    draw_budget  = ceil( 4 n (1+eps) / delta^2 * ln(2n/alpha) )
    anchor_budget = ceil( christoffel_sup / rate(delta_tilde) * ln(2n/alpha) )
    """
    if n < 1:
        raise ParameterOutOfRange("n must be >= 1")
    if not 0.0 < alpha < 0.5:
        raise ParameterOutOfRange("alpha must lie in (0, 1/2)")
    if not 0.0 <= epsilon < 1.0:
        raise ParameterOutOfRange("epsilon must lie in [0, 1)")
    if not 0.0 < delta < 1.0 - epsilon:
        raise ParameterOutOfRange("delta must lie in (0, 1 - epsilon)")
    if not 0.0 < delta_tilde < 1.0:
        raise ParameterOutOfRange("delta_tilde must lie in (0, 1)")
    if christoffel_sup < n:
        raise ParameterOutOfRange("christoffel_sup cannot be smaller than n")
    log_term = math.log(2.0 * n / alpha)
    rate = bernstein_rate(delta_tilde)
    draw_budget = math.ceil(4.0 * n * (1.0 + epsilon) / delta ** 2 * log_term)
    anchor_budget = math.ceil(christoffel_sup / rate * log_term)
    common = (1.0 + epsilon * (n + 1.0)) / (1.0 - delta_tilde)
    denom = (1.0 - delta - epsilon) ** 2
    error_factor_l2 = common * delta ** 2 * (1.0 + epsilon) / (4.0 * denom * log_term)
    error_factor_sup = common * rate * (1.0 + epsilon) * n / (denom * christoffel_sup * log_term)
    return SampleBudget(
        n=n,
        alpha=alpha,
        delta=delta,
        delta_tilde=delta_tilde,
        epsilon=epsilon,
        rate=rate,
        draw_budget=draw_budget,
        anchor_budget=anchor_budget,
        error_factor_l2=error_factor_l2,
        error_factor_sup=error_factor_sup,
        christoffel_sup=christoffel_sup,
    )


def christoffel_sup_estimate(basis, domain, probe_count, rng):
    """Max of the basis concentration over fresh uniform probes.

    A lower estimate of the true sup (diagnostic only).  The true value is at
    least n, and at most n^2 on the full box for downward-closed spaces; the
    estimate is logged against those bounds.
    """
    if probe_count < 1:
        raise ValueError("probe_count must be >= 1")
    probes, _ = sample_uniform(domain, probe_count, rng)
    best = 0.0
    chunk = 65536
    for start in range(0, probes.shape[0], chunk):
        vals = evaluate_basis(basis, probes[start : start + chunk])
        k = np.einsum("ij,ij->i", vals, vals)
        best = max(best, float(k.max()))
    n = basis.size
    logger.debug(
        "christoffel sup estimate %.6g on %d probes (n = %d, box bound n^2 = %d)",
        best, probe_count, n, n * n,
    )
    return best

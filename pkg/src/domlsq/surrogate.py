"""Construction of discretely orthonormal surrogate bases on anchor samples.

Monomials evaluated at the anchor points form a design matrix whose thin QR
factorization yields basis functions orthonormal with respect to the discrete
inner product <u, v> = (1/m) sum_i u(y_i) v(y_i) over the anchors.  Two
constructions are provided: ``direct`` rescales each monomial column to unit
discrete norm before factorizing; ``adapt`` additionally rescales so the
triangular factor has unit diagonal, which keeps the expansion coefficients
of the basis bounded on badly scaled domains.

Conventions.  If A is the rescaled design matrix with QR factors (Q, R), the
k-th basis function takes the values sqrt(m) * Q[:, k] at the anchors and has
the monomial expansion

    L_k(y) = sum_{j <= k} coeff[j, k] * rho[j] * phi_j(y),

with coeff = R^{-1} and rho = sqrt(m) times the per-column rescaling.
"""
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
import scipy.linalg

from .index_sets import MultiIndexSet
from .kernels import monomial_fill
from .linalg import (
    EPS,
    ExactRankDeficiency,
    frobenius_orthogonality_error,
    householder_qr,
    triangular_inverse,
    triangular_r_factor,
)

DEFAULT_EPSILON_THRESHOLD = 1e-12


class RankDeficient(RuntimeError):
    """Design matrix failed the rank test; the estimator must be zeroed."""


class OrthogonalityLost(RuntimeError):
    """Measured orthogonality defect exceeds the configured threshold."""

    def __init__(self, message, epsilon=None):
        super().__init__(message)
        self.epsilon = epsilon


class SingularPivot(RuntimeError):
    """A rescaling pivot underflowed to zero during adaptation."""


class ZeroRow(RuntimeError):
    """All basis functions vanish at some anchor point."""


@dataclass(frozen=True)
class SurrogateBasis:
    """Factored representation of the discretely orthonormal basis.

    Attributes
    ----------
    index_set : MultiIndexSet
        Exponents of the spanning monomials, graded order.
    anchors : ndarray
        The (m, d) anchor sample matrix the discrete product is built on.
    rho : ndarray
        Per-monomial scalings entering the evaluation formula (includes the
        sqrt(m) normalization of the discrete product).
    coeff : ndarray
        Upper-triangular (n, n) expansion coefficients; unit diagonal and
        zero subdiagonal under ``adapt``.  This explicit inverse is kept for
        inspection and the structural contracts; evaluation goes through
        triangular solves against ``r`` instead, which stays accurate when
        the design matrix is severely ill-conditioned.
    r : ndarray
        Upper-triangular factor of the QR of the rescaled design matrix.
    q : ndarray
        Thin orthonormal factor; anchor values of basis function k are
        sqrt(m) * q[:, k].
    epsilon : float
        Measured orthogonality defect ||Q^T Q - I||_F.
    gamma : float
        Sum of squared discrete norms of the basis functions (= ||Q||_F^2).
    algorithm : str
        "direct" or "adapt".
    epsilon_bound : float
        A priori roundoff bound EPS * m * n^(3/2) for the defect.
    max_offdiag_coeff : float or None
        Largest off-diagonal coefficient magnitude (adapt diagnostic).
    unit_diag_deviation : float or None
        max_j |R_jj - 1| after adaptation (adapt diagnostic).
    """

    index_set: MultiIndexSet
    anchors: np.ndarray = field(repr=False)
    rho: np.ndarray = field(repr=False)
    coeff: np.ndarray = field(repr=False)
    r: np.ndarray = field(repr=False)
    q: np.ndarray = field(repr=False)
    epsilon: float
    gamma: float
    algorithm: str
    epsilon_bound: float
    max_offdiag_coeff: Optional[float] = None
    unit_diag_deviation: Optional[float] = None

    @property
    def size(self):
        return self.index_set.size

    @property
    def anchor_count(self):
        return self.anchors.shape[0]

    def anchor_values(self):
        """Values of the basis functions at the anchors, sqrt(m) * Q."""
        return math.sqrt(self.anchor_count) * self.q


def evaluate_monomials(index_set, points):
    """Design matrix W with W[i, k] = prod_j points[i, j] ** exponent[k, j].

    A zero exponent contributes the factor 1 even at coordinate 0.  Columns
    are filled recursively from their predecessor in the downward-closed set,
    one multiply per entry; the result is Fortran-ordered so the subsequent
    QR factorization runs without a copy.
    """
    pts = np.ascontiguousarray(np.atleast_2d(np.asarray(points, dtype=np.float64)))
    if pts.shape[1] != index_set.dimension:
        raise ValueError("point dimension does not match the index set")
    out = np.empty((pts.shape[0], index_set.size), dtype=np.float64, order="F")
    parent, coord = index_set.ancestry()
    monomial_fill(out, pts, parent, coord)
    return out


def adapt(w):
    """Column rescaling making the QR triangular factor unit-diagonal.

    Literal reference implementation: iteration j re-factorizes the m x j
    prefix (cost ~ m n^3 / 3), renormalizes column j, then corrects its
    scaling by |R_jj|^{-1}.  Kept as the oracle for :func:`adapt_fast`.

    Returns (w_adapted, rho) with w_adapted[:, j] = rho[j] * w[:, j].
    """
    w = np.asarray(w, dtype=np.float64)
    if w.ndim == 1:
        w = w[:, None]
    m, n = w.shape
    rho = np.empty(n)
    norm0 = float(np.linalg.norm(w[:, 0]))
    if norm0 == 0.0:
        raise SingularPivot("zero column in adaptation")
    rho[0] = 1.0 / norm0
    adapted = w[:, :1] * rho[0]
    for j in range(1, n):
        nj = float(np.linalg.norm(w[:, j]))
        if nj == 0.0:
            raise SingularPivot("zero column in adaptation")
        rj = 1.0 / nj
        z = np.hstack([adapted, rj * w[:, j : j + 1]])
        r = triangular_r_factor(z)
        pivot = abs(float(r[j, j]))
        if pivot == 0.0:
            raise SingularPivot(f"zero pivot at column {j} during adaptation")
        rho[j] = rj / pivot
        adapted = np.hstack([adapted, rho[j] * w[:, j : j + 1]])
    return adapted, rho


def adapt_fast(w):
    """Same contract as :func:`adapt` at the cost of a single QR.

    Rescaling already-processed columns by positive scalars does not change
    their span, so the pivot |R_jj| seen by the literal loop at step j equals
    the j-th diagonal of the QR factor of the column-normalized matrix; all
    pivots therefore come from one factorization.
    """
    w = np.asarray(w, dtype=np.float64)
    if w.ndim == 1:
        w = w[:, None]
    norms = np.linalg.norm(w, axis=0)
    if (norms == 0.0).any():
        raise SingularPivot("zero column in adaptation")
    r = triangular_r_factor(w / norms)
    pivots = np.abs(np.diagonal(r))
    if (pivots == 0.0).any():
        raise SingularPivot("zero pivot during adaptation")
    rho = (1.0 / norms) / pivots
    return w * rho, rho


def _design_or_raise(index_set, anchors):
    anchors = np.ascontiguousarray(np.asarray(anchors, dtype=np.float64))
    if anchors.ndim != 2:
        raise ValueError("anchors must be a 2-d array of sample points")
    if anchors.shape[0] < index_set.size:
        raise ValueError("need at least as many anchors as basis functions")
    return anchors, evaluate_monomials(index_set, anchors)


def _rank_test(r, rank_tol):
    sigma = np.linalg.svd(r, compute_uv=False)
    if sigma[0] == 0.0:
        raise RankDeficient("design matrix is zero")
    if np.count_nonzero(sigma > rank_tol * sigma[0]) < r.shape[0]:
        raise RankDeficient("design matrix failed the numerical rank test")


def _finish(index_set, anchors, q, r, scalings, algorithm, epsilon_threshold):
    m, n = q.shape
    epsilon = frobenius_orthogonality_error(q)
    if epsilon > epsilon_threshold:
        raise OrthogonalityLost(
            f"orthogonality defect {epsilon:.3e} exceeds threshold {epsilon_threshold:.3e}",
            epsilon=epsilon,
        )
    coeff = triangular_inverse(r)
    max_offdiag = None
    unit_dev = None
    if algorithm == "adapt":
        unit_dev = float(np.abs(np.diagonal(r) - 1.0).max())
        # unit diagonal and zero subdiagonal are structural: set, not computed
        coeff = np.triu(coeff)
        coeff[np.diag_indices(n)] = 1.0
        if n > 1:
            max_offdiag = float(np.abs(coeff[np.triu_indices(n, k=1)]).max())
        else:
            max_offdiag = 0.0
    gamma = math.fsum(float(np.dot(q[:, j], q[:, j])) for j in range(n))
    # corruption guard, not a precision statement: the mathematical sandwich
    # n(1-eps) <= gamma <= n(1+eps) holds with a summation-roundoff allowance
    slack = 1e-8 * n
    if not (n * (1.0 - epsilon) - slack <= gamma <= n * (1.0 + epsilon) + slack):
        raise AssertionError("gamma left its orthonormality sandwich; basis is corrupt")
    return SurrogateBasis(
        index_set=index_set,
        anchors=anchors,
        rho=math.sqrt(m) * scalings,
        coeff=coeff,
        r=r,
        q=q,
        epsilon=epsilon,
        gamma=gamma,
        algorithm=algorithm,
        epsilon_bound=EPS * m * n ** 1.5,
        max_offdiag_coeff=max_offdiag,
        unit_diag_deviation=unit_dev,
    )


def build_direct(index_set, anchors, epsilon_threshold=DEFAULT_EPSILON_THRESHOLD,
                 rank_tol=0.0):
    """Basis from the QR of the column-normalized design matrix.

    Each monomial column is scaled to unit discrete norm; the rank test and
    the orthogonality test are applied in that order, and failing either
    raises (the pipeline maps both to the zero estimator).
    """
    anchors, w = _design_or_raise(index_set, anchors)
    norms = np.linalg.norm(w, axis=0)
    if (norms == 0.0).any():
        raise RankDeficient("monomial column vanishes at every anchor")
    w /= norms
    try:
        q, r = householder_qr(w, overwrite=True)
    except ExactRankDeficiency as exc:
        raise RankDeficient(str(exc)) from exc
    _rank_test(r, rank_tol)
    return _finish(index_set, anchors, q, r, 1.0 / norms, "direct", epsilon_threshold)


def build_adapted(index_set, anchors, epsilon_threshold=DEFAULT_EPSILON_THRESHOLD,
                  rank_tol=0.0, literal_adapt=False):
    """Basis from the QR of the adapted (unit-diagonal) design matrix.

    The fast adaptation route factorizes the column-normalized matrix once to
    read off all rescaling pivots, then rebuilds and factorizes the adapted
    matrix; ``literal_adapt`` switches to the reference per-column loop.  The
    resulting expansion coefficients are unit upper triangular.
    """
    anchors, w = _design_or_raise(index_set, anchors)
    norms = np.linalg.norm(w, axis=0)
    if (norms == 0.0).any():
        raise RankDeficient("monomial column vanishes at every anchor")
    if literal_adapt:
        r1 = triangular_r_factor(w / norms)
        _rank_test(r1, rank_tol)
        adapted, rho = adapt(w)
        w = np.asfortranarray(adapted)
    else:
        w /= norms
        r1 = triangular_r_factor(w, overwrite=True)
        _rank_test(r1, rank_tol)
        pivots = np.abs(np.diagonal(r1))
        if (pivots == 0.0).any():
            raise SingularPivot("zero pivot during adaptation")
        rho = (1.0 / norms) / pivots
        # the first factorization consumed w; release it, rebuild, rescale in place
        w = None
        w = evaluate_monomials(index_set, anchors)
        w *= rho
    try:
        q, r = householder_qr(w, overwrite=True)
    except ExactRankDeficiency as exc:
        raise RankDeficient(str(exc)) from exc
    return _finish(index_set, anchors, q, r, rho, "adapt", epsilon_threshold)


def build_basis(index_set, anchors, algorithm="adapt",
                epsilon_threshold=DEFAULT_EPSILON_THRESHOLD, rank_tol=0.0):
    """Dispatch to :func:`build_direct` or :func:`build_adapted`."""
    if algorithm == "direct":
        return build_direct(index_set, anchors, epsilon_threshold, rank_tol)
    if algorithm == "adapt":
        return build_adapted(index_set, anchors, epsilon_threshold, rank_tol)
    raise ValueError(f"unknown algorithm {algorithm!r}")


def evaluate_basis(basis, points, chunk=65536):
    """Values of all basis functions at arbitrary points of the domain.

    Membership of the points is trusted, not re-checked.  Entry (i, k) is
    sum_j coeff[j, k] * rho[j] * phi_j(points[i]); at the anchor points this
    reproduces sqrt(m) * Q up to roundoff.

    Each point's value vector is obtained by forward substitution on the
    transposed triangular factor with the point's scaled monomial vector as
    right-hand side.  Multiplying by the explicit inverse instead would be
    algebraically identical but loses all accuracy once the design matrix is
    ill-conditioned (high orders): substitution against a concrete right-hand
    side is componentwise stable, the formed inverse is not.
    """
    pts = np.atleast_2d(np.asarray(points, dtype=np.float64))
    blocks = []
    for start in range(0, pts.shape[0], chunk):
        phi = evaluate_monomials(basis.index_set, pts[start : start + chunk])
        phi *= basis.rho
        vals = scipy.linalg.solve_triangular(
            basis.r, phi.T, trans="T", lower=False, check_finite=False
        )
        blocks.append(np.ascontiguousarray(vals.T))
    return np.concatenate(blocks, axis=0)


def evaluate_combination(basis, coefficients, points, chunk=65536):
    """Values of sum_k coefficients[k] * basis_k at arbitrary points.

    One back substitution folds the basis coefficients into a monomial
    coefficient vector; evaluation is then a single matrix-vector product
    per chunk.  Stable for the same reason as :func:`evaluate_basis`.
    """
    pts = np.atleast_2d(np.asarray(points, dtype=np.float64))
    z = scipy.linalg.solve_triangular(
        basis.r, np.asarray(coefficients, dtype=np.float64),
        lower=False, check_finite=False,
    )
    beta = basis.rho * z
    blocks = []
    for start in range(0, pts.shape[0], chunk):
        phi = evaluate_monomials(basis.index_set, pts[start : start + chunk])
        blocks.append(phi @ beta)
    return np.concatenate(blocks)


def christoffel_row_sums(basis):
    """Sum of squared basis values at each anchor, m * row sums of Q squared.

    Strictly positive entries summing to m * gamma; these drive the sampling
    measure and the least-squares weights.
    """
    k = basis.anchor_count * np.einsum("ij,ij->i", basis.q, basis.q)
    if (k == 0.0).any():
        raise ZeroRow("all basis functions vanish at some anchor")
    return k

"""Dense linear-algebra kernels used by the basis construction and the solver.

Thin Householder QR with a positive-diagonal sign convention, triangular
inversion by forward substitution, orthogonality and conditioning
diagnostics, and a singular-value numerical rank test.  Factorizations are
delegated to LAPACK (scipy), which implements Householder reflections; the
sign convention and error contracts are enforced here.
"""
from typing import NamedTuple

import numpy as np
import scipy.linalg

EPS = float(np.finfo(np.float64).eps)


class ExactRankDeficiency(ValueError):
    """A pivot of the triangular factor is exactly zero."""


class SingularTriangular(ValueError):
    """Triangular solve requested with a zero diagonal entry."""


class QrFactors(NamedTuple):
    q: np.ndarray
    r: np.ndarray


def householder_qr(w, overwrite=False):
    """Thin QR factorization with strictly positive diagonal of R.

    Parameters
    ----------
    w : ndarray
        Matrix of shape (m, n) with m >= n >= 1.
    overwrite : bool
        Allow destroying ``w`` (its memory may be reused for Q).

    Returns
    -------
    QrFactors
        q of shape (m, n) with orthonormal columns, r upper triangular (n, n)
        with positive diagonal; q @ r reconstructs the input to machine
        precision regardless of conditioning.
    """
    w = np.asarray(w, dtype=np.float64)
    if w.ndim != 2 or w.shape[0] < w.shape[1] or w.shape[1] < 1:
        raise ValueError("expected an m x n matrix with m >= n >= 1")
    q, r = scipy.linalg.qr(w, mode="economic", overwrite_a=overwrite, check_finite=False)
    d = np.diagonal(r)
    if (d == 0.0).any():
        raise ExactRankDeficiency("exactly zero pivot in QR factorization")
    s = np.sign(d)
    if (s < 0).any():
        q = q * s if not q.flags.writeable else np.multiply(q, s, out=q)
        r = s[:, None] * r
    return QrFactors(q=q, r=np.triu(r))


def triangular_r_factor(w, overwrite=False):
    """R factor only (no Q formed), rows sign-flipped so the diagonal is >= 0."""
    w = np.asarray(w, dtype=np.float64)
    (r,) = scipy.linalg.qr(w, mode="r", overwrite_a=overwrite, check_finite=False)
    r = r[: w.shape[1], :]
    s = np.sign(np.diagonal(r))
    s = np.where(s == 0.0, 1.0, s)
    return s[:, None] * r


def triangular_inverse(r):
    """Inverse of an upper-triangular matrix via forward substitution.

    Solves R^T x = e_k for each k on the transposed (lower-triangular) system,
    which forward substitution handles with high accuracy even when R is
    ill-conditioned; the assembled result is R^{-1}, read column-wise.
    """
    r = np.asarray(r, dtype=np.float64)
    n = r.shape[0]
    if r.shape != (n, n):
        raise ValueError("expected a square triangular matrix")
    if (np.diagonal(r) == 0.0).any():
        raise SingularTriangular("zero diagonal entry in triangular solve")
    x = scipy.linalg.solve_triangular(
        r, np.eye(n), trans="T", lower=False, check_finite=False
    )
    return np.ascontiguousarray(x.T)


def frobenius_orthogonality_error(q):
    """Frobenius norm of Q^T Q - I, the orthogonality defect of the columns."""
    q = np.asarray(q, dtype=np.float64)
    g = q.T @ q
    g[np.diag_indices_from(g)] -= 1.0
    return float(np.linalg.norm(g, "fro"))


def spectral_condition_number(g):
    """Ratio of extreme eigenvalue magnitudes of a symmetric PSD matrix.

    Returns +inf when the smallest eigenvalue does not exceed EPS times the
    largest.
    """
    g = np.asarray(g, dtype=np.float64)
    vals = np.abs(scipy.linalg.eigvalsh(g))
    largest = float(vals.max())
    smallest = float(vals.min())
    if largest == 0.0 or smallest <= EPS * largest:
        return float("inf")
    return largest / smallest


def numerical_rank(w, tol=None):
    """Number of singular values exceeding tol times the largest.

    Default tol is EPS * max(m, n).  Singular values are taken from the R
    factor of a QR factorization (sigma(W) = sigma(R) exactly), so the cost is
    one tall-skinny QR plus an n x n SVD.
    """
    w = np.asarray(w, dtype=np.float64)
    if tol is None:
        tol = EPS * max(w.shape)
    if tol < 0:
        raise ValueError("tol must be >= 0")
    if w.shape[0] >= w.shape[1]:
        (r,) = scipy.linalg.qr(w, mode="r", check_finite=False)
        sigma = np.linalg.svd(r[: w.shape[1], :], compute_uv=False)
    else:
        sigma = np.linalg.svd(w, compute_uv=False)
    if sigma.size == 0 or sigma[0] == 0.0:
        return 0
    return int(np.count_nonzero(sigma > tol * sigma[0]))

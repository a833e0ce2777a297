import numpy as np
import pytest

from domlsq.linalg import (
    EPS,
    ExactRankDeficiency,
    SingularTriangular,
    frobenius_orthogonality_error,
    householder_qr,
    numerical_rank,
    spectral_condition_number,
    triangular_inverse,
)


def test_qr_single_column():
    q, r = householder_qr(np.array([[3.0], [4.0]]))
    assert np.allclose(q, [[0.6], [0.8]])
    assert np.allclose(r, [[5.0]])


def test_qr_identity():
    q, r = householder_qr(np.eye(2))
    assert np.allclose(q, np.eye(2))
    assert np.allclose(r, np.eye(2))


def test_qr_hand_gram_schmidt():
    w = np.array([[1.0, 1.0], [0.0, 1.0], [0.0, 0.0]])
    q, r = householder_qr(w)
    assert np.allclose(r, [[1.0, 1.0], [0.0, 1.0]])
    assert np.allclose(q, [[1.0, 0.0], [0.0, 1.0], [0.0, 0.0]])
    assert np.allclose(q @ r, w)
    assert np.allclose(q.T @ q, np.eye(2))


@pytest.mark.parametrize("m,n,seed", [(40, 7, 0), (500, 60, 1), (100_000, 200, 2)])
def test_qr_reconstruction_and_sign(m, n, seed):
    gen = np.random.default_rng(seed)
    w = gen.normal(size=(m, n))
    q, r = householder_qr(w)
    assert (np.diagonal(r) > 0).all()
    err = np.linalg.norm(q @ r - w)
    assert err <= 10 * EPS * np.sqrt(m * n) * np.linalg.norm(w)


def test_qr_exact_rank_deficiency():
    w = np.zeros((4, 2))
    w[:, 0] = [1.0, 2.0, 0.0, 0.0]
    with pytest.raises(ExactRankDeficiency):
        householder_qr(w)


def test_triangular_inverse_identity():
    assert np.allclose(triangular_inverse(np.eye(3)), np.eye(3))


def test_triangular_inverse_hand_case():
    r = np.array([[1.0, 0.5], [0.0, 2.0]])
    out = triangular_inverse(r)
    assert np.allclose(out, [[1.0, -0.25], [0.0, 0.5]])
    assert np.allclose(r @ out, np.eye(2))


def test_triangular_inverse_singular():
    with pytest.raises(SingularTriangular):
        triangular_inverse(np.array([[2.0, 0.0], [0.0, 0.0]]))


def test_triangular_inverse_residual():
    # factors produced by QR of well-conditioned inputs: the residual of the
    # transposed (forward-substitution) system stays at the roundoff floor
    gen = np.random.default_rng(3)
    for n in (5, 40, 120):
        _, r = householder_qr(gen.normal(size=(4 * n, n)))
        x = triangular_inverse(r)
        resid = np.abs(r.T @ x.T - np.eye(n)).max(axis=0)
        bound = 10 * EPS * n * np.abs(r).sum(axis=1).max()
        assert (resid <= bound).all()


def test_triangular_inverse_componentwise_stability():
    # adversarial triangular matrices with exploding inverses: the residual is
    # bounded by the backward-stability estimate, which carries the solution size
    gen = np.random.default_rng(30)
    for n in (20, 60):
        r = np.triu(gen.normal(size=(n, n)))
        r[np.diag_indices(n)] = np.abs(r[np.diag_indices(n)]) + 0.5
        x = triangular_inverse(r)
        resid = np.abs(r.T @ x.T - np.eye(n)).max(axis=0)
        norm_r = np.abs(r).sum(axis=1).max()
        col_size = np.maximum(1.0, np.abs(x).max(axis=1))
        assert (resid <= 10 * EPS * n * norm_r * col_size).all()


def test_orthogonality_error_orthonormal():
    q, _ = householder_qr(np.random.default_rng(4).normal(size=(50, 8)))
    assert frobenius_orthogonality_error(q) <= 10 * EPS * 8 * 10


def test_orthogonality_error_hand_value():
    assert frobenius_orthogonality_error(np.array([[1.0], [1.0]])) == pytest.approx(1.0)


def test_orthogonality_error_large_qr():
    gen = np.random.default_rng(5)
    q, _ = householder_qr(gen.normal(size=(10_000, 50)))
    assert frobenius_orthogonality_error(q) <= 1e-12


def test_condition_number_basic():
    assert spectral_condition_number(np.eye(3)) == pytest.approx(1.0)
    assert spectral_condition_number(np.diag([4.0, 1.0])) == pytest.approx(4.0)
    assert spectral_condition_number(np.zeros((2, 2))) == np.inf
    assert spectral_condition_number(np.diag([1.0, 1e-18])) == np.inf


def test_condition_number_perturbation_monotone():
    gen = np.random.default_rng(6)
    e = gen.normal(size=(6, 6))
    e = (e + e.T) / 2
    e /= np.linalg.norm(e, 2)
    kappas = [spectral_condition_number(np.eye(6) + d * e) for d in (0.3, 0.1, 0.03, 0.01)]
    assert all(k1 >= k2 for k1, k2 in zip(kappas, kappas[1:]))
    assert kappas[-1] == pytest.approx(1.0, abs=0.03)


def test_numerical_rank_identity():
    assert numerical_rank(np.eye(3), tol=1e-10) == 3


def test_numerical_rank_duplicate_columns():
    gen = np.random.default_rng(7)
    w = gen.normal(size=(30, 5))
    w[:, 4] = w[:, 2]
    assert numerical_rank(w) == 4


def test_numerical_rank_vandermonde():
    # distinct 1-d points give a nonsingular Vandermonde matrix
    gen = np.random.default_rng(8)
    pts = np.sort(gen.uniform(-1, 1, size=40))
    n = 12
    v = pts[:, None] ** np.arange(n)[None, :]
    assert numerical_rank(v) == n


def test_numerical_rank_zero_matrix():
    assert numerical_rank(np.zeros((5, 3))) == 0

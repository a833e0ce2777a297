import math

import numpy as np
import pytest
import scipy.stats

from domlsq.domains import RngStream, make_swiss_cheese, sample_uniform
from domlsq.index_sets import MultiIndexSet, total_degree_set
from domlsq.sampling import (
    DiscreteMeasure,
    InsufficientSupport,
    build_sigma_tilde,
    draw_indices,
    draw_indices_without_replacement,
)
from domlsq.surrogate import build_direct


def constant_basis(anchor_count, seed=0):
    s = MultiIndexSet(dimension=2, exponents=np.zeros((1, 2), dtype=np.int64))
    anchors = RngStream(seed).generator().uniform(-1, 1, size=(anchor_count, 2))
    return build_direct(s, anchors)


def hand_measure():
    """3-anchor, degree-1 measure with hand-checked probabilities 5/12, 2/12, 5/12."""
    s = total_degree_set(1, 1)
    anchors = np.array([[-1.0], [0.0], [1.0]])
    return build_sigma_tilde(build_direct(s, anchors))


def measure_from(p):
    """Arbitrary-probability measure for draw-only tests."""
    from domlsq.kernels import alias_tables

    p = np.asarray(p, dtype=np.float64)
    prob, alias = alias_tables(p)
    with np.errstate(divide="ignore"):
        w = 1.0 / (p.size * p)
    return DiscreteMeasure(probabilities=p, weights=w, gamma=float("nan"),
                           alias_prob=prob, alias_index=alias)


def test_constant_basis_measure():
    meas = build_sigma_tilde(constant_basis(4))
    assert np.allclose(meas.probabilities, 0.25)
    assert np.allclose(meas.weights, 1.0)
    assert meas.gamma == pytest.approx(1.0)


def test_uniform_rows_give_uniform_measure():
    # exactly orthonormal Q with equal row norms: uniform p, gamma = n
    s = total_degree_set(1, 1)
    anchors = np.array([[-1.0], [1.0]])
    meas = build_sigma_tilde(build_direct(s, anchors))
    assert np.allclose(meas.probabilities, 0.5)
    assert meas.gamma == pytest.approx(2.0)


def test_hand_measure_probabilities():
    meas = hand_measure()
    assert np.allclose(meas.probabilities, [5 / 12, 2 / 12, 5 / 12])
    assert meas.gamma == pytest.approx(2.0)


def test_probabilities_sum_exactly_one():
    s = total_degree_set(2, 5)
    anchors, _ = sample_uniform(make_swiss_cheese(), 4000, RngStream(21))
    meas = build_sigma_tilde(build_direct(s, anchors))
    assert float(meas.probabilities.sum()) == 1.0


def test_weight_probability_identity():
    s = total_degree_set(2, 4)
    anchors, _ = sample_uniform(make_swiss_cheese(), 3000, RngStream(22))
    meas = build_sigma_tilde(build_direct(s, anchors))
    m = meas.size
    rel = np.abs(meas.weights * meas.probabilities * m - 1.0)
    assert rel.max() <= 2 * np.finfo(float).eps * 2


def test_draw_point_mass():
    meas = measure_from([1.0, 0.0, 0.0])
    out = draw_indices(meas, 50, RngStream(1))
    assert (out == 0).all()


def test_draw_uniform_two_buckets():
    meas = measure_from([0.5, 0.5])
    out = draw_indices(meas, 1_000_000, RngStream(2))
    freq = np.mean(out == 0)
    assert abs(freq - 0.5) < 0.002


def test_draw_hand_measure_frequencies():
    meas = hand_measure()
    m = 1_000_000
    out = draw_indices(meas, m, RngStream(3))
    for i, p in enumerate(meas.probabilities):
        freq = np.mean(out == i)
        sigma = math.sqrt(p * (1 - p) / m)
        assert abs(freq - p) <= 3 * sigma


def test_draw_reproducible():
    meas = hand_measure()
    a = draw_indices(meas, 1000, RngStream(4, 7))
    b = draw_indices(meas, 1000, RngStream(4, 7))
    assert np.array_equal(a, b)


def test_alias_chi_square_fit():
    # alias draws against the exact distribution over <= 64 buckets
    gen = np.random.default_rng(5)
    p = gen.uniform(0.2, 1.0, size=48)
    p /= p.sum()
    meas = measure_from(p)
    draws = draw_indices(meas, 1_000_000, RngStream(6))
    observed = np.bincount(draws, minlength=48)
    _, pvalue = scipy.stats.chisquare(observed, f_exp=p * 1_000_000)
    assert pvalue > 1e-4


def test_without_replacement_exhaustive_permutation():
    meas = hand_measure()
    out = draw_indices_without_replacement(meas, 3, RngStream(7))
    assert sorted(out.tolist()) == [0, 1, 2]


def test_without_replacement_point_mass_insufficient():
    meas = measure_from([1.0, 0.0, 0.0])
    with pytest.raises(InsufficientSupport):
        draw_indices_without_replacement(meas, 2, RngStream(8))


def test_without_replacement_uniform_every_index_once():
    meas = measure_from(np.full(10, 0.1))
    for seed in range(5):
        out = draw_indices_without_replacement(meas, 10, RngStream(seed))
        assert sorted(out.tolist()) == list(range(10))


def test_without_replacement_more_than_support():
    meas = hand_measure()
    with pytest.raises(InsufficientSupport):
        draw_indices_without_replacement(meas, 4, RngStream(9))


def test_empirical_gram_mean_approaches_anchor_gram():
    # statistical check of unbiasedness: the average of the subsampled Gram
    # matrices drifts toward the anchor Gram as the number of draws grows
    from domlsq.estimator import assemble_design

    s = total_degree_set(2, 2)
    anchors, _ = sample_uniform(make_swiss_cheese(), 800, RngStream(23))
    basis = build_direct(s, anchors)
    meas = build_sigma_tilde(basis)
    anchor_gram = basis.q.T @ basis.q
    m = 64

    def mean_gram(repetitions, stream_base):
        acc = np.zeros_like(anchor_gram)
        for rep in range(repetitions):
            idx = draw_indices(meas, m, RngStream(24, stream_base + rep))
            d = assemble_design(basis, idx)
            acc += d.T @ d / (m * basis.anchor_count)
        return acc / repetitions

    few = np.linalg.norm(mean_gram(20, 0) - anchor_gram)
    many = np.linalg.norm(mean_gram(200, 1000) - anchor_gram)
    assert many < few

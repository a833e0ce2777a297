import math

import numpy as np
import pytest

from domlsq.domains import (
    AcceptanceTooLow,
    Domain,
    RngStream,
    make_annulus,
    make_hypercube,
    make_mandelbrot,
    make_swiss_cheese,
    sample_uniform,
)

ANNULUS_FRACTION = math.pi * (1 - 1 / 16) / 4


def test_hypercube_membership():
    dom = make_hypercube(3)
    assert dom.contains((0.0, 0.0, 0.0))
    assert dom.contains((1.0, 1.0, 1.0))  # closed box
    assert not dom.contains((1.0001, 0.0, 0.0))
    assert dom.volume_fraction == 1.0


def test_swiss_cheese_membership():
    dom = make_swiss_cheese()
    assert not dom.contains((-0.2, -0.3))  # center of the first hole
    assert not dom.contains((0.99, 0.99))  # beyond the hull
    assert dom.contains((-0.6, -0.6))
    # hull vertices are inside (closed hull)
    assert dom.contains((0.8, 0.7))
    assert dom.contains((-0.7, -0.7))
    # point on the first ellipse boundary belongs to the domain (holes are open)
    assert dom.contains((-0.2 + 0.15, -0.3))


def test_swiss_cheese_consistency():
    dom = make_swiss_cheese()
    gen = RngStream(5).generator()
    pts = gen.uniform(-1, 1, size=(20000, 2))
    inside = dom.contains(pts)
    in_e1 = ((pts[:, 0] + 0.2) / 0.15) ** 2 + ((pts[:, 1] + 0.3) / (0.15 / math.sqrt(2))) ** 2 < 1
    in_e2 = ((pts[:, 0] - 0.2) / 0.2) ** 2 + ((pts[:, 1] - 0.2) / (0.2 / math.sqrt(2))) ** 2 < 1
    assert not (inside & (in_e1 | in_e2)).any()
    # outside the hull's bounding box implies outside the domain
    beyond = (pts[:, 0] > 0.8) | (pts[:, 1] > 0.7) | (pts[:, 0] < -0.7) | (pts[:, 1] < -0.7)
    assert not (inside & beyond).any()


def test_annulus_membership_and_fraction():
    dom = make_annulus()
    assert dom.contains((0.0, 0.5))
    assert not dom.contains((0.1, 0.1))  # radius ~0.141 < 1/4
    assert dom.contains((1.0, 0.0))
    assert dom.volume_fraction == pytest.approx(0.73631, abs=1e-5)


def test_mandelbrot_membership():
    dom = make_mandelbrot()
    assert dom.contains((0.0, 0.0))
    assert not dom.contains((1.0, 0.0))
    assert dom.contains((-1.0, 0.0))


def test_mandelbrot_requires_box():
    dom = make_mandelbrot()
    assert not dom.contains((-1.2, 0.0))


def test_sample_reproducibility():
    dom = make_swiss_cheese()
    a, _ = sample_uniform(dom, 500, RngStream(42, 3))
    b, _ = sample_uniform(dom, 500, RngStream(42, 3))
    assert np.array_equal(a, b)
    c, _ = sample_uniform(dom, 500, RngStream(42, 4))
    assert not np.array_equal(a, c)


def test_samples_inside_domain_and_box():
    for dom in (make_hypercube(2), make_swiss_cheese(), make_annulus(), make_mandelbrot(200)):
        pts, stats = sample_uniform(dom, 2000, RngStream(7))
        assert pts.shape == (2000, dom.dimension)
        assert dom.contains(pts).all()
        assert (np.abs(pts) <= 1).all()
        assert stats.accepted >= 2000
        assert stats.proposals >= stats.accepted


def test_hypercube_acceptance_is_one():
    pts, stats = sample_uniform(make_hypercube(2), 5, RngStream(0))
    assert pts.shape == (5, 2)
    assert stats.acceptance_rate == 1.0


def test_annulus_acceptance_rate():
    _, stats = sample_uniform(make_annulus(), 100_000, RngStream(123))
    assert abs(stats.acceptance_rate - ANNULUS_FRACTION) < 0.01


@pytest.mark.parametrize("factory", [make_annulus, make_swiss_cheese])
def test_acceptance_matches_analytic_fraction(factory):
    # binomial 3-sigma band around the analytic volume fraction
    dom = factory()
    _, stats = sample_uniform(dom, 120_000, RngStream(9))
    p = dom.volume_fraction
    sigma = math.sqrt(p * (1 - p) / stats.proposals)
    assert abs(stats.acceptance_rate - p) <= 3 * sigma


def test_acceptance_too_low():
    empty = Domain(name="empty", dimension=1, volume_fraction=0.0,
                   _member=lambda pts: np.zeros(pts.shape[0], dtype=bool))
    with pytest.raises(AcceptanceTooLow):
        sample_uniform(empty, 1, RngStream(0))


def test_rng_stream_split_independent():
    base = RngStream(99)
    x = base.split(1).generator().random(4)
    y = base.split(2).generator().random(4)
    assert not np.allclose(x, y)
    again = base.split(1).generator().random(4)
    assert np.array_equal(x, again)

"""Bounded domains inside the box B = [-1,1]^d and uniform rejection sampling.

A domain is a vectorized membership predicate plus metadata.  Sampling draws
uniform proposals on B and keeps the points the predicate accepts; the
empirical acceptance rate estimates the volume fraction of the domain.
"""
import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .kernels import mandelbrot_inside


class AcceptanceTooLow(RuntimeError):
    """Rejection sampling produced no acceptances within the proposal budget."""


@dataclass(frozen=True)
class RngStream:
    """Reproducible random stream: identical (seed, stream, substream) gives an
    identical bit stream.  Built on the counter-based Philox generator, so
    distinct stream ids are statistically independent."""

    seed: int
    stream: int = 0
    substream: tuple = ()

    def generator(self):
        key = np.random.SeedSequence(self.seed, spawn_key=(self.stream,) + self.substream)
        return np.random.Generator(np.random.Philox(key))

    def split(self, *tags):
        """Derived independent stream; tags extend the spawn key."""
        return RngStream(self.seed, self.stream, self.substream + tuple(tags))


@dataclass(frozen=True)
class Domain:
    """Region of B = [-1,1]^d given by a deterministic membership predicate."""

    name: str
    dimension: int
    volume_fraction: Optional[float]
    _member: Callable = field(repr=False)

    def contains(self, points):
        """Vectorized membership; accepts one point (d,) or a batch (m, d)."""
        pts = np.asarray(points, dtype=np.float64)
        if pts.ndim == 1:
            return bool(self._member(pts[None, :])[0])
        return self._member(pts)


def _in_box(pts):
    return (np.abs(pts) <= 1.0).all(axis=1)


def make_hypercube(dimension):
    """The whole box B = [-1,1]^d (closed)."""
    if dimension < 1:
        raise ValueError("dimension must be >= 1")
    return Domain(
        name="hypercube",
        dimension=dimension,
        volume_fraction=1.0,
        _member=_in_box,
    )


# Vertex list of the cheese-shaped region: its convex hull minus two open
# elliptic holes.  Semiaxes are axis-aligned, first value along y1.
_CHEESE_POINTS = np.array(
    [
        [-0.4, 0.2],
        [-0.7, -0.7],
        [0.5, -0.3],
        [0.8, 0.7],
        [0.0, 0.7],
        [0.0, -0.6],
    ]
)
_CHEESE_HOLES = (
    ((-0.2, -0.3), 0.15, 0.15 / math.sqrt(2.0)),
    ((0.2, 0.2), 0.2, 0.2 / math.sqrt(2.0)),
)


def _convex_hull(points):
    """Gift wrapping; returns hull vertices in counterclockwise order.

    Exact (tolerance zero) for the small fixed vertex lists used here.
    """
    pts = [tuple(p) for p in points]
    start = min(pts, key=lambda p: (p[1], p[0]))
    hull = [start]
    current = start
    while True:
        candidate = None
        for p in pts:
            if p == current:
                continue
            if candidate is None:
                candidate = p
                continue
            cross = (candidate[0] - current[0]) * (p[1] - current[1]) - (
                candidate[1] - current[1]
            ) * (p[0] - current[0])
            if cross < 0 or (
                cross == 0
                and (p[0] - current[0]) ** 2 + (p[1] - current[1]) ** 2
                > (candidate[0] - current[0]) ** 2 + (candidate[1] - current[1]) ** 2
            ):
                candidate = p
        if candidate == start:
            break
        hull.append(candidate)
        current = candidate
    return np.array(hull)


def _hull_area(hull):
    x, y = hull[:, 0], hull[:, 1]
    return 0.5 * abs(np.dot(x, np.roll(y, -1)) - np.dot(y, np.roll(x, -1)))


def make_swiss_cheese():
    """Convex hull of six fixed vertices minus two open elliptic holes (d = 2).

    The hull boundary belongs to the domain; the ellipse boundaries do too
    (the holes are open), so the domain is closed.
    """
    hull = _convex_hull(_CHEESE_POINTS)
    edges_a = hull
    edges_b = np.roll(hull, -1, axis=0)

    area = _hull_area(hull)
    for (_, a, b) in _CHEESE_HOLES:
        area -= math.pi * a * b

    def member(pts):
        inside = _in_box(pts)
        for a, b in zip(edges_a, edges_b):
            cross = (b[0] - a[0]) * (pts[:, 1] - a[1]) - (b[1] - a[1]) * (pts[:, 0] - a[0])
            inside &= cross >= 0.0
        for (cx, cy), sa, sb in _CHEESE_HOLES:
            inside &= ((pts[:, 0] - cx) / sa) ** 2 + ((pts[:, 1] - cy) / sb) ** 2 >= 1.0
        return inside

    return Domain(
        name="swiss_cheese",
        dimension=2,
        volume_fraction=area / 4.0,
        _member=member,
    )


def make_annulus():
    """Closed annulus 1/4 <= |y| <= 1 (d = 2)."""

    def member(pts):
        r2 = pts[:, 0] ** 2 + pts[:, 1] ** 2
        return (r2 >= 0.0625) & (r2 <= 1.0)

    return Domain(
        name="annulus",
        dimension=2,
        volume_fraction=math.pi * (1.0 - 1.0 / 16.0) / 4.0,
        _member=member,
    )


# Affine placement of the escape-time set inside B, recorded here so
# experiments are self-describing: c = (1.25*y1 - 0.75) + 1.25i*y2.
MANDELBROT_SCALE = 1.25
MANDELBROT_SHIFT = -0.75


def make_mandelbrot(max_iter=1000):
    """Escape-time fractal membership (d = 2), mapped affinely to fill B."""
    if max_iter < 1:
        raise ValueError("max_iter must be >= 1")

    def member(pts):
        inside = _in_box(pts)
        cre = np.ascontiguousarray(MANDELBROT_SCALE * pts[:, 0] + MANDELBROT_SHIFT)
        cim = np.ascontiguousarray(MANDELBROT_SCALE * pts[:, 1])
        return inside & mandelbrot_inside(cre, cim, max_iter).astype(bool)

    return Domain(
        name="mandelbrot",
        dimension=2,
        volume_fraction=None,
        _member=member,
    )


@dataclass(frozen=True)
class SampleStats:
    proposals: int
    accepted: int

    @property
    def acceptance_rate(self):
        return self.accepted / self.proposals if self.proposals else float("nan")


def sample_uniform(domain, count, rng):
    """Draw ``count`` iid uniform points on the domain by rejection sampling.

    Proposals come in blocks of max(1024, count) to amortize RNG calls.
    Returns (points, stats); stats.acceptance_rate estimates the volume
    fraction of the domain within B.

    Raises AcceptanceTooLow if the first 10^6 * d proposals are all rejected,
    which signals a measure-zero or mis-specified domain.
    """
    if count < 1:
        raise ValueError("count must be >= 1")
    d = domain.dimension
    gen = rng.generator()
    block = max(1024, count)
    chunks = []
    accepted = 0
    proposals = 0
    while accepted < count:
        cand = gen.uniform(-1.0, 1.0, size=(block, d))
        keep = domain.contains(cand)
        proposals += block
        got = cand[keep]
        if got.shape[0]:
            chunks.append(got)
            accepted += got.shape[0]
        elif accepted == 0 and proposals >= 1_000_000 * d:
            raise AcceptanceTooLow(
                f"no acceptances in {proposals} proposals on domain {domain.name!r}"
            )
    points = np.concatenate(chunks, axis=0)[:count]
    # `accepted` keeps the surplus from the last block so the rate stays an
    # unbiased binomial estimate of the volume fraction
    return np.ascontiguousarray(points), SampleStats(proposals=proposals, accepted=accepted)

"""Discrete sampling measure over the anchors and O(1) index draws.

The measure puts mass proportional to the local concentration of the basis
(the squared row sums of the orthonormal factor) on each anchor; sampling
from it and reweighting by its reciprocal makes the empirical Gram matrix an
unbiased estimate of the anchor Gram matrix.  Draws use the alias method.
"""
from dataclasses import dataclass, field

import numpy as np

from .kernels import alias_tables
from .surrogate import christoffel_row_sums


class ZeroMass(RuntimeError):
    """Every anchor carries zero probability; the basis is corrupt."""


class InsufficientSupport(RuntimeError):
    """Fewer anchors with positive probability than requested draws."""


@dataclass(frozen=True)
class DiscreteMeasure:
    """Probabilities and importance weights over the anchor points.

    Invariants: probabilities sum to one exactly after renormalization, and
    weights[i] * probabilities[i] == 1/m up to a couple of roundings (weights
    are defined from the renormalized probabilities for exactly that reason).
    """

    probabilities: np.ndarray = field(repr=False)
    weights: np.ndarray = field(repr=False)
    gamma: float
    alias_prob: np.ndarray = field(repr=False)
    alias_index: np.ndarray = field(repr=False)

    @property
    def size(self):
        return self.probabilities.shape[0]


def build_sigma_tilde(basis):
    """Sampling measure induced by the basis on its anchor set."""
    k = christoffel_row_sums(basis)
    total = float(k.sum())
    if total <= 0.0:
        raise ZeroMass("anchor mass vanished")
    p = k / total
    # kill round-off drift: the alias construction wants an exact unit sum
    for _ in range(4):
        s = float(p.sum())
        if s == 1.0:
            break
        p = p / s
    m = p.shape[0]
    weights = 1.0 / (m * p)
    prob, alias = alias_tables(p)
    return DiscreteMeasure(
        probabilities=p,
        weights=weights,
        gamma=basis.gamma,
        alias_prob=prob,
        alias_index=alias,
    )


def draw_indices(measure, count, rng):
    """``count`` iid anchor indices distributed as the measure, with replacement.

    Alias method: one uniform integer and one uniform real per draw.
    """
    if count < 1:
        raise ValueError("count must be >= 1")
    gen = rng.generator()
    j = gen.integers(0, measure.size, size=count)
    u = gen.random(count)
    return np.where(u < measure.alias_prob[j], j, measure.alias_index[j])


def draw_indices_without_replacement(measure, count, rng):
    """Distinct indices via sequential weighted draws with removal.

    Flagged alternative mode: the draws are no longer independent, so the
    concentration guarantees behind the with-replacement mode do not apply.
    Cost is O(count * size); intended for small experiments.
    """
    if count > measure.size:
        raise InsufficientSupport("more draws requested than anchors available")
    support = int(np.count_nonzero(measure.probabilities > 0.0))
    if support < count:
        raise InsufficientSupport(
            f"{support} anchors with positive probability, {count} draws requested"
        )
    gen = rng.generator()
    remaining = measure.probabilities.astype(np.float64, copy=True)
    out = np.empty(count, dtype=np.int64)
    for i in range(count):
        cum = np.cumsum(remaining)
        t = gen.random() * cum[-1]
        idx = int(np.searchsorted(cum, t, side="right"))
        idx = min(idx, remaining.shape[0] - 1)
        while remaining[idx] == 0.0:  # guard against roundoff landing on a dead slot
            idx = (idx + 1) % remaining.shape[0]
        out[i] = idx
        remaining[idx] = 0.0
    return out

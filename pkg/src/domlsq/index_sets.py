"""Downward-closed multi-index sets defining polynomial approximation spaces.

A multi-index set here is a finite set of exponent tuples in N_0^d containing
the zero index and every componentwise predecessor of each member.  The
ordering is graded: indices are sorted by total degree, ties broken
lexicographically, so the constant monomial comes first and every parent
precedes its children.
"""
import math
from dataclasses import dataclass

import numpy as np

MAX_CARDINALITY = 100_000


@dataclass(frozen=True)
class MultiIndexSet:
    """Ordered downward-closed set of exponent multi-indices.

    Attributes
    ----------
    dimension : int
        Ambient dimension d >= 1.
    exponents : ndarray
        Integer array of shape (n, d), graded-lexicographically ordered,
        first row all zeros.  Read-only.
    """

    dimension: int
    exponents: np.ndarray

    def __post_init__(self):
        self.exponents.setflags(write=False)

    def __len__(self):
        return self.exponents.shape[0]

    @property
    def size(self):
        return self.exponents.shape[0]

    def as_tuples(self):
        return [tuple(int(e) for e in row) for row in self.exponents]

    def ancestry(self):
        """Parent links for column-recursive monomial evaluation.

        Returns (parent, coord) int64 arrays of length n: for k >= 1, the k-th
        index equals index parent[k] plus one in coordinate coord[k].
        parent[0] = -1.  Exists for every k by downward closure.
        """
        pos = {t: i for i, t in enumerate(self.as_tuples())}
        n = self.size
        parent = np.full(n, -1, dtype=np.int64)
        coord = np.zeros(n, dtype=np.int64)
        for k, nu in enumerate(self.as_tuples()):
            if k == 0:
                continue
            i = next(j for j, e in enumerate(nu) if e > 0)
            pred = nu[:i] + (nu[i] - 1,) + nu[i + 1 :]
            parent[k] = pos[pred]
            coord[k] = i
        return parent, coord


def _finalize(dimension, tuples):
    ordered = sorted(tuples, key=lambda t: (sum(t), t))
    exponents = np.array(ordered, dtype=np.int64).reshape(len(ordered), dimension)
    return MultiIndexSet(dimension=dimension, exponents=exponents)


def total_degree_set(dimension, order):
    """All indices with l1 norm at most ``order``; cardinality binom(d+k, k)."""
    if dimension < 1:
        raise ValueError("dimension must be >= 1")
    if order < 0:
        raise ValueError("order must be >= 0")
    n = math.comb(dimension + order, order)
    if n > MAX_CARDINALITY:
        raise ValueError(f"index set cardinality {n} exceeds limit {MAX_CARDINALITY}")

    def rec(d, budget):
        if d == 1:
            for i in range(budget + 1):
                yield (i,)
            return
        for i in range(budget + 1):
            for rest in rec(d - 1, budget - i):
                yield (i,) + rest

    return _finalize(dimension, list(rec(dimension, order)))


def hyperbolic_cross_set(dimension, order):
    """All indices with prod_j (nu_j + 1) at most ``order`` + 1."""
    if dimension < 1:
        raise ValueError("dimension must be >= 1")
    if order < 0:
        raise ValueError("order must be >= 0")
    bound = order + 1

    out = []

    def rec(d, budget, prefix):
        if d == 1:
            for i in range(budget):
                out.append(prefix + (i,))
                if len(out) > MAX_CARDINALITY:
                    raise ValueError(f"index set cardinality exceeds limit {MAX_CARDINALITY}")
            return
        for i in range(budget):
            rec(d - 1, budget // (i + 1), prefix + (i,))

    rec(dimension, bound, ())
    return _finalize(dimension, out)


def is_downward_closed(index_set):
    """True iff every componentwise-smaller index of each member is a member.

    Checking single-step predecessors suffices by induction.
    """
    members = set(index_set.as_tuples())
    for nu in members:
        for i, e in enumerate(nu):
            if e > 0 and nu[:i] + (e - 1,) + nu[i + 1 :] not in members:
                return False
    return True

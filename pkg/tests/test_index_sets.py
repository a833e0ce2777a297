import itertools
import math

import numpy as np
import pytest

from domlsq.index_sets import (
    MAX_CARDINALITY,
    hyperbolic_cross_set,
    is_downward_closed,
    total_degree_set,
)


def brute_force_td(d, k):
    """Independent enumeration over the full grid."""
    return {
        nu
        for nu in itertools.product(range(k + 1), repeat=d)
        if sum(nu) <= k
    }


def brute_force_hc(d, k):
    return {
        nu
        for nu in itertools.product(range(k + 1), repeat=d)
        if math.prod(e + 1 for e in nu) <= k + 1
    }


def test_total_degree_paper_count():
    assert total_degree_set(2, 2).size == 6


def test_total_degree_trivial():
    s = total_degree_set(1, 0)
    assert s.as_tuples() == [(0,)]
    assert s.size == 1


def test_total_degree_derived_count():
    assert total_degree_set(3, 4).size == len(brute_force_td(3, 4)) == 35


def test_hyperbolic_cross_trivial():
    s = hyperbolic_cross_set(2, 0)
    assert s.as_tuples() == [(0, 0)]


def test_hyperbolic_cross_order_one():
    assert set(hyperbolic_cross_set(2, 1).as_tuples()) == {(0, 0), (1, 0), (0, 1)}


def test_hyperbolic_cross_derived_count():
    assert hyperbolic_cross_set(2, 3).size == len(brute_force_hc(2, 3)) == 8


@pytest.mark.parametrize("d", [1, 2, 3, 4])
@pytest.mark.parametrize("k", range(11))
def test_total_degree_cardinality(d, k):
    s = total_degree_set(d, k)
    assert s.size == math.comb(d + k, k)
    assert set(s.as_tuples()) == brute_force_td(d, k)


@pytest.mark.parametrize("d,k", [(1, 9), (2, 7), (3, 6), (4, 5)])
def test_hyperbolic_cross_matches_brute_force(d, k):
    assert set(hyperbolic_cross_set(d, k).as_tuples()) == brute_force_hc(d, k)


class FakeSet:
    def __init__(self, tuples):
        self._tuples = tuples

    def as_tuples(self):
        return self._tuples


def test_is_downward_closed_examples():
    assert is_downward_closed(FakeSet([(0, 0), (1, 0)]))
    assert not is_downward_closed(FakeSet([(1, 0)]))


def test_constructors_downward_closed():
    for s in (total_degree_set(2, 5), total_degree_set(3, 3),
              hyperbolic_cross_set(2, 6), hyperbolic_cross_set(3, 5)):
        assert is_downward_closed(s)
        # full predecessor check by brute force
        members = set(s.as_tuples())
        for nu in members:
            for smaller in itertools.product(*[range(e + 1) for e in nu]):
                assert smaller in members


def test_ordering_graded_and_stable():
    a = total_degree_set(2, 5)
    b = total_degree_set(2, 5)
    assert a.as_tuples() == b.as_tuples()
    degrees = [sum(nu) for nu in a.as_tuples()]
    assert degrees == sorted(degrees)
    assert a.as_tuples()[0] == (0, 0)
    # lexicographic tie-break within a degree block
    block = [nu for nu in a.as_tuples() if sum(nu) == 2]
    assert block == sorted(block)


def test_cardinality_limit():
    with pytest.raises(ValueError):
        total_degree_set(6, 30)  # comb(36, 30) = 1947792 > limit
    assert math.comb(36, 30) > MAX_CARDINALITY


def test_ancestry_links():
    s = total_degree_set(2, 4)
    parent, coord = s.ancestry()
    tuples = s.as_tuples()
    assert parent[0] == -1
    for k in range(1, s.size):
        nu = list(tuples[int(parent[k])])
        nu[int(coord[k])] += 1
        assert tuple(nu) == tuples[k]


def test_argument_validation():
    with pytest.raises(ValueError):
        total_degree_set(0, 1)
    with pytest.raises(ValueError):
        hyperbolic_cross_set(2, -1)

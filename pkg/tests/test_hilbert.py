import itertools

import pytest
from hypothesis import given, strategies as st

from entwit.errors import DomainError
from entwit.hilbert import (
    LocalPair,
    excitation_label,
    flat_index,
    subset_swap_label,
    unflatten,
)


def enumeration_position(digits, dims):
    """Position of ``digits`` in itertools.product order (row-major by definition)."""
    for k, label in enumerate(itertools.product(*(range(d) for d in dims))):
        if label == tuple(digits):
            return k
    raise AssertionError("label not found")


@pytest.mark.parametrize("digits,dims,expected", [
    ([0, 0, 0], [2, 2, 2], 0),
    ([1, 1, 1], [2, 2, 2], 7),
    ([1, 0, 2], [2, 3, 3], 11),
])
def test_flat_index_examples(digits, dims, expected):
    assert enumeration_position(digits, dims) == expected
    assert flat_index(digits, dims) == expected


def test_flat_index_rejects_out_of_range_digit():
    with pytest.raises(DomainError):
        flat_index([0, 3], [2, 3])


dims_st = st.lists(st.integers(2, 4), min_size=2, max_size=6)


@given(dims_st, st.data())
def test_flatten_roundtrip(dims, data):
    D = 1
    for d in dims:
        D *= d
    k = data.draw(st.integers(0, D - 1))
    assert flat_index(unflatten(k, dims), dims) == k


def test_flat_matches_enumeration_everywhere():
    dims = [2, 3, 2]
    for k, label in enumerate(itertools.product(*(range(d) for d in dims))):
        assert flat_index(label, dims) == k
        assert unflatten(k, dims) == label


# sites are 0-based: {1} is the second site
@pytest.mark.parametrize("dims,lp,excited,expected", [
    ([2, 2, 2], LocalPair.uniform(3), {1}, (0, 1, 0)),
    ([2, 2, 2], LocalPair.uniform(3), {0, 2}, (1, 0, 1)),
    ([3, 3], LocalPair.uniform(2, 0, 2), set(), (0, 0)),
    ([3, 3], LocalPair.uniform(2, 0, 2), {0, 1}, (2, 2)),
])
def test_excitation_label(dims, lp, excited, expected):
    assert excitation_label(dims, lp, excited) == expected


def test_excitation_label_bad_site():
    with pytest.raises(DomainError):
        excitation_label([2, 2], LocalPair.uniform(2), {2})


def test_local_pair_rejects_equal_levels():
    with pytest.raises(DomainError):
        LocalPair((0, 1), (1, 1))


@given(st.integers(2, 6), st.data())
def test_single_excitation_differs_in_one_digit(n, data):
    i = data.draw(st.integers(0, n - 1))
    lp = LocalPair.uniform(n)
    a = excitation_label([2] * n, lp)
    b = excitation_label([2] * n, lp, {i})
    assert sum(x != y for x, y in zip(a, b)) == 1


@pytest.mark.parametrize("a,b,sites,expected", [
    ((0, 0, 0), (1, 1, 1), {0}, ((1, 0, 0), (0, 1, 1))),
    ((0, 1, 1), (1, 0, 2), set(), ((0, 1, 1), (1, 0, 2))),
    ((0, 1), (2, 0), {0, 1}, ((2, 0), (0, 1))),
])
def test_subset_swap(a, b, sites, expected):
    assert subset_swap_label(a, b, sites) == expected


@given(st.lists(st.integers(0, 3), min_size=2, max_size=6), st.data())
def test_subset_swap_is_involution(a, data):
    n = len(a)
    b = data.draw(st.lists(st.integers(0, 3), min_size=n, max_size=n))
    sites = data.draw(st.sets(st.integers(0, n - 1)))
    once = subset_swap_label(a, b, sites)
    assert subset_swap_label(*once, sites) == (tuple(a), tuple(b))

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from polarwiretap.transform import (
    bit_reversal_permutation,
    butterfly,
    check_length,
    polar_encode,
    polar_transform_matrix,
)

from conftest import dense_polar_matrix


def test_length_check():
    assert check_length(1) == 0
    assert check_length(1024) == 10
    for bad in (0, 3, 6, -4):
        with pytest.raises(ValueError):
            check_length(bad)


def test_bit_reversal_small():
    assert bit_reversal_permutation(0).tolist() == [0]
    assert bit_reversal_permutation(2).tolist() == [0, 2, 1, 3]
    assert bit_reversal_permutation(3).tolist() == [0, 4, 2, 6, 1, 5, 3, 7]


@pytest.mark.parametrize("m", range(0, 11))
def test_bit_reversal_is_involution(m):
    s = bit_reversal_permutation(m)
    assert np.array_equal(s[s], np.arange(1 << m))


def test_two_bit_examples():
    assert polar_encode([1, 0]).tolist() == [1, 0]
    assert polar_encode([0, 1]).tolist() == [1, 1]
    assert polar_encode([1, 1]).tolist() == [0, 1]


def test_dense_matrix_m2():
    G2 = np.array([[1, 0], [1, 1]])
    P4 = np.eye(4, dtype=int)[[0, 2, 1, 3]]
    assert np.array_equal(polar_transform_matrix(2), P4 @ np.kron(G2, G2))


@pytest.mark.parametrize("m", range(0, 9))
def test_dense_matrix_matches_oracle(m):
    assert np.array_equal(polar_transform_matrix(m), dense_polar_matrix(m))


def test_dense_guard():
    with pytest.raises(ValueError):
        polar_transform_matrix(13)


@pytest.mark.parametrize("m", [1, 4, 7, 10])
def test_fast_equals_dense(m, rng):
    G = dense_polar_matrix(m)
    v = rng.integers(0, 2, (200, 1 << m))
    assert np.array_equal(polar_encode(v), (v @ G) % 2)


def test_batch_shapes_preserved(rng):
    v = rng.integers(0, 2, (3, 5, 16))
    x = polar_encode(v)
    assert x.shape == v.shape and x.dtype == np.uint8
    assert np.array_equal(x[1, 2], polar_encode(v[1, 2]))


def test_rejects_non_bits():
    with pytest.raises(ValueError):
        polar_encode([0, 2])
    with pytest.raises(ValueError):
        polar_encode([0, 1, 1])


def test_butterfly_input_untouched(rng):
    u = rng.integers(0, 2, 32).astype(np.uint8)
    keep = u.copy()
    butterfly(u)
    assert np.array_equal(u, keep)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 9), st.data())
def test_involution_and_linearity(m, data):
    n = 1 << m
    a = np.array(data.draw(st.lists(st.integers(0, 1), min_size=n, max_size=n)), dtype=np.uint8)
    b = np.array(data.draw(st.lists(st.integers(0, 1), min_size=n, max_size=n)), dtype=np.uint8)
    assert np.array_equal(polar_encode(polar_encode(a)), a)
    assert np.array_equal(polar_encode(a ^ b), polar_encode(a) ^ polar_encode(b))

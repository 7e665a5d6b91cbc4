import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from uavids.errors import ShapeError
from uavids.numkernel import gaussian_matrix, matmul, seeded_rng, tanh_map


def triple_loop(a, b):
    out = np.zeros((a.shape[0], b.shape[1]))
    for i in range(a.shape[0]):
        for j in range(b.shape[1]):
            s = 0.0
            for k in range(a.shape[1]):
                s += a[i, k] * b[k, j]
            out[i, j] = s
    return out


def test_matmul_identity():
    m = [[1.0, 2.0], [3.0, 4.0]]
    np.testing.assert_array_equal(matmul(np.eye(2), m), m)


def test_matmul_hand():
    assert matmul([[1, 2]], [[3], [4]]).tolist() == [[11.0]]


def test_matmul_matches_triple_loop(rng):
    a = rng.normal(size=(3, 4))
    b = rng.normal(size=(4, 2))
    np.testing.assert_allclose(matmul(a, b), triple_loop(a, b), rtol=1e-12, atol=1e-14)


def test_matmul_shape_error():
    with pytest.raises(ShapeError):
        matmul(np.ones((2, 3)), np.ones((2, 3)))


def test_matmul_leaves_inputs_alone(rng):
    a, b = rng.normal(size=(3, 3)), rng.normal(size=(3, 3))
    a0, b0 = a.copy(), b.copy()
    matmul(a, b)
    np.testing.assert_array_equal(a, a0)
    np.testing.assert_array_equal(b, b0)


@settings(max_examples=50, deadline=None)
@given(st.integers(1, 6), st.integers(1, 6), st.integers(1, 6), st.integers(1, 6), st.integers(0, 2**32))
def test_matmul_associative(n, m, p, q, seed):
    r = np.random.default_rng(seed)
    a, b, c = r.normal(size=(n, m)), r.normal(size=(m, p)), r.normal(size=(p, q))
    left = matmul(matmul(a, b), c)
    right = matmul(a, matmul(b, c))
    scale = np.abs(a) @ np.abs(b) @ np.abs(c)
    assert np.all(np.abs(left - right) <= 1e-9 * np.maximum(scale, 1e-300))


def test_tanh_values():
    assert tanh_map([0.0]).tolist() == [0.0]
    big = tanh_map([1000.0, -1000.0])
    assert np.all(np.isfinite(big))
    assert big[0] == pytest.approx(1.0) and big[1] == pytest.approx(-1.0)
    # reference value from 30-digit mpmath evaluation
    assert tanh_map([0.5])[0] == pytest.approx(0.462117157260009758, rel=1e-15)


@given(arrays(np.float64, st.integers(0, 20), elements=st.floats(-1e6, 1e6)))
def test_tanh_odd_and_bounded(v):
    np.testing.assert_array_equal(tanh_map(-v), -tanh_map(v))
    assert np.all(np.abs(tanh_map(v)) <= 1.0)


def test_gaussian_deterministic():
    a = gaussian_matrix(seeded_rng(42), 5, 7, 0.3)
    b = gaussian_matrix(seeded_rng(42), 5, 7, 0.3)
    assert a.tobytes() == b.tobytes()


def test_gaussian_statistics():
    x = gaussian_matrix(seeded_rng(3), 100_000, 1, 1.0).ravel()
    assert abs(x.mean()) < 0.02
    assert abs(x.std() - 1.0) < 0.02


def test_gaussian_empty_and_bad_stddev():
    assert gaussian_matrix(seeded_rng(1), 0, 4, 1.0).shape == (0, 4)
    with pytest.raises(ValueError):
        gaussian_matrix(seeded_rng(1), 2, 2, 0.0)


def test_substreams_differ():
    assert seeded_rng(1, 0).random() != seeded_rng(1, 1).random()
    assert seeded_rng(1, 5).random() == seeded_rng(1, 5).random()

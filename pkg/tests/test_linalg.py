"""Complex matrix kernel checks against naive oracles."""

import numpy as np
import pytest

from difprec import linalg
from difprec.linalg import SingularMatrixError


def rand_cmatrix(rng, n, m=None):
    m = n if m is None else m
    return rng.standard_normal((n, m)) + 1j * rng.standard_normal((n, m))


def matmul_oracle(a, b):
    """Entry-wise triple loop."""
    n, k = a.shape
    k2, m = b.shape
    out = np.zeros((n, m), dtype=complex)
    for i in range(n):
        for j in range(m):
            for t in range(k):
                out[i, j] += a[i, t] * b[t, j]
    return out


def test_hermitian_definition():
    m = linalg.cmatrix([[1, 1j], [0, 2]])
    expected = np.array([[1, 0], [-1j, 2]])
    assert np.array_equal(linalg.hermitian(m), expected)


def test_hermitian_identity_and_involution():
    eye = np.eye(3, dtype=complex)
    assert np.array_equal(linalg.hermitian(eye), eye)
    rng = np.random.default_rng(1)
    m = rand_cmatrix(rng, 3, 4)
    assert np.array_equal(linalg.hermitian(linalg.hermitian(m)), m)


def test_matmul_identity_and_permutation():
    rng = np.random.default_rng(2)
    m = rand_cmatrix(rng, 2)
    assert np.allclose(linalg.matmul(np.eye(2, dtype=complex), m), m)
    p = linalg.cmatrix([[0, 1], [1, 0]])
    assert np.array_equal(linalg.matmul(p, p), np.eye(2))


def test_matmul_against_triple_loop():
    rng = np.random.default_rng(3)
    for _ in range(5):
        a, b = rand_cmatrix(rng, 3), rand_cmatrix(rng, 3)
        assert np.allclose(linalg.matmul(a, b), matmul_oracle(a, b), rtol=1e-13)


def test_matmul_dimension_mismatch():
    with pytest.raises(ValueError):
        linalg.matmul(np.eye(2, dtype=complex), np.eye(3, dtype=complex))


def test_inverse_trivial_cases():
    assert np.allclose(linalg.inverse(np.eye(3, dtype=complex)), np.eye(3))
    inv = linalg.inverse(linalg.cmatrix([[2, 0], [0, 1j]]))
    assert np.allclose(inv, np.diag([0.5, -1j]))


def test_inverse_residual_small():
    rng = np.random.default_rng(4)
    for _ in range(20):
        m = rand_cmatrix(rng, 4)
        res = linalg.matmul(m, linalg.inverse(m)) - np.eye(4)
        assert np.sqrt(linalg.frob_norm_sq(res)) <= 1e-9 * np.sqrt(linalg.frob_norm_sq(m))


def test_inverse_singular_raises():
    sing = linalg.cmatrix([[1, 1], [1, 1]])
    with pytest.raises(SingularMatrixError):
        linalg.inverse(sing)
    with pytest.raises(SingularMatrixError):
        linalg.inverse(linalg.cmatrix([[1, 2, 3], [4, 5, 6], [5, 7, 9]]))


def test_det_trivial_and_closed_form():
    assert linalg.det(np.eye(3, dtype=complex)) == 1
    assert linalg.det(linalg.cmatrix([[2, 0], [0, 3]])) == 6
    rng = np.random.default_rng(5)
    for _ in range(20):
        m = rand_cmatrix(rng, 2)
        oracle = m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0]
        assert abs(linalg.det(m) - oracle) <= 1e-12 * abs(oracle)


def test_det_singular_is_zero():
    assert linalg.det(linalg.cmatrix([[1, 1], [1, 1]])) == 0
    assert linalg.det(linalg.cmatrix([[1, 2, 3], [2, 4, 6], [0, 1, 1]])) == 0


def test_fast_paths_agree_with_lu():
    rng = np.random.default_rng(6)
    for _ in range(50):
        m = rand_cmatrix(rng, 2)
        assert abs(linalg.det(m) - linalg._lu_det(m)) <= 1e-12 * max(1.0, abs(linalg.det(m)))
        assert np.max(np.abs(linalg.inverse(m) - linalg._lu_inverse(m))) <= 1e-12 * np.max(
            np.abs(linalg.inverse(m))
        )


def test_det_multiplicative():
    rng = np.random.default_rng(7)
    for n in (2, 3, 4):
        for _ in range(10):
            a, b = rand_cmatrix(rng, n), rand_cmatrix(rng, n)
            lhs = linalg.det(linalg.matmul(a, b))
            rhs = linalg.det(a) * linalg.det(b)
            assert abs(lhs - rhs) <= 1e-9 * abs(rhs)


def test_trace_and_frobenius():
    assert linalg.trace(np.eye(5, dtype=complex)) == 5
    assert linalg.frob_norm_sq(linalg.cmatrix([[1, 1j]])) == 2.0
    rng = np.random.default_rng(8)
    m = rand_cmatrix(rng, 3, 5)
    assert np.isclose(linalg.frob_norm_sq(m), np.sum(np.abs(m) ** 2), rtol=1e-15)
    # frob_norm_sq(m) = trace(gram(m)) for any shape
    assert np.isclose(linalg.frob_norm_sq(m), linalg.trace(linalg.gram(m)).real, rtol=1e-13)


def test_trace_cyclic():
    rng = np.random.default_rng(9)
    for _ in range(10):
        a, b = rand_cmatrix(rng, 3), rand_cmatrix(rng, 3)
        lhs = linalg.trace(linalg.matmul(a, b))
        rhs = linalg.trace(linalg.matmul(b, a))
        assert abs(lhs - rhs) <= 1e-10 * max(1.0, abs(rhs))


def test_gram_of_unitary_is_identity():
    rng = np.random.default_rng(10)
    q, _ = np.linalg.qr(rand_cmatrix(rng, 4))
    assert np.allclose(linalg.gram(q), np.eye(4), atol=1e-12)


def test_cmatrix_validation():
    with pytest.raises(ValueError):
        linalg.cmatrix([1, 2, 3])
    with pytest.raises(ValueError):
        linalg.cmatrix([[np.inf, 0], [0, 1]])

import math

import numpy as np
import pytest

from ilssvm.kernel import KernelSpec, centering_matrix, gram, gram_cross, kernel_eval


def test_rbf_same_point_is_one():
    u = np.array([0.3, -0.7, 2.0])
    assert kernel_eval(KernelSpec("rbf", width=0.5), u, u) == 1.0


def test_linear_dot_product():
    assert kernel_eval(KernelSpec("linear"), np.array([1.0, 2.0]), np.array([3.0, 4.0])) == 11.0


def test_rbf_hand_value():
    # width 1, points 0 and 2: exp(-4 / 2) = exp(-2)
    v = kernel_eval(KernelSpec("rbf", width=1.0), np.array([0.0]), np.array([2.0]))
    assert v == pytest.approx(math.exp(-2.0), rel=1e-15)


def test_polynomial_kernel():
    v = kernel_eval(KernelSpec("polynomial", degree=2, offset=1.0), np.array([1.0, 1.0]), np.array([2.0, 0.0]))
    assert v == 9.0  # (2 + 1)^2


def test_kernel_eval_dimension_mismatch():
    with pytest.raises(ValueError, match="dimension"):
        kernel_eval(KernelSpec("linear"), np.array([1.0]), np.array([1.0, 2.0]))


def test_spec_validation():
    with pytest.raises(ValueError):
        KernelSpec("rbf", width=0.0)
    with pytest.raises(ValueError):
        KernelSpec("polynomial", degree=0)
    with pytest.raises(ValueError):
        KernelSpec("sigmoid")


def test_gram_unit_diagonal_rbf():
    X = np.random.default_rng(0).normal(size=(12, 3))
    G = gram(KernelSpec("rbf", width=1.3), X)
    assert np.array_equal(np.diag(G), np.ones(12))


def test_gram_matches_kernel_eval():
    rng = np.random.default_rng(1)
    X = rng.normal(size=(8, 2))
    for spec in (KernelSpec("rbf", width=0.7), KernelSpec("linear"), KernelSpec("polynomial", degree=3, offset=0.5)):
        G = gram(spec, X)
        for i in range(8):
            for j in range(i, 8):
                assert G[i, j] == pytest.approx(kernel_eval(spec, X[i], X[j]), rel=1e-12)


def test_gram_bitwise_symmetric():
    rng = np.random.default_rng(2)
    X = rng.normal(size=(20, 4))
    for spec in (KernelSpec("rbf", width=2.0), KernelSpec("linear"), KernelSpec("polynomial")):
        G = gram(spec, X)
        assert np.array_equal(G, G.T)


def test_linear_gram_of_identity_rows():
    X = np.eye(4)
    G = gram(KernelSpec("linear"), X)
    assert np.array_equal(G, np.eye(4))


def test_rbf_gram_psd_eigen_oracle():
    rng = np.random.default_rng(3)
    for trial in range(5):
        X = rng.normal(size=(rng.integers(5, 50), rng.integers(1, 6)))
        G = gram(KernelSpec("rbf", width=float(rng.uniform(0.3, 3.0))), X)
        assert np.linalg.eigvalsh(G).min() >= -1e-10


def test_gram_cross_consistency():
    rng = np.random.default_rng(4)
    A = rng.normal(size=(6, 3))
    B = rng.normal(size=(4, 3))
    spec = KernelSpec("rbf", width=1.1)
    K = gram_cross(spec, A, B)
    assert K.shape == (6, 4)
    for i in range(6):
        for j in range(4):
            assert K[i, j] == pytest.approx(kernel_eval(spec, A[i], B[j]), rel=1e-12)


def test_centering_n1():
    assert np.array_equal(centering_matrix(1), np.array([[0.0]]))


def test_centering_n2():
    assert np.array_equal(centering_matrix(2), np.array([[0.5, -0.5], [-0.5, 0.5]]))


def test_centering_annihilates_constants():
    H = centering_matrix(7)
    assert np.abs(H @ np.ones(7)).max() < 1e-15


def test_centering_idempotent_symmetric():
    for n in (1, 2, 5, 40):
        H = centering_matrix(n)
        assert np.array_equal(H, H.T)
        assert np.abs(H @ H - H).max() < 1e-12
        assert np.abs(np.ones(n) @ H).max() < 1e-12

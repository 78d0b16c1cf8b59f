"""Tests for the core Hermitian linear-algebra layer.

numpy.linalg.eigh serves as an independent oracle for the in-house
Jacobi eigensolver.
"""

import numpy as np
import pytest

from loewner_lab.errors import (
    BadRank,
    DimensionMismatch,
    DomainViolation,
    NonHermitianInput,
    NotAProjection,
    NotBoundedBelow,
    NotPositive,
)
from loewner_lab.hermitian import (
    compress,
    compression_inverse,
    derive_rng,
    haar_unitary,
    loewner_geq,
    matrix_from_json,
    matrix_function,
    matrix_to_json,
    operator_norm,
    psd_sqrt,
    random_hermitian,
    random_projection,
    range_projection,
    spectral_decompose,
)
from loewner_lab.interval import Interval


def rand_herm(dim, rng, scale=1.0):
    Z = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    return scale * (Z + Z.conj().T) / 2.0


def test_spectral_decompose_identity():
    dec = spectral_decompose(np.eye(3))
    assert np.allclose(dec.eigenvalues, [1.0, 1.0, 1.0], atol=1e-14)


def test_spectral_decompose_diagonal():
    dec = spectral_decompose(np.diag([3.0, 1.0]))
    assert np.allclose(dec.eigenvalues, [1.0, 3.0], atol=1e-14)


def test_spectral_decompose_reconstruction():
    rng = np.random.default_rng(7)
    for _ in range(20):
        H = rand_herm(6, rng, scale=3.0)
        dec = spectral_decompose(H)
        scale = operator_norm(H)
        assert operator_norm(dec.reconstruct() - H) < 1e-10 * max(scale, 1.0)
        U = dec.basis
        assert operator_norm(U.conj().T @ U - np.eye(6)) < 1e-10
        # eigenvalues agree with the independent oracle
        w_oracle = np.linalg.eigvalsh(H)
        assert np.allclose(dec.eigenvalues, w_oracle, atol=1e-10 * max(scale, 1.0))


def test_spectral_decompose_rejects_nonhermitian():
    with pytest.raises(NonHermitianInput):
        spectral_decompose(np.array([[0.0, 1.0], [0.0, 0.0]]))


def test_operator_norm_basics():
    assert operator_norm(np.zeros((3, 3))) == 0.0
    assert abs(operator_norm(np.diag([2.0, -3.0])) - 3.0) < 1e-12
    assert abs(operator_norm(np.array([[3.0], [4.0]])) - 5.0) < 1e-12


def test_operator_norm_matches_svd():
    rng = np.random.default_rng(11)
    for _ in range(20):
        X = rng.normal(size=(5, 3)) + 1j * rng.normal(size=(5, 3))
        assert abs(operator_norm(X) - np.linalg.norm(X, 2)) < 1e-10


def test_loewner_geq():
    A = np.diag([2.0, 2.0])
    assert loewner_geq(A, A)
    assert loewner_geq(A, np.eye(2))
    # lambda_min of [[0,1],[1,1]] is (1 - sqrt(5))/2 < 0
    assert not loewner_geq(np.ones((2, 2)), np.diag([1.0, 0.0]))
    with pytest.raises(DimensionMismatch):
        loewner_geq(np.eye(2), np.eye(3))


def test_loewner_geq_transitive_chain():
    rng = np.random.default_rng(3)
    for _ in range(10):
        A = rand_herm(4, rng)
        G1 = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
        G2 = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
        B = A - G1.conj().T @ G1
        C = B - G2.conj().T @ G2
        assert loewner_geq(A, B) and loewner_geq(B, C) and loewner_geq(A, C)


def test_psd_sqrt():
    R = psd_sqrt(np.diag([4.0, 9.0]))
    assert np.allclose(R, np.diag([2.0, 3.0]), atol=1e-12)
    assert np.allclose(psd_sqrt(np.zeros((2, 2))), np.zeros((2, 2)))
    rng = np.random.default_rng(5)
    for _ in range(10):
        X = rng.normal(size=(5, 5)) + 1j * rng.normal(size=(5, 5))
        G = X.conj().T @ X
        R = psd_sqrt(G)
        assert operator_norm(R @ R - G) < 1e-10 * max(operator_norm(G), 1.0)
    with pytest.raises(NotPositive):
        psd_sqrt(np.diag([1.0, -0.5]))


def test_matrix_function():
    rng = np.random.default_rng(9)
    H = rand_herm(4, rng)
    assert operator_norm(matrix_function(lambda x: x, H) - H) < 1e-10
    assert np.allclose(matrix_function(lambda x: x * x, np.diag([1.0, 2.0])), np.diag([1.0, 4.0]))
    H2 = np.array([[2.0, 1.0], [1.0, 2.0]])
    inv = matrix_function(lambda x: 1.0 / x, H2)
    assert np.allclose(inv, np.linalg.inv(H2), atol=1e-12)
    with pytest.raises(DomainViolation):
        matrix_function(lambda x: 1.0 / x, np.diag([1.0, -1.0]), domain=Interval.open(0.0, np.inf))


def test_compress():
    H = np.array([[1.0, 2.0], [2.0, 3.0]])
    assert np.allclose(compress(np.eye(2), H), H)
    assert np.allclose(compress(np.zeros((2, 2)), H), np.zeros((2, 2)))
    assert np.allclose(compress(np.diag([1.0, 0.0]), H), np.diag([1.0, 0.0]))


def test_compression_inverse():
    H = np.diag([5.0, 7.0])
    G = compression_inverse(np.eye(2), H, eta=1.0)
    assert np.allclose(G, np.diag([0.2, 1.0 / 7.0]), atol=1e-12)
    G = compression_inverse(np.diag([1.0, 0.0]), H, eta=1.0)
    assert np.allclose(G, np.diag([0.2, 0.0]), atol=1e-12)

    rng = np.random.default_rng(13)
    for _ in range(10):
        P = random_projection(4, 2, rng)
        X = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
        H = X.conj().T @ X + 0.5 * np.eye(4)
        G = compression_inverse(P, H, eta=0.1)
        PHP = compress(P, H)
        assert operator_norm(G @ PHP - P) < 1e-9
        assert operator_norm(G @ PHP @ G - G) < 1e-8
        assert operator_norm(PHP @ G @ PHP - PHP) < 1e-8 * max(operator_norm(PHP), 1.0)
        assert operator_norm(compress(P, G) - G) < 1e-10 * max(operator_norm(G), 1.0)

    with pytest.raises(NotBoundedBelow):
        compression_inverse(np.diag([1.0, 0.0]), np.diag([0.01, 5.0]), eta=1.0)


def test_range_projection():
    assert np.allclose(range_projection(np.eye(3)), np.eye(3))
    assert np.allclose(range_projection(np.array([[1.0], [0.0]])), np.diag([1.0, 0.0]))
    rng = np.random.default_rng(17)
    for _ in range(10):
        X = rng.normal(size=(5, 3)) + 1j * rng.normal(size=(5, 3))
        Q = range_projection(X)
        assert operator_norm(Q @ X - X) < 1e-9 * max(operator_norm(X), 1.0)
        assert operator_norm(Q @ Q - Q) < 1e-10


def test_random_hermitian_eigenvalue_range():
    assert np.allclose(random_hermitian([2.0, 2.0], 1, 0), [[2.0]])
    a = random_hermitian([0.0, 1.0], 4, 42)
    b = random_hermitian([0.0, 1.0], 4, 42)
    assert np.array_equal(a, b)
    for trial in range(1000):
        H = random_hermitian([0.0, 1.0], 5, derive_rng(99, trial))
        w = np.linalg.eigvalsh(H)
        assert w[0] >= -1e-12 and w[-1] <= 1.0 + 1e-12


def test_random_projection():
    P = random_projection(5, 2, 1)
    assert np.allclose(P @ P, P, atol=1e-12)
    assert abs(np.trace(P).real - 2.0) < 1e-10
    with pytest.raises(BadRank):
        random_projection(3, 4, 0)


def test_haar_unitary_determinism_and_unitarity():
    U = haar_unitary(4, 5)
    V = haar_unitary(4, 5)
    assert np.array_equal(U, V)
    assert operator_norm(U.conj().T @ U - np.eye(4)) < 1e-12


def test_projection_validation():
    from loewner_lab.hermitian import require_projection

    require_projection(np.diag([1.0, 0.0, 1.0]))
    with pytest.raises(NotAProjection):
        require_projection(np.diag([0.5, 1.0]))


def test_matrix_json_roundtrip():
    rng = np.random.default_rng(23)
    H = rand_herm(3, rng)
    obj = matrix_to_json(H)
    back = matrix_from_json(obj)
    assert np.allclose(back, H, atol=1e-15)
    bad = matrix_to_json(np.array([[0.0, 1.0], [0.0, 0.0]]))
    with pytest.raises(NonHermitianInput):
        matrix_from_json(bad)

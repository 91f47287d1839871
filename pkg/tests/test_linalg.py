import numpy as np
import pytest

from qmarkov.errors import NotHermitian, NotPSD
from qmarkov.linalg import herm_eig, op_norm, pinv_psd, sqrt_psd


def test_herm_eig_diagonal_sorted_descending():
    w, u = herm_eig(np.diag([3.0, 1.0, 2.0]))
    assert np.allclose(w, [3.0, 2.0, 1.0])
    assert np.allclose(u.conj().T @ u, np.eye(3))


def test_herm_eig_pauli_x():
    w, _ = herm_eig(np.array([[0, 1], [1, 0]], dtype=complex))
    assert np.allclose(w, [1.0, -1.0])


def test_herm_eig_rank_one_projection_doubled():
    p = 0.5 * np.array([[1, -1j], [1j, 1]])
    # oracle: p is idempotent, so 2p has spectrum {2, 0}
    assert np.allclose(p @ p, p)
    w, _ = herm_eig(2 * p)
    assert np.allclose(w, [2.0, 0.0], atol=1e-12)


def test_herm_eig_rejects_non_hermitian():
    with pytest.raises(NotHermitian):
        herm_eig(np.array([[0, 1], [0, 0]], dtype=complex))
    with pytest.raises(NotHermitian):
        herm_eig(np.ones((2, 3)))


def test_herm_eig_reconstruction_on_random_inputs():
    rng = np.random.default_rng(3)
    for _ in range(32):
        n = int(rng.integers(1, 12))
        m = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
        h = 0.5 * (m + m.conj().T)
        w, u = herm_eig(h)
        assert np.all(np.diff(w) <= 1e-12)
        resid = op_norm(h - (u * w) @ u.conj().T)
        assert resid <= 1e-11 * max(1.0, op_norm(h))
        assert op_norm(u.conj().T @ u - np.eye(n)) <= 1e-11


def test_pinv_psd_diagonal():
    assert np.allclose(pinv_psd(np.diag([2.0, 0.0])), np.diag([0.5, 0.0]))
    assert np.allclose(pinv_psd(np.eye(3)), np.eye(3))


def test_pinv_psd_thresholds_tiny_eigenvalues():
    out = pinv_psd(np.diag([1e-15, 1.0]), rank_tol=1e-10)
    assert np.allclose(out, np.diag([0.0, 1.0]))


def test_pinv_psd_rejects_indefinite():
    with pytest.raises(NotPSD):
        pinv_psd(np.diag([1.0, -1.0]))


def test_pinv_psd_moore_penrose_on_random_gram_matrices():
    rng = np.random.default_rng(5)
    for _ in range(16):
        n = int(rng.integers(1, 8))
        m = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
        sigma = m.conj().T @ m
        pinv = pinv_psd(sigma)
        assert op_norm(sigma @ pinv @ sigma - sigma) <= 1e-10 * op_norm(sigma)
        assert op_norm(pinv @ sigma @ pinv - pinv) <= 1e-10 * op_norm(pinv)
        proj = sigma @ pinv
        assert op_norm(proj - pinv @ sigma) <= 1e-9 * max(1.0, op_norm(proj))


def test_op_norm_basics():
    assert op_norm(np.zeros((3, 3))) == 0.0
    assert abs(op_norm(np.diag([3.0, -4.0])) - 4.0) <= 1e-12
    e11 = np.zeros((2, 2)); e11[0, 0] = 1
    e12 = np.zeros((2, 2)); e12[0, 1] = 1
    e21 = np.zeros((2, 2)); e21[1, 0] = 1
    witness = np.kron(e11, e11) + np.kron(e12, e21)
    assert abs(op_norm(witness) - 1.0) <= 1e-12


def test_op_norm_submultiplicative():
    rng = np.random.default_rng(11)
    for _ in range(32):
        a = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
        b = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
        assert op_norm(a @ b) <= op_norm(a) * op_norm(b) + 1e-9


def test_sqrt_psd():
    assert np.allclose(sqrt_psd(np.diag([4.0, 9.0])), np.diag([2.0, 3.0]))
    assert np.allclose(sqrt_psd(np.eye(4)), np.eye(4))
    p = 0.5 * np.array([[1, -1j], [1j, 1]])
    assert np.allclose(p @ p, p)  # idempotent, so it is its own square root
    assert np.allclose(sqrt_psd(p), p, atol=1e-12)
    rng = np.random.default_rng(2)
    m = rng.standard_normal((5, 5)) + 1j * rng.standard_normal((5, 5))
    sigma = m.conj().T @ m
    root = sqrt_psd(sigma)
    assert op_norm(root @ root - sigma) <= 1e-10 * op_norm(sigma)


def test_sqrt_psd_rejects_indefinite():
    with pytest.raises(NotPSD):
        sqrt_psd(np.diag([1.0, -0.5]))

"""Seeded samplers for states, weights, tangents, unitaries and bases."""

from __future__ import annotations

import numpy as np

from .linalg import hermitize

__all__ = [
    "rng_from",
    "haar_unitary",
    "random_hermitian",
    "random_traceless_hermitian",
    "random_state",
    "random_weight",
    "pauli_matrices",
    "hermitian_basis",
]


def rng_from(seed) -> np.random.Generator:
    return np.random.default_rng(seed)


def haar_unitary(rng: np.random.Generator, n: int) -> np.ndarray:
    """Haar-distributed unitary via QR of a Ginibre matrix with phase fix."""
    z = (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / np.sqrt(2.0)
    q, r = np.linalg.qr(z)
    d = np.diagonal(r)
    return q * (d / np.abs(d))


def random_hermitian(rng: np.random.Generator, n: int, scale: float = 1.0) -> np.ndarray:
    z = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    return hermitize(z) * (scale / np.sqrt(2.0))


def random_traceless_hermitian(
    rng: np.random.Generator, n: int, scale: float = 1.0
) -> np.ndarray:
    h = random_hermitian(rng, n, scale)
    return h - (np.trace(h) / n) * np.eye(n)


def random_state(rng: np.random.Generator, n: int, floor: float = 0.05) -> np.ndarray:
    """Random density matrix with all eigenvalues >= floor.

    Eigenvalues are a uniform simplex draw shrunk toward the maximally mixed
    point so the floor holds, conjugated by a Haar unitary.
    """
    if not 0.0 <= floor * n < 1.0:
        raise ValueError(f"floor {floor} infeasible for dimension {n}")
    u = rng.dirichlet(np.ones(n))
    lam = (1.0 - n * floor) * u + floor
    q = haar_unitary(rng, n)
    return hermitize((q * lam) @ q.conj().T)


def random_weight(
    rng: np.random.Generator, n: int, lo: float = 0.3, hi: float = 2.0
) -> np.ndarray:
    """Random positive-definite matrix with spectrum in [lo, hi]."""
    lam = rng.uniform(lo, hi, size=n)
    q = haar_unitary(rng, n)
    return hermitize((q * lam) @ q.conj().T)


def pauli_matrices():
    """(I, X, Y, Z) as complex arrays."""
    i2 = np.eye(2, dtype=complex)
    sx = np.array([[0, 1], [1, 0]], dtype=complex)
    sy = np.array([[0, -1j], [1j, 0]], dtype=complex)
    sz = np.array([[1, 0], [0, -1]], dtype=complex)
    return i2, sx, sy, sz


def hermitian_basis(n: int) -> list:
    """Hilbert-Schmidt orthonormal basis of the n x n self-adjoint matrices.

    Diagonal units E_kk, then (E_kl + E_lk)/sqrt(2) and i(E_kl - E_lk)/sqrt(2)
    for k < l; n*n elements in total.
    """
    out = []
    for k in range(n):
        e = np.zeros((n, n), dtype=complex)
        e[k, k] = 1.0
        out.append(e)
    s = 1.0 / np.sqrt(2.0)
    for k in range(n):
        for l in range(k + 1, n):
            e = np.zeros((n, n), dtype=complex)
            e[k, l] = e[l, k] = s
            out.append(e)
            e = np.zeros((n, n), dtype=complex)
            e[k, l] = -1j * s
            e[l, k] = 1j * s
            out.append(e)
    return out

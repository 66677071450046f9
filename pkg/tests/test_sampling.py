import numpy as np
import pytest

from qiglab.sampling import (
    haar_unitary,
    hermitian_basis,
    pauli_matrices,
    random_hermitian,
    random_state,
    random_traceless_hermitian,
    random_weight,
    rng_from,
)


def test_rng_from_is_deterministic_and_accepts_sequences():
    a = rng_from(3).standard_normal(4)
    b = rng_from(3).standard_normal(4)
    np.testing.assert_array_equal(a, b)
    c = rng_from([3, 7]).standard_normal(4)
    assert not np.array_equal(a, c)


@pytest.mark.parametrize("n", [2, 3, 4])
def test_hermitian_basis_is_orthonormal(n):
    basis = hermitian_basis(n)
    assert len(basis) == n * n
    for i, x in enumerate(basis):
        np.testing.assert_allclose(x, x.conj().T, atol=1e-14)
        for j, y in enumerate(basis):
            want = 1.0 if i == j else 0.0
            assert np.trace(x.conj().T @ y).real == pytest.approx(want, abs=1e-13)


def test_pauli_matrices_square_to_identity():
    i2, sx, sy, sz = pauli_matrices()
    for s in (sx, sy, sz):
        np.testing.assert_allclose(s @ s, i2, atol=1e-15)
    np.testing.assert_allclose(sx @ sy, 1j * sz, atol=1e-15)


def test_haar_unitary_is_unitary():
    u = haar_unitary(rng_from(1), 4)
    np.testing.assert_allclose(u.conj().T @ u, np.eye(4), atol=1e-12)


def test_random_hermitian_and_traceless():
    rng = rng_from(2)
    h = random_hermitian(rng, 3)
    np.testing.assert_allclose(h, h.conj().T, atol=1e-14)
    t = random_traceless_hermitian(rng, 3)
    assert abs(np.trace(t)) < 1e-13
    np.testing.assert_allclose(t, t.conj().T, atol=1e-14)


def test_random_state_spectrum_floor():
    rng = rng_from(4)
    for n in (2, 3, 4):
        rho = random_state(rng, n, floor=0.05)
        lam = np.linalg.eigvalsh(rho)
        assert np.trace(rho).real == pytest.approx(1.0, abs=1e-12)
        assert lam.min() >= 0.05 / n - 1e-12


def test_random_weight_respects_bounds():
    rng = rng_from(5)
    w = random_weight(rng, 3, lo=0.5, hi=2.0)
    lam = np.linalg.eigvalsh(w)
    assert lam.min() >= 0.5 - 1e-12
    assert lam.max() <= 2.0 + 1e-12

import numpy as np
import pytest

from qiglab.connections import (
    CurveSpec,
    convex_mixture_derivative,
    covariant_derivative_on_M,
    ext_covariant_derivative,
    parallel_transport_ext,
    parallel_transport_on_M,
)
from qiglab.manifold import (
    affine_coordinates,
    alpha_representation,
    linear_family,
    simplex_family,
    sphere_project,
    state_tangent,
    xi_affine_family,
)
from qiglab.sampling import pauli_matrices, rng_from

I2, SX, SY, SZ = pauli_matrices()
QUBIT_BASIS = [I2, SX, SY, SZ]


def _bloch_family():
    return linear_family(I2 / 2.0, [SX / 2.0, SY / 2.0])


def _bloch_curve(start, end, step_count=256):
    start = np.asarray(start, dtype=float)
    end = np.asarray(end, dtype=float)
    return CurveSpec(_bloch_family(), lambda t: start + t * (end - start), step_count)


# ------------------------------------------------- flat covariant derivative


@pytest.mark.parametrize("alpha", [-0.5, 0.0, 0.5])
def test_ext_derivative_vanishes_in_matched_affine_chart(alpha):
    sigma = np.diag([0.7, 0.5]).astype(complex)
    xi0 = affine_coordinates(sigma, alpha, QUBIT_BASIS)
    fam = xi_affine_family(QUBIT_BASIS, alpha)
    for i in range(4):
        for j in range(i, 4):
            res = ext_covariant_derivative(fam, xi0, i, j, alpha)
            assert np.abs(res.vector.mixture).max() < 1e-10


def test_ext_derivative_nonzero_in_mismatched_chart():
    sigma = np.diag([0.7, 0.5]).astype(complex)
    xi0 = affine_coordinates(sigma, 0.0, QUBIT_BASIS)
    fam = xi_affine_family(QUBIT_BASIS, 0.0)
    res = ext_covariant_derivative(fam, xi0, 1, 1, 0.8)
    assert np.abs(res.vector.mixture).max() > 1e-3


def test_ext_derivative_analytic_matches_fd_chart():
    basis = [I2, SX, SZ]
    xi0 = affine_coordinates(np.diag([0.8, 0.6]).astype(complex), 0.4, basis)
    exact = xi_affine_family(basis, 0.4, analytic=True)
    fd = xi_affine_family(basis, 0.4, analytic=False)
    for i in range(3):
        for j in range(i, 3):
            a = ext_covariant_derivative(exact, xi0, i, j, -0.2)
            b = ext_covariant_derivative(fd, xi0, i, j, -0.2)
            np.testing.assert_allclose(a.vector.mixture, b.vector.mixture, atol=1e-5)


# -------------------------------------------- projected covariant derivative


@pytest.mark.parametrize("alpha", [-1.0, -0.3, 0.0, 0.6, 1.0])
def test_on_m_derivative_is_state_tangent(alpha):
    fam = _bloch_family()
    theta = np.array([0.2, -0.15])
    res = covariant_derivative_on_M(fam, theta, 0, 1, alpha)
    assert abs(np.trace(res.vector.mixture)) < 1e-12
    # its alpha representation is fixed by the tangent-space projection
    rep = alpha_representation(res.vector, alpha)
    np.testing.assert_allclose(sphere_project(res.base, alpha, rep), rep, atol=1e-10)


def test_on_m_rejects_weight_family():
    fam = linear_family(np.diag([1.0, 2.0]).astype(complex), [SX])
    with pytest.raises(ValueError, match="unit-trace"):
        covariant_derivative_on_M(fam, np.array([0.1]), 0, 0, 0.0)


@pytest.mark.parametrize("alpha", [-1.0, 1.0])
def test_convex_mixture_matches_endpoints(alpha):
    fam = _bloch_family()
    theta = np.array([0.25, 0.1])
    mixed = convex_mixture_derivative(fam, theta, 0, 1, alpha)
    direct = covariant_derivative_on_M(fam, theta, 0, 1, alpha)
    np.testing.assert_allclose(mixed.vector.mixture, direct.vector.mixture, atol=1e-12)


@pytest.mark.parametrize("alpha", [-0.5, 0.0, 0.5])
def test_convex_mixture_exact_on_simplex(alpha):
    # commuting (classical) case: the order-alpha derivative is exactly the
    # convex combination of the two extreme ones
    fam = simplex_family(3)
    theta = np.array([0.5, 0.3])
    for i in range(2):
        for j in range(i, 2):
            mixed = convex_mixture_derivative(fam, theta, i, j, alpha)
            direct = covariant_derivative_on_M(fam, theta, i, j, alpha)
            np.testing.assert_allclose(
                mixed.vector.mixture, direct.vector.mixture, atol=1e-12
            )


def test_convex_mixture_differs_for_noncommuting_witness():
    fam = _bloch_family()
    theta = np.array([0.25, 0.1])
    mixed = convex_mixture_derivative(fam, theta, 0, 1, 0.0)
    direct = covariant_derivative_on_M(fam, theta, 0, 1, 0.0)
    assert np.abs(mixed.vector.mixture - direct.vector.mixture).max() > 1e-4


# ------------------------------------------------------------ flat transport


def test_parallel_transport_ext_oracle():
    # I/2 -> diag(3/4, 1/4) along the z axis, carrying sigma_x at order 0:
    # the representation sqrt(2)*sigma_x is reinterpreted through the
    # divided-difference kernel 2(sqrt(3) - 1) of 2*sqrt(x)
    fam = linear_family(I2 / 2.0, [SZ / 2.0])
    curve = CurveSpec(fam, lambda t: np.array([0.5 * t]))
    v = state_tangent(I2 / 2.0, SX)
    out = parallel_transport_ext(curve, v, 0.0)
    want = (np.sqrt(2.0) / (2.0 * (np.sqrt(3.0) - 1.0))) * SX
    np.testing.assert_allclose(out.mixture, want, atol=1e-13)
    np.testing.assert_allclose(out.base, np.diag([0.75, 0.25]), atol=1e-13)


def test_parallel_transport_ext_mixture_order_is_identity():
    curve = _bloch_curve([0.3, 0.0], [0.0, 0.3])
    base = curve.point(0.0)
    v = state_tangent(base, SZ / 3.0)
    out = parallel_transport_ext(curve, v, -1.0)
    np.testing.assert_allclose(out.mixture, v.mixture, atol=1e-14)


def test_transport_rejects_foreign_start():
    curve = _bloch_curve([0.3, 0.0], [0.0, 0.3])
    v = state_tangent(I2 / 2.0, SZ)  # base is not curve.point(0)
    with pytest.raises(ValueError, match="start point"):
        parallel_transport_ext(curve, v, 0.0)
    with pytest.raises(ValueError, match="start point"):
        parallel_transport_on_M(curve, v, 0.0)


# ------------------------------------------------------- projected transport


def test_projected_transport_richardson_converges():
    # tangent mixes the in-plane and out-of-plane sectors; a pure sigma_z
    # tangent would transport exactly at any step count by reflection symmetry
    v = state_tangent(_bloch_curve([0.35, 0.0], [0.0, 0.35]).point(0.0), (SX + 0.8 * SZ) / 2.0)
    fine = parallel_transport_on_M(_bloch_curve([0.35, 0.0], [0.0, 0.35], 256), v, 0.0)
    ref = parallel_transport_on_M(_bloch_curve([0.35, 0.0], [0.0, 0.35], 4096), v, 0.0)
    np.testing.assert_allclose(fine.mixture, ref.mixture, atol=1e-7)
    # plain first-order runs halve their gap to the extrapolated answer
    p256 = parallel_transport_on_M(_bloch_curve([0.35, 0.0], [0.0, 0.35], 256), v, 0.0, richardson=False)
    p512 = parallel_transport_on_M(_bloch_curve([0.35, 0.0], [0.0, 0.35], 512), v, 0.0, richardson=False)
    e256 = np.abs(p256.mixture - ref.mixture).max()
    e512 = np.abs(p512.mixture - ref.mixture).max()
    assert 1e-6 < e256  # plain runs genuinely carry discretization error
    assert e512 < 0.6 * e256


def test_projected_transport_result_is_tangent():
    curve = _bloch_curve([0.35, 0.0], [0.0, 0.35])
    v = state_tangent(curve.point(0.0), SZ / 2.0)
    out = parallel_transport_on_M(curve, v, 0.5)
    assert abs(np.trace(out.mixture)) < 1e-12
    np.testing.assert_allclose(out.base, curve.point(1.0), atol=1e-13)


def test_projected_transport_continuity_guard():
    # one step across Frobenius distance 0.707 exceeds the 0.5 bound
    curve = CurveSpec(_bloch_family(), lambda t: np.array([1.0 - 2.0 * t, 0.0]) * 0.5, step_count=1)
    v = state_tangent(curve.point(0.0), SZ / 2.0)
    with pytest.raises(ValueError, match="too small"):
        parallel_transport_on_M(curve, v, 0.0, richardson=False)


def test_projected_transport_odd_steps_reject_richardson():
    curve = _bloch_curve([0.3, 0.0], [0.0, 0.3], step_count=3)
    v = state_tangent(curve.point(0.0), SZ / 2.0)
    with pytest.raises(ValueError, match="even step_count"):
        parallel_transport_on_M(curve, v, 0.0)


def test_projected_transport_is_path_dependent():
    # straight chord in the x-y plane vs a detour through a z-axis point;
    # an in-plane detour would give zero gap by reflection symmetry
    fam = linear_family(I2 / 2.0, [SX / 2.0, SY / 2.0, SZ / 2.0])
    start, end = np.array([0.35, 0.0, 0.0]), np.array([0.0, 0.35, 0.0])
    pole = np.array([0.0, 0.0, 0.35])

    def straight(t):
        return start + t * (end - start)

    def detour(t):
        if t <= 0.5:
            return start + 2.0 * t * (pole - start)
        return pole + (2.0 * t - 1.0) * (end - pole)

    v = state_tangent(fam.point(start), SZ / 2.0)
    direct = parallel_transport_on_M(CurveSpec(fam, straight, 256), v, 0.0)
    around = parallel_transport_on_M(CurveSpec(fam, detour, 256), v, 0.0)
    gap = np.linalg.norm(direct.mixture - around.mixture)
    assert gap > 1e-3


def test_curve_spec_rejects_zero_steps():
    with pytest.raises(ValueError, match="at least 1"):
        CurveSpec(_bloch_family(), lambda t: np.array([0.0, 0.0]), step_count=0)

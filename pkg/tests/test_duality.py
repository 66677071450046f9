import numpy as np
import pytest

from qiglab.duality import (
    classical_reduction_check,
    convexity_failure_check,
    dual_coordinate_check,
    duality_defect,
    embedding_trace_identity_gap,
    entropy_projection,
    flatness_scan,
    gibbs_family,
    kernel_direct_consistency,
    monotonicity_scan,
    path_dependence_witness,
    perturbed_wyd,
    potential_check,
    potential_value,
    qubit_bloch_family,
    relative_entropy_curvature_gap,
    sample_grid,
    standard_witness_families,
    transport_duality_check,
    uniqueness_scan,
    witness_curve,
)
from qiglab.manifold import (
    ParametrizedFamily,
    affine_coordinates,
    simplex_family,
    state_tangent,
    xi_affine_family,
)
from qiglab.metrics import (
    bures_function,
    relative_entropy,
    validate_function_spec,
    wyd_function,
)
from qiglab.sampling import (
    hermitian_basis,
    pauli_matrices,
    random_state,
    random_traceless_hermitian,
    random_weight,
    rng_from,
)

I2, SX, SY, SZ = pauli_matrices()


def _bloch_grid(seed=0, n_points=2):
    witness = standard_witness_families(2, "state")[0]
    return witness.family, sample_grid(witness, seed, n_points)


# ------------------------------------------------------------ duality defect


@pytest.mark.parametrize("alpha", [-0.5, 0.0, 0.5])
def test_matched_metric_has_tiny_defect(alpha):
    family, grid = _bloch_grid()
    rep = duality_defect(family, grid, wyd_function(0.5 * (1.0 + alpha)), alpha)
    assert rep.defect <= 5e-5


def test_bures_defect_breaks_duality():
    family, grid = _bloch_grid()
    rep = duality_defect(family, grid, bures_function(), 0.0)
    assert rep.defect >= 1e-2


def test_defect_is_linear_in_scale():
    family, grid = _bloch_grid()
    spec = bures_function()
    one = duality_defect(family, grid, spec, 0.0, scale=1.0)
    three = duality_defect(family, grid, spec, 0.0, scale=3.0)
    np.testing.assert_allclose(three.per_triple, 3.0 * one.per_triple, rtol=1e-9, atol=1e-12)
    assert three.defect == pytest.approx(3.0 * one.defect, rel=1e-9)


def test_defect_alpha_reflection_symmetry():
    # swapping alpha -> -alpha transposes the last two tensor slots
    family, grid = _bloch_grid()
    spec = bures_function()
    plus = duality_defect(family, grid, spec, 0.4)
    minus = duality_defect(family, grid, spec, -0.4)
    np.testing.assert_allclose(
        plus.per_triple, np.transpose(minus.per_triple, (0, 1, 3, 2)), atol=1e-8
    )


def test_duality_report_metadata():
    family, grid = _bloch_grid()
    rep = duality_defect(family, grid, bures_function(), 0.0, family_name="qubit-bloch")
    assert rep.metric_name == "bures"
    assert rep.family_name == "qubit-bloch"
    assert rep.per_triple.shape == (len(grid), 3, 3, 3)


def test_standard_witness_families():
    both = standard_witness_families(2, "both")
    assert {w.on_extended for w in both} == {False, True}
    with pytest.raises(ValueError, match="manifold"):
        standard_witness_families(2, "spectral")
    with pytest.raises(ValueError, match="dimension"):
        standard_witness_families(7, "state")


def test_sample_grid_is_seeded_and_bounded():
    witness = standard_witness_families(3, "state")[0]
    a = sample_grid(witness, 5, n_points=4)
    b = sample_grid(witness, 5, n_points=4)
    assert len(a) == 4
    for pa, pb in zip(a, b):
        np.testing.assert_array_equal(pa, pb)
        assert np.abs(pa).max() <= witness.grid_halfwidth + 1e-12


# --------------------------------------------------------- transport duality


def test_transport_duality_matched_is_constant():
    curve = witness_curve(128)
    base = curve.point(0.0)
    y = state_tangent(base, (SX + 0.5 * SZ) / 2.0)
    z = state_tangent(base, (SY + 0.8 * SZ) / 2.0)
    rep = transport_duality_check(curve, wyd_function(0.5), 0.0, y, z)
    assert rep.deviation <= 1e-12


def test_transport_duality_mismatched_drifts():
    curve = witness_curve(128)
    base = curve.point(0.0)
    y = state_tangent(base, (SX + 0.5 * SZ) / 2.0)
    z = state_tangent(base, (SY + 0.8 * SZ) / 2.0)
    rep = transport_duality_check(curve, bures_function(), 0.0, y, z)
    assert rep.deviation >= 1e-3


def test_transport_duality_rejects_foreign_tangents():
    curve = witness_curve(64)
    y = state_tangent(I2 / 2.0, SX)  # not the curve start
    with pytest.raises(ValueError, match="start point"):
        transport_duality_check(curve, wyd_function(0.5), 0.0, y, y)


# ------------------------------------------------------ potential and duals


def _potential_grid(alpha, dim=2, n_points=7, seed=44):
    rng = rng_from(seed)
    basis = hermitian_basis(dim)
    family = xi_affine_family(basis, alpha, analytic=True)
    points = [
        affine_coordinates(random_weight(rng, dim, 0.7, 1.5), alpha, basis)
        for _ in range(n_points)
    ]
    return family, points, basis


@pytest.mark.parametrize("alpha", [-0.5, 0.0, 0.5])
def test_potential_hessian_matches_metric(alpha):
    family, points, basis = _potential_grid(alpha)
    rep = potential_check(family, alpha, points, basis)
    assert rep.residual <= 1e-5
    assert rep.gradient_residual <= 1e-6
    assert rep.n_points == len(points)
    np.testing.assert_allclose(rep.hessian, rep.hessian.T, atol=1e-8)


def test_potential_check_rejects_mismatched_chart():
    family, points, basis = _potential_grid(0.0)
    with pytest.raises(ValueError, match="not affine"):
        potential_check(family, 0.8, points, basis)


def test_potential_check_needs_enough_points():
    family, points, basis = _potential_grid(0.0)
    with pytest.raises(ValueError, match="grid points"):
        potential_check(family, 0.0, points[:3], basis)


def test_potential_value_domain():
    assert potential_value(I2, 1.0) == pytest.approx(2.0)
    assert potential_value(I2, 0.0) == pytest.approx(4.0)
    with pytest.raises(ValueError, match="alpha"):
        potential_value(I2, -1.0)


@pytest.mark.parametrize("alpha", [-0.5, 0.5])
def test_dual_coordinates_jacobian_and_legendre(alpha):
    family, points, basis = _potential_grid(alpha)
    rep = dual_coordinate_check(family, alpha, points[:3], seed=9)
    assert rep.jacobian_residual <= 1e-5
    assert rep.legendre_residual <= 1e-5


# ------------------------------------------------------------ uniqueness scan


def test_uniqueness_scan_default_battery():
    result = uniqueness_scan(0.0)
    assert result.uniqueness_supported
    assert result.wyd_minimal
    assert result.inconclusive_names == ()
    by_expectation = {e.name: e for e in result.entries}
    assert by_expectation["bures"].status == "fail"
    assert by_expectation["rld"].status == "fail"
    assert by_expectation["bkm"].status == "fail"
    matched = [e for e in result.entries if e.expected_dual and e.scale == 1.0]
    scaled = [e for e in result.entries if e.expected_dual and e.scale != 1.0]
    assert len(matched) == 1 and matched[0].status == "pass"
    assert len(scaled) == 1 and scaled[0].status == "pass"
    # duality is insensitive to a constant rescaling of the metric
    assert scaled[0].defect == pytest.approx(3.0 * matched[0].defect, rel=1e-6)
    bumps = [e for e in result.entries if "bump" in e.name]
    assert len(bumps) == 2
    assert all(e.status == "fail" for e in bumps)


def test_uniqueness_scan_rejects_endpoint_alpha():
    with pytest.raises(ValueError, match="strictly inside"):
        uniqueness_scan(1.0)


def test_perturbed_wyd_is_admissible_but_not_dual():
    spec = perturbed_wyd(0.5, amplitude=0.2, center=0.8, width=0.5)
    validate_function_spec(spec)  # normalized and symmetric by construction
    assert not spec.claimed_monotone
    assert spec(2.0) != pytest.approx(wyd_function(0.5)(2.0), rel=1e-3)


# ------------------------------------------- convexity, flatness, curvature


def test_convexity_identity_on_diagonal_family():
    fam = simplex_family(3)
    grid = [np.array([0.5, 0.3]), np.array([0.25, 0.45])]
    rep = convexity_failure_check(0.5, fam, grid, family_name="simplex")
    assert rep.max_difference <= 1e-8


def test_convexity_fails_on_noncommuting_family():
    family, grid = _bloch_grid()
    rep = convexity_failure_check(0.5, family, grid)
    assert rep.max_difference >= 1e-4
    assert rep.per_point.shape[0] == len(grid)


@pytest.mark.parametrize("alpha", [-0.5, 0.0, 0.5])
def test_flatness_scan_affine_charts_are_flat(alpha):
    assert flatness_scan(alpha, 2) <= 1e-6
    assert flatness_scan(alpha, 3) <= 1e-6


def test_path_dependence_witness_value():
    assert path_dependence_witness() >= 1e-3


@pytest.mark.parametrize("alpha", [-0.7, -0.3, 0.3, 0.7])
def test_embedding_trace_identity(alpha):
    rng = rng_from(50)
    basis = hermitian_basis(2)
    xi = affine_coordinates(random_weight(rng, 2, 0.7, 1.5), alpha, basis)
    assert embedding_trace_identity_gap(basis, alpha, xi) <= 1e-12


def test_embedding_trace_identity_rejects_endpoints():
    basis = hermitian_basis(2)
    with pytest.raises(ValueError, match="strictly inside"):
        embedding_trace_identity_gap(basis, 1.0, np.ones(4))


# --------------------------------------------------------------- scan rows


def test_kernel_direct_consistency_rows():
    rows = kernel_direct_consistency(seed=0, dims=(2,), alphas=(-0.5, 0.5), samples=10)
    assert len(rows) == 2
    for row in rows:
        assert row["max_rel_dev"] <= 1e-8
        assert row["samples"] == 10


def test_monotonicity_scan_rows():
    rows = monotonicity_scan(seed=0, trials=60)
    assert {r["metric"] for r in rows} >= {"bkm", "bures", "rld"}
    for row in rows:
        assert row["min_margin"] >= -1e-9
        assert row["inconclusive"] == 0
        assert 0.0 <= row["depolarizing_strict_fraction"] <= 1.0


def test_classical_reduction_check_values():
    out = classical_reduction_check(seed=0, dim=3, n_points=2)
    assert out["max_fisher_dev"] <= 1e-9
    assert out["max_alpha_dev"] <= 1e-9


# ------------------------------------------------------ entropy projection


def _qutrit_gibbs(seed=60):
    rng = rng_from(seed)
    ys = [random_traceless_hermitian(rng, 3), random_traceless_hermitian(rng, 3)]
    return gibbs_family(ys), rng


def test_gibbs_family_partition_and_means():
    gibbs, _ = _qutrit_gibbs()
    assert gibbs.log_partition(np.zeros(2)) == pytest.approx(np.log(3.0))
    theta = np.array([0.3, -0.2])
    sigma = gibbs.state(theta)
    assert np.trace(sigma).real == pytest.approx(1.0, abs=1e-12)
    # means are the gradient of the log partition
    h = 1e-6
    for i in range(2):
        up, dn = theta.copy(), theta.copy()
        up[i] += h
        dn[i] -= h
        fd = (gibbs.log_partition(up) - gibbs.log_partition(dn)) / (2.0 * h)
        assert gibbs.means(theta)[i] == pytest.approx(fd, abs=1e-8)


def test_gibbs_family_analytic_jacobian_matches_fd():
    gibbs, _ = _qutrit_gibbs()
    theta = np.array([0.4, 0.1])
    bare = ParametrizedFamily(param_dim=2, chart=gibbs.family.chart)
    for i in range(2):
        np.testing.assert_allclose(
            gibbs.family.jacobian(theta, i), bare.tangent_matrix(theta, i), atol=1e-7
        )
    # hessian symmetry comes along for free from the analytic form
    np.testing.assert_allclose(
        gibbs.family.hessian(theta, 0, 1), gibbs.family.hessian(theta, 1, 0), atol=1e-11
    )


def test_gibbs_family_rejects_dependent_observables():
    with pytest.raises(ValueError, match="independent"):
        gibbs_family([SZ, 2.0 * SZ])
    with pytest.raises(ValueError, match="independent"):
        gibbs_family([np.eye(2, dtype=complex)])
    with pytest.raises(ValueError, match="at least one"):
        gibbs_family([])


def test_entropy_projection_converges_and_is_optimal():
    gibbs, rng = _qutrit_gibbs()
    rho = random_state(rng, 3, floor=0.1)
    report = entropy_projection(rho, gibbs)
    assert report.converged
    assert report.mean_residual <= 1e-7
    assert report.orthogonality_residual <= 1e-6
    sigma_star = gibbs.state(report.theta_star)
    best = relative_entropy(rho, sigma_star)
    assert best == pytest.approx(report.relative_entropy_value, rel=1e-9)
    for _ in range(5):
        nearby = report.theta_star + 0.1 * rng.standard_normal(2)
        assert relative_entropy(rho, gibbs.state(nearby)) >= best - 1e-12


def test_relative_entropy_curvature_gap():
    rng = rng_from(61)
    rho = random_state(rng, 3, floor=0.1)
    x = random_traceless_hermitian(rng, 3)
    x = 0.25 * x / np.linalg.norm(x, 2)
    assert relative_entropy_curvature_gap(rho, x, t=1e-2) <= 1e-4
    with pytest.raises(ValueError, match="traceless"):
        relative_entropy_curvature_gap(rho, np.eye(3, dtype=complex), t=1e-2)

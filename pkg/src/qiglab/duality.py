"""Numerical duality laboratory.

Defect functionals quantifying how far a metric/connection pair is from
duality, transport-based duality checks, the trace potential whose Hessian
reproduces the metric in affine coordinates, dual-coordinate and Legendre
verification, a uniqueness falsification scan over candidate kernels, the
convex-combination comparison of connections, Gibbs families with the
relative-entropy projection, and the seeded witness families and drivers the
CLI runs.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np
import scipy.optimize

from .linalg import (
    check_hermitian,
    frechet_derivative,
    frechet_second_derivative,
    hermitize,
    spectral_decompose,
)
from .manifold import (
    ParametrizedFamily,
    TangentVector,
    affine_coordinates,
    alpha_representation,
    basis_combination,
    check_state,
    embedding_function,
    family_tangent,
    linear_family,
    representation_convert,
    simplex_family,
    sphere_project,
    state_tangent,
    xi_affine_family,
)
from .metrics import (
    MonotoneFunctionSpec,
    MonotonicityReport,
    bkm_direct,
    bkm_function,
    bures_function,
    builtin_functions,
    depolarizing_channel,
    kernel_metric,
    metric_eval,
    monotonicity_check,
    partial_trace_channel,
    petz_kernel,
    random_stinespring_channel,
    relative_entropy,
    rld_function,
    wyd_direct,
    wyd_function,
)
from .connections import (
    SECOND_DERIVATIVE_STEP,
    CurveSpec,
    covariant_derivative_on_M,
    convex_mixture_derivative,
    ext_covariant_derivative,
    parallel_transport_on_M,
)
from .sampling import (
    hermitian_basis,
    pauli_matrices,
    random_state,
    random_traceless_hermitian,
    random_weight,
    rng_from,
)

__all__ = [
    "POSITIVE_TOL",
    "FALSIFICATION_GAP",
    "FIRST_DERIVATIVE_STEP",
    "WitnessFamily",
    "qubit_bloch_family",
    "qutrit_state_family",
    "qubit_weight_family",
    "qutrit_weight_family",
    "standard_witness_families",
    "sample_grid",
    "DualityReport",
    "duality_defect",
    "TransportDualityReport",
    "transport_duality_check",
    "witness_curve",
    "potential_value",
    "PotentialReport",
    "potential_check",
    "DualCoordinateReport",
    "dual_coordinate_check",
    "perturbed_wyd",
    "ScanEntry",
    "UniquenessScanResult",
    "uniqueness_scan",
    "ConvexityReport",
    "convexity_failure_check",
    "path_dependence_witness",
    "flatness_scan",
    "embedding_trace_identity_gap",
    "GibbsFamily",
    "gibbs_family",
    "ProjectionReport",
    "entropy_projection",
    "relative_entropy_curvature_gap",
    "kernel_direct_consistency",
    "monotonicity_scan",
    "classical_reduction_check",
]

# Positive verification tolerance and the falsification gap (100x separation).
POSITIVE_TOL = 5e-5
FALSIFICATION_GAP = 1e-2
FIRST_DERIVATIVE_STEP = 1e-4


# ---------------------------------------------------------------------------
# Witness families and grids


@dataclass(frozen=True)
class WitnessFamily:
    """A documented chart plus the parameter box its grids are drawn from."""

    name: str
    family: ParametrizedFamily
    grid_halfwidth: float
    on_extended: bool


def qubit_bloch_family() -> ParametrizedFamily:
    """Full qubit chart rho = (I + theta . sigma)/2 (linear, analytic)."""
    i2, sx, sy, sz = pauli_matrices()
    return linear_family(0.5 * i2, [0.5 * sx, 0.5 * sy, 0.5 * sz])


def qutrit_state_family(seed: int = 11) -> ParametrizedFamily:
    """Three-parameter qutrit sub-chart around a seeded interior base state.

    rho(theta) = rho0 + sum theta_k D_k with seeded traceless directions of
    spectral norm 0.1; the base state has spectral floor 0.25.
    """
    rng = rng_from(seed)
    base = random_state(rng, 3, floor=0.25)
    directions = []
    for _ in range(3):
        d = random_traceless_hermitian(rng, 3)
        directions.append(d * (0.1 / np.linalg.norm(d, 2)))
    return linear_family(base, directions)


def qubit_weight_family(seed: int = 13) -> ParametrizedFamily:
    """Full positive-cone qubit chart: seeded base plus the Pauli basis/2."""
    rng = rng_from(seed)
    base = random_weight(rng, 2, 0.8, 1.6)
    i2, sx, sy, sz = pauli_matrices()
    return linear_family(base, [0.5 * i2, 0.5 * sx, 0.5 * sy, 0.5 * sz])


def qutrit_weight_family(seed: int = 17) -> ParametrizedFamily:
    """Three-parameter qutrit chart into the positive cone (seeded)."""
    rng = rng_from(seed)
    base = random_weight(rng, 3, 0.8, 1.6)
    directions = []
    for _ in range(3):
        d = hermitize(rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3)))
        directions.append(d * (0.25 / np.linalg.norm(d, 2)))
    return linear_family(base, directions)


def standard_witness_families(dim: int, manifold: str = "both") -> list:
    """The documented defect-scan families for a dimension.

    ``manifold`` selects unit-trace charts ("state"), positive-cone charts
    ("weight") or both.
    """
    if dim == 2:
        state = WitnessFamily("qubit-bloch", qubit_bloch_family(), 0.35, False)
        weight = WitnessFamily("qubit-weight", qubit_weight_family(), 0.4, True)
    elif dim == 3:
        state = WitnessFamily("qutrit-sub", qutrit_state_family(), 0.5, False)
        weight = WitnessFamily("qutrit-weight", qutrit_weight_family(), 0.4, True)
    else:
        raise ValueError(f"no documented witness families for dimension {dim}")
    if manifold == "state":
        return [state]
    if manifold == "weight":
        return [weight]
    if manifold == "both":
        return [state, weight]
    raise ValueError(f"manifold must be 'state', 'weight' or 'both', got {manifold!r}")


def sample_grid(witness: WitnessFamily, seed, n_points: int = 3) -> list:
    """Seeded parameter grid inside the witness box."""
    rng = rng_from(seed)
    w = witness.grid_halfwidth
    return [
        rng.uniform(-w, w, size=witness.family.param_dim) for _ in range(n_points)
    ]


# ---------------------------------------------------------------------------
# Duality defect


@dataclass(frozen=True)
class DualityReport:
    """Defect tensor of a (metric, +-alpha connection pair) on a grid.

    defect is the maximum absolute entry of per_triple, whose axes are
    (grid point, i, j, k) for
    d_i g(T_j, T_k) - g(D^(+a)_ij, T_k) - g(T_j, D^(-a)_ik).
    """

    metric_name: str
    alpha: float
    on_extended: bool
    scale: float
    defect: float
    per_triple: np.ndarray
    grid: tuple
    family_name: str = ""


def duality_defect(
    family: ParametrizedFamily,
    grid: Sequence[np.ndarray],
    f: MonotoneFunctionSpec,
    alpha: float,
    on_extended: bool = False,
    scale: float = 1.0,
    step: float = SECOND_DERIVATIVE_STEP,
    d_step: float = FIRST_DERIVATIVE_STEP,
    family_name: str = "",
) -> DualityReport:
    """Measure how far (f-metric, +-alpha connections) is from duality.

    For every grid point and coordinate triple (i, j, k):
    the i-derivative of g(T_j, T_k) minus g(nabla^(+alpha)_i T_j, T_k) minus
    g(T_j, nabla^(-alpha)_i T_k), with projected connections on the
    unit-trace manifold (default) or the flat ones on the positive cone.
    The defect is linear in ``scale`` (scalar metric multiples) exactly.
    """
    alpha = float(alpha)
    d = family.param_dim
    deriv = ext_covariant_derivative if on_extended else covariant_derivative_on_M
    tensors = []
    for theta in grid:
        theta = np.atleast_1d(np.asarray(theta, dtype=float))
        sigma = family.point(theta)
        kernel = petz_kernel(sigma, f)
        tangents = [family.tangent_matrix(theta, k) for k in range(d)]

        cov_plus = {}
        cov_minus = {}
        for i in range(d):
            for j in range(i, d):
                cov_plus[i, j] = deriv(family, theta, i, j, alpha, step).vector.mixture
                cov_minus[i, j] = deriv(family, theta, i, j, -alpha, step).vector.mixture

        def metric_matrix(th):
            sg = family.point(th)
            kn = petz_kernel(sg, f)
            tg = [family.tangent_matrix(th, k) for k in range(d)]
            out = np.empty((d, d))
            for a in range(d):
                for b in range(a, d):
                    out[a, b] = out[b, a] = kernel_metric(kn, tg[a], tg[b])
            return out

        dg = np.empty((d, d, d))
        for i in range(d):
            h = d_step * max(1.0, abs(theta[i]))
            up, dn = theta.copy(), theta.copy()
            up[i] += h
            dn[i] -= h
            dg[i] = (metric_matrix(up) - metric_matrix(dn)) / (2.0 * h)

        t = np.empty((d, d, d))
        for i in range(d):
            for j in range(d):
                cp = cov_plus[(i, j) if i <= j else (j, i)]
                for k in range(d):
                    cm = cov_minus[(i, k) if i <= k else (k, i)]
                    t[i, j, k] = scale * (
                        dg[i, j, k]
                        - kernel_metric(kernel, cp, tangents[k])
                        - kernel_metric(kernel, tangents[j], cm)
                    )
        tensors.append(t)
    per_triple = np.stack(tensors)
    return DualityReport(
        metric_name=f.name,
        alpha=alpha,
        on_extended=on_extended,
        scale=scale,
        defect=float(np.abs(per_triple).max()),
        per_triple=per_triple,
        grid=tuple(np.atleast_1d(np.asarray(g, dtype=float)) for g in grid),
        family_name=family_name,
    )


# ---------------------------------------------------------------------------
# Transport duality


@dataclass(frozen=True)
class TransportDualityReport:
    metric_name: str
    alpha: float
    on_extended: bool
    initial_value: float
    deviation: float
    values: np.ndarray


def transport_duality_check(
    curve: CurveSpec,
    f: MonotoneFunctionSpec,
    alpha: float,
    y: TangentVector,
    z: TangentVector,
    on_extended: bool = True,
) -> TransportDualityReport:
    """Carry y by the +alpha transport and z by the -alpha transport along the
    curve and watch g(y(t), z(t)).

    With the flat transports on the positive cone the pairing under the
    matched WYD metric is constant to round-off; mismatched metrics drift.
    """
    alpha = float(alpha)
    start = curve.point(0.0)
    if np.abs(start - y.base).max() > 1e-9 or np.abs(start - z.base).max() > 1e-9:
        raise ValueError("tangent vectors must sit at the curve start point")
    wy = alpha_representation(y, alpha)
    wz = alpha_representation(z, -alpha)
    values = [metric_eval(start, f, y.mixture, z.mixture)]
    prev = start
    steps = curve.step_count
    for k in range(1, steps + 1):
        sigma = curve.point(k / steps)
        if np.linalg.norm(sigma - prev) > 0.5:
            raise ValueError(f"curve discretization too coarse at step {k}/{steps}")
        if not on_extended:
            wy = sphere_project(sigma, alpha, wy)
            wz = sphere_project(sigma, -alpha, wz)
        my = representation_convert(sigma, wy, alpha, -1.0)
        mz = representation_convert(sigma, wz, -alpha, -1.0)
        values.append(metric_eval(sigma, f, my, mz))
        prev = sigma
    values = np.asarray(values)
    return TransportDualityReport(
        metric_name=f.name,
        alpha=alpha,
        on_extended=on_extended,
        initial_value=float(values[0]),
        deviation=float(np.abs(values - values[0]).max()),
        values=values,
    )


def witness_curve(step_count: int = 256) -> CurveSpec:
    """Documented qubit transport curve: Bloch segment (0.35,0,0) -> (0,0.35,0)."""
    family = qubit_bloch_family()
    a = np.array([0.35, 0.0, 0.0])
    b = np.array([0.0, 0.35, 0.0])
    return CurveSpec(family, lambda t: (1.0 - t) * a + t * b, step_count)


# ---------------------------------------------------------------------------
# Potential and dual coordinates


def potential_value(sigma: np.ndarray, alpha: float) -> float:
    """Trace potential (2/(1+alpha)) Tr sigma; undefined at alpha = -1."""
    alpha = float(alpha)
    if alpha <= -1.0:
        raise ValueError(f"the trace potential needs alpha > -1, got {alpha!r}")
    return float(2.0 / (1.0 + alpha) * np.trace(sigma).real)


def _scalar_gradient(fn, x: np.ndarray, step: float = FIRST_DERIVATIVE_STEP) -> np.ndarray:
    g = np.empty_like(x)
    for i in range(x.shape[0]):
        h = step * max(1.0, abs(x[i]))
        up, dn = x.copy(), x.copy()
        up[i] += h
        dn[i] -= h
        g[i] = (fn(up) - fn(dn)) / (2.0 * h)
    return g


def _scalar_hessian(fn, x: np.ndarray, step: float = SECOND_DERIVATIVE_STEP) -> np.ndarray:
    d = x.shape[0]
    out = np.empty((d, d))
    f0 = fn(x)
    for i in range(d):
        hi = step * max(1.0, abs(x[i]))
        up, dn = x.copy(), x.copy()
        up[i] += hi
        dn[i] -= hi
        out[i, i] = (fn(up) - 2.0 * f0 + fn(dn)) / (hi * hi)
        for j in range(i):
            hj = step * max(1.0, abs(x[j]))
            pp, pm, mp, mm = x.copy(), x.copy(), x.copy(), x.copy()
            pp[i] += hi
            pp[j] += hj
            pm[i] += hi
            pm[j] -= hj
            mp[i] -= hi
            mp[j] += hj
            mm[i] -= hi
            mm[j] -= hj
            out[i, j] = out[j, i] = (fn(pp) - fn(pm) - fn(mp) + fn(mm)) / (4.0 * hi * hj)
    return out


def _matched_metric(alpha: float) -> MonotoneFunctionSpec:
    """Kernel profile the order-alpha pairing corresponds to."""
    if abs(alpha) == 1.0:
        return bkm_function()
    return wyd_function(0.5 * (1.0 + alpha))


def _check_affine(family: ParametrizedFamily, alpha: float, point: np.ndarray) -> None:
    pairs = [(0, 0)] + ([(0, 1)] if family.param_dim > 1 else [])
    for i, j in pairs:
        res = ext_covariant_derivative(family, point, i, j, alpha)
        if float(np.linalg.norm(res.vector.mixture)) > 1e-4:
            raise ValueError(
                "coordinates are not affine for this embedding order "
                f"(flat covariant derivative has norm {np.linalg.norm(res.vector.mixture):.3e})"
            )


@dataclass(frozen=True)
class PotentialReport:
    """Hessian-vs-metric comparison of the trace potential in affine coordinates."""

    alpha: float
    hessian: np.ndarray
    metric_matrix: np.ndarray
    residual: float
    gradient_residual: float
    n_points: int


def potential_check(
    family: ParametrizedFamily,
    alpha: float,
    points: Sequence[np.ndarray],
    basis: Sequence[np.ndarray],
) -> PotentialReport:
    """Verify the trace potential against the metric in affine coordinates.

    The finite-difference Hessian of (2/(1+alpha)) Tr sigma(xi) must equal the
    matched kernel metric of the coordinate tangents entrywise, and the
    gradient coordinates must be an affine function of the order-(-alpha)
    affine coordinates (checked by linear regression over the grid).

    Rejects coordinates in which the embedding is not affine.
    """
    alpha = float(alpha)
    if not -1.0 < alpha <= 1.0:
        raise ValueError(f"potential check needs alpha in (-1, 1], got {alpha!r}")
    points = [np.atleast_1d(np.asarray(p, dtype=float)) for p in points]
    d = family.param_dim
    if len(points) < d + 2:
        raise ValueError(f"need at least {d + 2} grid points for the affine regression")
    _check_affine(family, alpha, points[0])
    f = _matched_metric(alpha)

    def psi(xi):
        return potential_value(family.point(xi), alpha)

    residual = 0.0
    first_hessian = first_metric = None
    etas = np.empty((len(points), d))
    zetas = np.empty((len(points), d))
    for n, xi in enumerate(points):
        sigma = family.point(xi)
        hess = _scalar_hessian(psi, xi)
        kernel = petz_kernel(sigma, f)
        tangents = [family.tangent_matrix(xi, k) for k in range(d)]
        metric = np.empty((d, d))
        for a in range(d):
            for b in range(a, d):
                metric[a, b] = metric[b, a] = kernel_metric(kernel, tangents[a], tangents[b])
        if n == 0:
            first_hessian, first_metric = hess, metric
        residual = max(residual, float(np.abs(hess - metric).max()))
        etas[n] = _scalar_gradient(psi, xi)
        zetas[n] = affine_coordinates(sigma, -alpha, basis)
    design = np.hstack([zetas, np.ones((len(points), 1))])
    coeffs, *_ = np.linalg.lstsq(design, etas, rcond=None)
    gradient_residual = float(np.abs(design @ coeffs - etas).max())
    return PotentialReport(
        alpha=alpha,
        hessian=first_hessian,
        metric_matrix=first_metric,
        residual=residual,
        gradient_residual=gradient_residual,
        n_points=len(points),
    )


@dataclass(frozen=True)
class DualCoordinateReport:
    alpha: float
    jacobian_residual: float
    legendre_residual: float
    n_points: int


def dual_coordinate_check(
    family: ParametrizedFamily,
    alpha: float,
    points: Sequence[np.ndarray],
    seed=202,
) -> DualCoordinateReport:
    """Check the gradient coordinates against the metric and the Legendre pairing.

    The Jacobian of the gradient coordinates (central differences) must equal
    the matched metric matrix, and the numeric Legendre transform (a BFGS
    maximization started from a seeded perturbed point) must satisfy
    psi(xi) + phi(eta(xi)) = xi . eta(xi).
    """
    alpha = float(alpha)
    points = [np.atleast_1d(np.asarray(p, dtype=float)) for p in points]
    d = family.param_dim
    f = _matched_metric(alpha)
    rng = rng_from(seed)

    def psi(xi):
        return potential_value(family.point(xi), alpha)

    def eta(xi):
        return _scalar_gradient(psi, xi)

    jac_res = 0.0
    leg_res = 0.0
    for xi in points:
        sigma = family.point(xi)
        kernel = petz_kernel(sigma, f)
        tangents = [family.tangent_matrix(xi, k) for k in range(d)]
        metric = np.empty((d, d))
        for a in range(d):
            for b in range(a, d):
                metric[a, b] = metric[b, a] = kernel_metric(kernel, tangents[a], tangents[b])
        jac = np.empty((d, d))
        for j in range(d):
            h = SECOND_DERIVATIVE_STEP * max(1.0, abs(xi[j]))
            up, dn = xi.copy(), xi.copy()
            up[j] += h
            dn[j] -= h
            jac[:, j] = (eta(up) - eta(dn)) / (2.0 * h)
        jac_res = max(jac_res, float(np.abs(jac - metric).max()))

        eta0 = eta(xi)
        start = xi + 0.05 * rng.standard_normal(d)
        opt = scipy.optimize.minimize(
            lambda x: psi(x) - x @ eta0,
            start,
            jac=lambda x: eta(x) - eta0,
            method="BFGS",
            options={"gtol": 1e-11, "maxiter": 500},
        )
        # phi(eta0) = -(min value); residual is the optimality gap of xi itself
        leg_res = max(leg_res, abs((psi(xi) - xi @ eta0) - float(opt.fun)))
    return DualCoordinateReport(
        alpha=alpha,
        jacobian_residual=jac_res,
        legendre_residual=leg_res,
        n_points=len(points),
    )


# ---------------------------------------------------------------------------
# Uniqueness scan


def perturbed_wyd(
    p: float, amplitude: float = 0.2, center: float = 0.8, width: float = 0.5
) -> MonotoneFunctionSpec:
    """A symmetric, normalized but deliberately non-matching bump deformation.

    f_p(t) * (1 + a h(log t))/(1 + a h(0)) with h even, so the Petz symmetry
    and f(1) = 1 survive while the kernel genuinely changes.
    """
    base = wyd_function(p)

    def h(s):
        return np.exp(-((s - center) ** 2) / width) + np.exp(-((s + center) ** 2) / width)

    norm = 1.0 + amplitude * h(0.0)

    def f(x):
        x = np.asarray(x, dtype=float)
        out = base.fn(x) * (1.0 + amplitude * h(np.log(x))) / norm
        return out if out.ndim else float(out)

    return MonotoneFunctionSpec(
        f"wyd(p={p:g})*bump(a={amplitude:g},c={center:g},w={width:g})", f, claimed_monotone=False
    )


@dataclass(frozen=True)
class ScanEntry:
    name: str
    defect: float
    status: str  # "pass" | "fail" | "inconclusive"
    expected_dual: bool
    scale: float = 1.0


@dataclass(frozen=True)
class UniquenessScanResult:
    """Falsification battery outcome; never a proof of the converse.

    ``uniqueness_supported`` is true when every candidate expected to be dual
    passes, every other candidate lands beyond the falsification gap, and the
    matched WYD entry has the smallest defect.
    """

    alpha: float
    entries: tuple
    tol: float
    gap: float
    wyd_minimal: bool
    uniqueness_supported: bool
    seed: object = None

    @property
    def inconclusive_names(self) -> tuple:
        return tuple(e.name for e in self.entries if e.status == "inconclusive")


def uniqueness_scan(
    alpha: float,
    witnesses: Optional[Sequence[WitnessFamily]] = None,
    seed=7,
    n_points: int = 3,
    candidates: Optional[Sequence] = None,
    tol: float = POSITIVE_TOL,
    gap: float = FALSIFICATION_GAP,
) -> UniquenessScanResult:
    """Scan candidate kernels against the +-alpha connections.

    Candidates are (spec, scale, expected_dual) triples; the default battery
    holds the matched WYD profile, the other built-ins, two seeded bump
    perturbations, and a scalar multiple of the matched profile.
    """
    alpha = float(alpha)
    if not -1.0 < alpha < 1.0:
        raise ValueError(f"uniqueness scan needs alpha strictly inside (-1, 1), got {alpha!r}")
    p = 0.5 * (1.0 + alpha)
    if witnesses is None:
        witnesses = standard_witness_families(2, "state") + standard_witness_families(3, "state")
    if candidates is None:
        rng = rng_from(seed)
        candidates = [
            (wyd_function(p), 1.0, True),
            (bkm_function(), 1.0, False),
            (bures_function(), 1.0, False),
            (rld_function(), 1.0, False),
            (
                perturbed_wyd(
                    p,
                    amplitude=0.2,
                    center=float(rng.uniform(0.5, 1.2)),
                    width=float(rng.uniform(0.3, 0.8)),
                ),
                1.0,
                False,
            ),
            (
                perturbed_wyd(
                    p,
                    amplitude=0.3,
                    center=float(rng.uniform(0.5, 1.2)),
                    width=float(rng.uniform(0.3, 0.8)),
                ),
                1.0,
                False,
            ),
            (wyd_function(p), 3.0, True),
        ]
    grids = {w.name: sample_grid(w, seed, n_points) for w in witnesses}
    entries = []
    for spec, scale, expected in candidates:
        worst = 0.0
        for w in witnesses:
            rep = duality_defect(
                w.family,
                grids[w.name],
                spec,
                alpha,
                on_extended=w.on_extended,
                scale=scale,
                family_name=w.name,
            )
            worst = max(worst, rep.defect)
        if worst <= tol:
            status = "pass"
        elif worst >= gap:
            status = "fail"
        else:
            status = "inconclusive"
        name = spec.name if scale == 1.0 else f"{scale:g}*{spec.name}"
        entries.append(ScanEntry(name, worst, status, expected, scale))
    matched = [e for e in entries if e.expected_dual and e.scale == 1.0]
    wyd_minimal = bool(matched) and all(
        matched[0].defect <= e.defect for e in entries if e is not matched[0]
    )
    supported = (
        all(e.status == "pass" for e in entries if e.expected_dual)
        and all(e.status == "fail" for e in entries if not e.expected_dual)
        and wyd_minimal
    )
    return UniquenessScanResult(
        alpha=alpha,
        entries=tuple(entries),
        tol=tol,
        gap=gap,
        wyd_minimal=wyd_minimal,
        uniqueness_supported=supported,
        seed=seed,
    )


# ---------------------------------------------------------------------------
# Convexity failure, flatness, path dependence, trace identity


@dataclass(frozen=True)
class ConvexityReport:
    """Gap between the order-alpha connection and the convex combination."""

    alpha: float
    max_difference: float
    per_point: np.ndarray
    family_name: str = ""


def convexity_failure_check(
    alpha: float,
    family: ParametrizedFamily,
    grid: Sequence[np.ndarray],
    step: float = SECOND_DERIVATIVE_STEP,
    family_name: str = "",
) -> ConvexityReport:
    """Frobenius gap between the projected order-alpha covariant derivative
    and the ((1+alpha)/2, (1-alpha)/2) mixture of the order-(+-1) ones.

    Zero on commuting (diagonal) families - the classical identity - and
    genuinely nonzero on noncommuting charts for 0 < |alpha| < 1.
    """
    alpha = float(alpha)
    d = family.param_dim
    diffs = np.empty((len(grid), d, d))
    for n, theta in enumerate(grid):
        theta = np.atleast_1d(np.asarray(theta, dtype=float))
        for i in range(d):
            for j in range(i, d):
                direct = covariant_derivative_on_M(family, theta, i, j, alpha, step)
                mixed = convex_mixture_derivative(family, theta, i, j, alpha, step)
                gap = float(np.linalg.norm(direct.vector.mixture - mixed.vector.mixture))
                diffs[n, i, j] = diffs[n, j, i] = gap
    return ConvexityReport(
        alpha=alpha,
        max_difference=float(diffs.max()),
        per_point=diffs,
        family_name=family_name,
    )


def path_dependence_witness(alpha: float = 0.0, step_count: int = 256) -> float:
    """Projected-transport disagreement between two qubit paths.

    Transports the sigma_z/2 tangent from Bloch point (0.35, 0, 0) to
    (0, 0.35, 0) along the straight segment and along a detour through
    (0, 0, 0.35); returns the Frobenius distance of the end results.
    """
    family = qubit_bloch_family()
    a = np.array([0.35, 0.0, 0.0])
    b = np.array([0.0, 0.35, 0.0])
    c = np.array([0.0, 0.0, 0.35])
    v = state_tangent(family.point(a), 0.5 * pauli_matrices()[3])

    straight = CurveSpec(family, lambda t: (1.0 - t) * a + t * b, step_count)

    def detour(t):
        if t <= 0.5:
            return (1.0 - 2.0 * t) * a + 2.0 * t * c
        return (2.0 - 2.0 * t) * c + (2.0 * t - 1.0) * b

    bent = CurveSpec(family, detour, step_count)
    w1 = parallel_transport_on_M(straight, v, alpha)
    w2 = parallel_transport_on_M(bent, v, alpha)
    return float(np.linalg.norm(w1.mixture - w2.mixture))


def flatness_scan(
    alpha: float, dim: int, seed=5, n_points: int = 2, lo: float = 0.5, hi: float = 2.0
) -> float:
    """Max flat-covariant-derivative norm over seeded points of the affine chart.

    Builds the chart without analytic derivatives on purpose: the statement
    under test is that the finite-difference second partial of the embedded
    chart vanishes, so the discretization must not be allowed to mask it.
    """
    rng = rng_from(seed)
    basis = hermitian_basis(dim)
    fam = xi_affine_family(basis, alpha, analytic=False)
    worst = 0.0
    for _ in range(n_points):
        sigma = random_weight(rng, dim, lo, hi)
        xi = affine_coordinates(sigma, alpha, basis)
        for i in range(len(basis)):
            for j in range(i, len(basis)):
                res = ext_covariant_derivative(fam, xi, i, j, alpha)
                worst = max(worst, float(np.linalg.norm(res.vector.mixture)))
    return worst


def embedding_trace_identity_gap(
    basis: Sequence[np.ndarray], alpha: float, xi: np.ndarray
) -> float:
    """Residual of the trace identity tying both embeddings in affine coordinates.

    In coordinates where the order-alpha embedding is linear with directions
    X_i, the second derivative of the opposite embedding satisfies
    Tr(l_a * d2 l_{-a} / dxi_i dxi_j) = (2 alpha/(1-alpha)) * g_ij, with
    g_ij = Tr(X_i * d l_{-a}/dxi_j) the two-representation pairing of the
    coordinate tangents. This is exactly the gap between the potential
    Hessian and the metric, expressed without finite differences; at
    alpha = 0 it degenerates to Tr(l_0 * d2 l_0) = 0. Returns the worst
    absolute residual over all index pairs.
    """
    alpha = float(alpha)
    if not -1.0 < alpha < 1.0:
        raise ValueError(f"trace identity needs alpha strictly inside (-1, 1), got {alpha!r}")
    fam = xi_affine_family(basis, alpha, analytic=True)
    xi = np.atleast_1d(np.asarray(xi, dtype=float))
    sigma = fam.point(xi)
    spec = spectral_decompose(sigma)
    emb_a = embedding_function(alpha)
    emb_m = embedding_function(-alpha)
    ell_a = (spec.unitary * emb_a.fn(spec.eigenvalues)) @ spec.unitary.conj().T
    d = fam.param_dim
    jacs = [fam.jacobian(xi, i) for i in range(d)]
    d_ell_m = [frechet_derivative(spec, j, emb_m) for j in jacs]
    coeff = 2.0 * alpha / (1.0 - alpha)
    worst = 0.0
    for i in range(d):
        for j in range(i, d):
            hess = fam.hessian(xi, i, j)
            d2_m = frechet_second_derivative(spec, jacs[i], jacs[j], emb_m) + frechet_derivative(
                spec, hess, emb_m
            )
            lhs = float(np.trace(ell_a @ d2_m).real)
            rhs = coeff * float(np.trace(basis[i] @ d_ell_m[j]).real)
            worst = max(worst, abs(lhs - rhs))
    return worst


# ---------------------------------------------------------------------------
# Gibbs families and the relative-entropy projection


@dataclass(frozen=True)
class GibbsFamily:
    """exp(sum theta_i Y_i - psi(theta) I) with analytic chart derivatives."""

    observables: tuple
    family: ParametrizedFamily

    def log_partition(self, theta) -> float:
        theta = np.atleast_1d(np.asarray(theta, dtype=float))
        a = basis_combination(theta, self.observables)
        w = np.linalg.eigvalsh(a)
        m = float(w.max())
        return m + float(np.log(np.sum(np.exp(w - m))))

    def state(self, theta) -> np.ndarray:
        return self.family.point(theta)

    def means(self, theta) -> np.ndarray:
        sigma = self.state(theta)
        return np.array([float(np.trace(sigma @ y).real) for y in self.observables])


def gibbs_family(observables: Sequence[np.ndarray]) -> GibbsFamily:
    """Build the normalized exponential family of the given observables.

    {I, Y_1, ..., Y_m} must be linearly independent; the chart carries
    analytic first and second derivatives through the exp matrix calculus.
    """
    ys = tuple(check_hermitian(y) for y in observables)
    if not ys:
        raise ValueError("need at least one observable")
    n = ys[0].shape[0]
    span = [np.eye(n, dtype=complex)] + list(ys)
    gram = np.array([[np.trace(a.conj().T @ b).real for b in span] for a in span])
    if np.linalg.cond(gram) > 1e12:
        raise ValueError("observables together with I must be linearly independent")
    from .linalg import Spectrum, exp_function

    expf = exp_function()

    def _b_spectrum(theta):
        a = basis_combination(theta, ys)
        spec = spectral_decompose(a)
        m = float(spec.eigenvalues.max())
        psi = m + float(np.log(np.sum(np.exp(spec.eigenvalues - m))))
        return Spectrum(spec.eigenvalues - psi, spec.unitary), psi

    def chart(theta):
        spec, _ = _b_spectrum(theta)
        return hermitize((spec.unitary * np.exp(spec.eigenvalues)) @ spec.unitary.conj().T)

    def _jacobian_pieces(theta):
        spec, _ = _b_spectrum(theta)
        sigma = hermitize((spec.unitary * np.exp(spec.eigenvalues)) @ spec.unitary.conj().T)
        dpsi = [float(np.trace(sigma @ y).real) for y in ys]
        dirs = [y - dp * np.eye(n) for y, dp in zip(ys, dpsi)]
        return spec, sigma, dirs

    def jacobian(theta, i):
        spec, _, dirs = _jacobian_pieces(theta)
        return frechet_derivative(spec, dirs[i], expf)

    def hessian(theta, i, j):
        spec, sigma, dirs = _jacobian_pieces(theta)
        dsig_j = frechet_derivative(spec, dirs[j], expf)
        d2psi = float(np.trace(dsig_j @ ys[i]).real)
        return hermitize(
            frechet_second_derivative(spec, dirs[i], dirs[j], expf) - d2psi * sigma
        )

    fam = ParametrizedFamily(
        param_dim=len(ys), chart=chart, jacobian=jacobian, hessian=hessian
    )
    return GibbsFamily(ys, fam)


@dataclass(frozen=True)
class ProjectionReport:
    theta_star: np.ndarray
    converged: bool
    iterations: int
    gradient_norm: float
    mean_residual: float
    orthogonality_residual: float
    relative_entropy_value: float


def entropy_projection(
    rho: np.ndarray,
    gibbs: GibbsFamily,
    tol: float = 1e-9,
    max_iter: int = 200,
) -> ProjectionReport:
    """Project a state onto a Gibbs family by minimizing relative entropy.

    Damped Newton iteration on theta -> psi(theta) - theta . means(rho); at
    the minimizer the family means match the state's means and the mixture
    segment rho - sigma* is BKM-orthogonal to the family's tangent space.
    Non-convergence is reported (with the gradient norm), not raised.
    """
    rho = check_state(rho)
    ys = gibbs.observables
    target = np.array([float(np.trace(rho @ y).real) for y in ys])
    m = len(ys)
    theta = np.zeros(m)

    def objective(th):
        return gibbs.log_partition(th) - th @ target

    grad = gibbs.means(theta) - target
    iterations = 0
    for iterations in range(1, max_iter + 1):
        if float(np.abs(grad).max()) <= tol:
            break
        hess = np.empty((m, m))
        for j in range(m):
            dsig = gibbs.family.jacobian(theta, j)
            for i in range(m):
                hess[i, j] = float(np.trace(dsig @ ys[i]).real)
        hess = 0.5 * (hess + hess.T)
        try:
            delta = -np.linalg.solve(hess, grad)
        except np.linalg.LinAlgError:
            delta = -grad
        f0 = objective(theta)
        slope = float(grad @ delta)
        t = 1.0
        while t > 1e-12 and objective(theta + t * delta) > f0 + 0.25 * t * slope:
            t *= 0.5
        theta = theta + t * delta
        grad = gibbs.means(theta) - target
    gnorm = float(np.abs(grad).max())
    converged = gnorm <= tol
    sigma = gibbs.state(theta)
    segment = state_tangent(sigma, rho - sigma)
    orth = 0.0
    for i in range(m):
        tan = family_tangent(gibbs.family, theta, i)
        orth = max(orth, abs(bkm_direct(sigma, segment, tan)))
    return ProjectionReport(
        theta_star=theta,
        converged=converged,
        iterations=iterations,
        gradient_norm=gnorm,
        mean_residual=gnorm,
        orthogonality_residual=orth,
        relative_entropy_value=relative_entropy(rho, sigma),
    )


def relative_entropy_curvature_gap(
    rho: np.ndarray, direction: np.ndarray, t: float = 1e-2
) -> float:
    """|S(rho | rho + t D) - (1/2) t^2 bkm(D, D)|: the second-order expansion."""
    rho = check_state(rho)
    d = check_hermitian(direction)
    if abs(complex(np.trace(d))) > 1e-10:
        raise ValueError("expansion direction must be traceless")
    sigma = rho + t * d
    bkm = bkm_direct(rho, TangentVector(rho, d), TangentVector(rho, d))
    return float(abs(relative_entropy(rho, sigma) - 0.5 * bkm * t * t))


# ---------------------------------------------------------------------------
# Criterion drivers


def kernel_direct_consistency(
    seed=0,
    dims: Sequence[int] = (2, 3, 4),
    alphas: Sequence[float] = (-0.9, -0.5, 0.0, 0.5, 0.9),
    samples: int = 50,
    floor: float = 0.05,
) -> list:
    """Compare the direct two-representation WYD pairing with the kernel form.

    Returns one row per (dim, alpha): the worst value of
    |direct - kernel| / |kernel| over the sampled (state, tangent, tangent)
    triples with the matched profile f_p, p = (1+alpha)/2.
    """
    rows = []
    for n in dims:
        for alpha in alphas:
            rng = rng_from([seed, n, int(round((alpha + 1) * 1000))])
            f = wyd_function(0.5 * (1.0 + alpha))
            worst = 0.0
            for _ in range(samples):
                rho = random_state(rng, n, floor)
                a = random_traceless_hermitian(rng, n)
                b = random_traceless_hermitian(rng, n)
                va, vb = TangentVector(rho, a), TangentVector(rho, b)
                direct = wyd_direct(rho, alpha, va, vb)
                kernel = metric_eval(rho, f, a, b)
                worst = max(worst, abs(direct - kernel) / abs(kernel))
            rows.append({"dim": n, "alpha": alpha, "max_rel_dev": worst, "samples": samples})
    return rows


def monotonicity_scan(
    seed=0,
    trials: int = 1000,
    fspecs: Optional[Sequence[MonotoneFunctionSpec]] = None,
) -> list:
    """Monte-Carlo contraction margins for the built-in kernels.

    Each trial draws one of three channel kinds (depolarizing, random
    Stinespring, two-qubit partial trace) with a matching state and traceless
    tangent; all functions are evaluated on the same seeded triples.
    """
    if fspecs is None:
        fspecs = builtin_functions(wyd_exponents=(0.2, 0.5, 0.8))
    rng = rng_from(seed)
    triples = []
    for _ in range(trials):
        kind = rng.integers(0, 3)
        if kind == 0:
            n = int(rng.integers(2, 4))
            rho = random_state(rng, n, floor=0.1)
            a = random_traceless_hermitian(rng, n)
            ch = depolarizing_channel(n, float(rng.uniform(0.05, 0.95)))
        elif kind == 1:
            n = int(rng.integers(2, 4))
            rho = random_state(rng, n, floor=0.1)
            a = random_traceless_hermitian(rng, n)
            ch = random_stinespring_channel(rng, n)
        else:
            rho = random_state(rng, 4, floor=0.05)
            a = random_traceless_hermitian(rng, 4)
            ch = partial_trace_channel(2, 2)
        triples.append((int(kind), rho, a, ch))
    rows = []
    for f in fspecs:
        min_margin = np.inf
        depol_total = depol_strict = 0
        regularized = inconclusive = 0
        for kind, rho, a, ch in triples:
            rep = monotonicity_check(f, rho, TangentVector(rho, a), ch)
            if rep.inconclusive:
                inconclusive += 1
                continue
            regularized += int(rep.regularized)
            min_margin = min(min_margin, rep.margin)
            if kind == 0:
                depol_total += 1
                depol_strict += int(rep.margin > 0.0)
        rows.append(
            {
                "metric": f.name,
                "trials": trials,
                "min_margin": float(min_margin),
                "depolarizing_strict_fraction": depol_strict / max(depol_total, 1),
                "regularized": regularized,
                "inconclusive": inconclusive,
            }
        )
    return rows


def classical_reduction_check(
    seed=0,
    dim: int = 3,
    n_points: int = 3,
    alphas: Sequence[float] = (-0.5, 0.0, 0.5),
) -> dict:
    """On a diagonal chart every built-in metric is the classical Fisher form.

    Returns the worst deviation of each kernel metric matrix from the Fisher
    matrix and the worst alpha-dependence of the direct WYD pairing.
    """
    rng = rng_from(seed)
    fam = simplex_family(dim)
    d = fam.param_dim
    worst_metric = 0.0
    worst_alpha = 0.0
    for _ in range(n_points):
        p = rng.dirichlet(np.ones(dim)) * 0.6 + 0.4 / dim  # interior simplex point
        theta = p[:-1]
        sigma = fam.point(theta)
        tangents = [family_tangent(fam, theta, i) for i in range(d)]
        fisher = np.empty((d, d))
        for i in range(d):
            for j in range(d):
                dp_i = np.diagonal(tangents[i].mixture).real
                dp_j = np.diagonal(tangents[j].mixture).real
                fisher[i, j] = float(np.sum(dp_i * dp_j / p))
        for f in builtin_functions():
            for i in range(d):
                for j in range(d):
                    g = metric_eval(sigma, f, tangents[i], tangents[j])
                    worst_metric = max(worst_metric, abs(g - fisher[i, j]))
        for alpha in alphas:
            for i in range(d):
                for j in range(d):
                    g = wyd_direct(sigma, alpha, tangents[i], tangents[j])
                    worst_alpha = max(worst_alpha, abs(g - fisher[i, j]))
    return {"max_fisher_dev": worst_metric, "max_alpha_dev": worst_alpha}

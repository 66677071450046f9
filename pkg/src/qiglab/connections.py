"""Covariant derivatives and parallel transports.

The order-alpha embedding induces a flat connection on the positive cone
(extended manifold): its covariant derivative is the plain second partial of
the embedded chart, and its parallel transport reinterprets the alpha
representation at the endpoint. On the unit-trace manifold the same data is
projected onto the embedded sphere's tangent space; the projected transport
is discretized step by step and is path dependent.

Second partials use the analytic chain rule (first/second directional matrix
derivatives) when the chart carries analytic derivatives, and a nine-point
central stencil with step 1e-3 * max(1, |theta|) otherwise.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .linalg import frechet_derivative, frechet_second_derivative, hermitize, spectral_decompose
from .manifold import (
    ParametrizedFamily,
    TangentVector,
    alpha_representation,
    embedding_function,
    representation_convert,
    sphere_project,
    state_tangent,
    weight_tangent,
)

__all__ = [
    "SECOND_DERIVATIVE_STEP",
    "CurveSpec",
    "CovariantDerivativeResult",
    "ext_covariant_derivative",
    "covariant_derivative_on_M",
    "convex_mixture_derivative",
    "parallel_transport_ext",
    "parallel_transport_on_M",
]

SECOND_DERIVATIVE_STEP = 1e-3

# Consecutive curve samples may differ by at most this much in Frobenius norm.
_CONTINUITY_BOUND = 0.5

_STATE_TRACE_TOL = 1e-8


@dataclass
class CurveSpec:
    """A parameter path t in [0, 1] through a chart, with a discretization."""

    family: ParametrizedFamily
    path: Callable[[float], np.ndarray]
    step_count: int = 256

    def __post_init__(self):
        if self.step_count < 1:
            raise ValueError(f"step_count must be at least 1, got {self.step_count}")

    def point(self, t: float) -> np.ndarray:
        return self.family.point(np.atleast_1d(np.asarray(self.path(t), dtype=float)))


@dataclass(frozen=True)
class CovariantDerivativeResult:
    """Base point and the resulting tangent vector (mixture representation)."""

    base: np.ndarray
    vector: TangentVector


def _fd_embedded_second_partial(
    family: ParametrizedFamily, theta: np.ndarray, i: int, j: int, alpha: float, step: float
) -> np.ndarray:
    fun = embedding_function(alpha)

    def g(t):
        spec = spectral_decompose(family.point(t))
        return (spec.unitary * fun.fn(spec.eigenvalues)) @ spec.unitary.conj().T

    hi = step * max(1.0, abs(theta[i]))
    hj = step * max(1.0, abs(theta[j]))
    for _ in range(4):
        try:
            if i == j:
                up, mid, dn = theta.copy(), theta, theta.copy()
                up[i] += hi
                dn[i] -= hi
                return hermitize((g(up) - 2.0 * g(mid) + g(dn)) / (hi * hi))
            pp, pm, mp, mm = theta.copy(), theta.copy(), theta.copy(), theta.copy()
            pp[i] += hi
            pp[j] += hj
            pm[i] += hi
            pm[j] -= hj
            mp[i] -= hi
            mp[j] += hj
            mm[i] -= hi
            mm[j] -= hj
            return hermitize((g(pp) - g(pm) - g(mp) + g(mm)) / (4.0 * hi * hj))
        except ValueError:
            # domain boundary inside the stencil: shrink and retry
            hi *= 0.5
            hj *= 0.5
    raise ValueError(
        f"stencil keeps leaving the chart domain near theta={theta.tolist()} "
        f"(final steps {hi:.2e}, {hj:.2e})"
    )


def _embedded_second_partial(
    family: ParametrizedFamily, theta: np.ndarray, i: int, j: int, alpha: float, step: float
):
    """(sigma, second partial of the embedded chart) at theta."""
    theta = np.atleast_1d(np.asarray(theta, dtype=float))
    sigma = family.point(theta)
    if family.has_analytic_second_order:
        spec = spectral_decompose(sigma)
        fun = embedding_function(alpha)
        d_i = family.jacobian(theta, i)
        d_j = family.jacobian(theta, j)
        d_ij = family.hessian(theta, i, j)
        d2 = frechet_second_derivative(spec, d_i, d_j, fun) + frechet_derivative(
            spec, d_ij, fun
        )
        return sigma, hermitize(d2)
    return sigma, _fd_embedded_second_partial(family, theta, i, j, alpha, step)


def ext_covariant_derivative(
    family: ParametrizedFamily,
    theta: np.ndarray,
    i: int,
    j: int,
    alpha: float,
    step: float = SECOND_DERIVATIVE_STEP,
) -> CovariantDerivativeResult:
    """Flat covariant derivative on the positive cone.

    The plain second partial of the embedded chart, converted back to the
    mixture representation at the base point. Vanishes identically in
    coordinates that make the embedding affine.
    """
    sigma, d2 = _embedded_second_partial(family, theta, i, j, alpha, step)
    mixture = representation_convert(sigma, d2, alpha, -1.0)
    return CovariantDerivativeResult(sigma, weight_tangent(sigma, mixture))


def covariant_derivative_on_M(
    family: ParametrizedFamily,
    theta: np.ndarray,
    i: int,
    j: int,
    alpha: float,
    step: float = SECOND_DERIVATIVE_STEP,
) -> CovariantDerivativeResult:
    """Projected covariant derivative on the unit-trace manifold.

    The second partial of the embedded chart followed by the sphere
    projection at the base point; the alpha representation of the result is
    tangent (weighted trace zero) by construction.
    """
    sigma, d2 = _embedded_second_partial(family, theta, i, j, alpha, step)
    if abs(float(np.trace(sigma).real) - 1.0) > _STATE_TRACE_TOL:
        raise ValueError("covariant_derivative_on_M needs a unit-trace family")
    projected = sphere_project(sigma, alpha, d2)
    mixture = representation_convert(sigma, projected, alpha, -1.0)
    n = sigma.shape[0]
    mixture = mixture - (np.trace(mixture) / n) * np.eye(n)  # kill round-off trace
    return CovariantDerivativeResult(sigma, state_tangent(sigma, mixture))


def convex_mixture_derivative(
    family: ParametrizedFamily,
    theta: np.ndarray,
    i: int,
    j: int,
    alpha: float,
    step: float = SECOND_DERIVATIVE_STEP,
) -> CovariantDerivativeResult:
    """Affine combination ((1+alpha)/2) of the order-(+1) and ((1-alpha)/2)
    of the order-(-1) projected covariant derivatives, in mixture form.

    The classical alpha-connection satisfies this identity exactly; the
    matrix-valued one does not, which convexity_failure_check quantifies.
    """
    alpha = float(alpha)
    plus = covariant_derivative_on_M(family, theta, i, j, 1.0, step)
    minus = covariant_derivative_on_M(family, theta, i, j, -1.0, step)
    w_plus = 0.5 * (1.0 + alpha)
    w_minus = 0.5 * (1.0 - alpha)
    mixture = w_plus * plus.vector.mixture + w_minus * minus.vector.mixture
    return CovariantDerivativeResult(plus.base, state_tangent(plus.base, mixture))


def _check_start(curve: CurveSpec, v: TangentVector) -> np.ndarray:
    start = curve.point(0.0)
    if np.abs(start - v.base).max() > 1e-9:
        raise ValueError("tangent vector base does not match the curve start point")
    return start


def parallel_transport_ext(curve: CurveSpec, v: TangentVector, alpha: float) -> TangentVector:
    """Flat transport on the positive cone: the alpha representation is
    carried unchanged and reinterpreted at the endpoint.

    Exact (independent of step_count) and path independent; a closed curve
    returns the input vector.
    """
    _check_start(curve, v)
    w = alpha_representation(v, alpha)
    end = curve.point(1.0)
    mixture = representation_convert(end, w, alpha, -1.0)
    return weight_tangent(end, mixture)


def parallel_transport_on_M(
    curve: CurveSpec, v: TangentVector, alpha: float, richardson: bool = True
) -> TangentVector:
    """Projected transport on the unit-trace manifold.

    Discretized: the alpha representation is carried to each successive curve
    point and re-projected onto the tangent space there. First-order accurate
    in 1/step_count; with ``richardson`` the default 256-step run is combined
    with a half-resolution run (2*fine - coarse). Path dependent: transports
    along different curves between the same endpoints disagree (the
    non-flatness witness).
    """
    fine = _transport_on_m_once(curve, v, alpha, curve.step_count)
    if not richardson:
        return fine
    if curve.step_count % 2 or curve.step_count < 2:
        raise ValueError("richardson extrapolation needs an even step_count >= 2")
    coarse = _transport_on_m_once(curve, v, alpha, curve.step_count // 2)
    return state_tangent(fine.base, 2.0 * fine.mixture - coarse.mixture)


def _transport_on_m_once(
    curve: CurveSpec, v: TangentVector, alpha: float, steps: int
) -> TangentVector:
    prev = _check_start(curve, v)
    w = alpha_representation(v, alpha)
    sigma = prev
    for k in range(1, steps + 1):
        sigma = curve.point(k / steps)
        if np.linalg.norm(sigma - prev) > _CONTINUITY_BOUND:
            raise ValueError(
                f"curve moves {np.linalg.norm(sigma - prev):.3f} in one step "
                f"(> {_CONTINUITY_BOUND}); step_count={steps} is too small for a "
                "continuous discretization"
            )
        if abs(float(np.trace(sigma).real) - 1.0) > _STATE_TRACE_TOL:
            raise ValueError("projected transport needs a unit-trace curve")
        w = sphere_project(sigma, alpha, w)
        prev = sigma
    mixture = representation_convert(sigma, w, alpha, -1.0)
    n = sigma.shape[0]
    mixture = mixture - (np.trace(mixture) / n) * np.eye(n)
    return state_tangent(sigma, mixture)

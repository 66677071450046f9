"""Positive matrices as manifold points.

Order-alpha embeddings of weights and states, tangent-vector representations
and conversions between them, the sphere projection onto the embedded
unit-trace manifold, parametrized families (charts) with optional analytic
derivatives, and affine coordinates in a self-adjoint basis.

The embedding with parameter alpha in (-1, 1) sends a positive matrix to
(2/(1-alpha)) * sigma^((1-alpha)/2); the alpha = +1 and alpha = -1 limits are
the log and identity embeddings, handled here once so downstream code treats
alpha uniformly on [-1, 1].
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np

from .linalg import (
    ScalarFunction,
    Spectrum,
    apply_scalar_function,
    check_hermitian,
    divided_difference_matrix,
    exp_function,
    frechet_derivative,
    frechet_second_derivative,
    hermitize,
    hs_inner,
    identity_function,
    log_function,
    power_function,
    spectral_decompose,
)

__all__ = [
    "CHART_MIN_EIGENVALUE",
    "STATE_TRACE_TOL",
    "min_eigenvalue",
    "check_weight",
    "check_state",
    "TangentVector",
    "state_tangent",
    "weight_tangent",
    "embedding_function",
    "inverse_embedding_function",
    "alpha_embed",
    "alpha_representation",
    "representation_convert",
    "sphere_project",
    "ParametrizedFamily",
    "family_tangent",
    "basis_combination",
    "affine_coordinates",
    "xi_affine_family",
    "linear_family",
    "simplex_family",
]

# Charts must keep the spectrum at least this far from the boundary.
CHART_MIN_EIGENVALUE = 1e-6
STATE_TRACE_TOL = 1e-8
_TANGENT_TRACE_TOL = 1e-10


def min_eigenvalue(a: np.ndarray) -> float:
    return float(np.linalg.eigvalsh(check_hermitian(a)).min())


def check_weight(a: np.ndarray) -> np.ndarray:
    """Validate a positive-definite self-adjoint matrix, reporting min eigenvalue."""
    a = check_hermitian(a)
    low = float(np.linalg.eigvalsh(a).min())
    if low <= 0.0:
        raise ValueError(f"matrix is not positive definite: min eigenvalue {low:.3e}")
    return a


def check_state(a: np.ndarray, trace_tol: float = STATE_TRACE_TOL) -> np.ndarray:
    """Validate a density matrix (positive definite, unit trace)."""
    a = check_weight(a)
    tr = float(np.trace(a).real)
    if abs(tr - 1.0) > trace_tol:
        raise ValueError(f"matrix trace {tr!r} is not 1 within {trace_tol:.1e}")
    return a


@dataclass(frozen=True)
class TangentVector:
    """A tangent vector at a positive-matrix base point, in mixture form.

    ``mixture`` is the plain derivative of the point (the alpha = -1
    representation); other representations are derived from it on demand.
    """

    base: np.ndarray
    mixture: np.ndarray


def weight_tangent(base: np.ndarray, mixture: np.ndarray) -> TangentVector:
    """Tangent vector at a weight-matrix point; mixture part self-adjoint."""
    return TangentVector(check_hermitian(base), check_hermitian(mixture))


def state_tangent(base: np.ndarray, mixture: np.ndarray) -> TangentVector:
    """Tangent vector at a density-matrix point; mixture part traceless."""
    base = check_hermitian(base)
    mixture = check_hermitian(mixture)
    tr = abs(complex(np.trace(mixture)))
    if tr > _TANGENT_TRACE_TOL:
        raise ValueError(
            f"mixture representation at a unit-trace base must be traceless; got trace {tr:.3e}"
        )
    return TangentVector(base, mixture)


def _check_alpha(alpha: float, lo_open: bool = False, hi_open: bool = False) -> float:
    alpha = float(alpha)
    if not -1.0 <= alpha <= 1.0:
        raise ValueError(f"alpha must lie in [-1, 1], got {alpha!r}")
    if lo_open and alpha == -1.0 or hi_open and alpha == 1.0:
        raise ValueError(f"alpha must lie strictly inside (-1, 1), got {alpha!r}")
    return alpha


def embedding_function(alpha: float) -> ScalarFunction:
    """Scalar profile of the order-alpha embedding.

    (2/(1-alpha)) * x^((1-alpha)/2) for |alpha| < 1; log at alpha = 1 and the
    identity at alpha = -1 (its formula limit).
    """
    alpha = _check_alpha(alpha)
    if alpha == 1.0:
        return log_function()
    if alpha == -1.0:
        return identity_function()
    s = 0.5 * (1.0 - alpha)
    return power_function(s, scale=1.0 / s, name=f"embed({alpha:g})")


def inverse_embedding_function(alpha: float) -> ScalarFunction:
    """Inverse of the embedding profile: y maps back to the matrix eigenvalue."""
    alpha = _check_alpha(alpha)
    if alpha == 1.0:
        return exp_function()
    if alpha == -1.0:
        return identity_function()
    s = 0.5 * (1.0 - alpha)
    # (s*y)^(1/s) = s^(1/s) * y^(1/s)
    return power_function(1.0 / s, scale=s ** (1.0 / s), name=f"unembed({alpha:g})")


def alpha_embed(sigma: np.ndarray, alpha: float) -> np.ndarray:
    """Embed a positive matrix: (2/(1-alpha)) * sigma^((1-alpha)/2).

    alpha must lie strictly inside (-1, 1); the +-1 limits are reached through
    embedding_function (log / identity profiles) instead.
    """
    alpha = float(alpha)
    if not -1.0 < alpha < 1.0:
        raise ValueError(
            f"alpha must lie strictly inside (-1, 1), got {alpha!r}; "
            "the +-1 limits use the log/identity embedding profiles"
        )
    spec = spectral_decompose(sigma)
    low = float(spec.eigenvalues.min())
    if low <= 0.0:
        raise ValueError(f"matrix is not positive definite: min eigenvalue {low:.3e}")
    return apply_scalar_function(spec, embedding_function(alpha))


def alpha_representation(v: TangentVector, alpha: float) -> np.ndarray:
    """Order-alpha representation of a tangent vector.

    The directional derivative of the embedding along the mixture part; at a
    unit-trace base the result satisfies Tr(rho^((1+alpha)/2) A) = 0.
    """
    alpha = _check_alpha(alpha)
    spec = spectral_decompose(v.base)
    return frechet_derivative(spec, v.mixture, embedding_function(alpha))


def representation_convert(
    base: np.ndarray, w: np.ndarray, from_alpha: float, to_alpha: float
) -> np.ndarray:
    """Convert a tangent representation between embedding orders at a base.

    Entrywise in the eigenbasis: divide by the divided-difference kernel of
    the source embedding, multiply by the target one. Both kernels are
    strictly positive, so the conversion is exactly invertible.
    """
    spec = spectral_decompose(base)
    low = float(spec.eigenvalues.min())
    if low <= 0.0:
        raise ValueError(f"base is not positive definite: min eigenvalue {low:.3e}")
    k_from = divided_difference_matrix(spec.eigenvalues, embedding_function(from_alpha))
    k_to = divided_difference_matrix(spec.eigenvalues, embedding_function(to_alpha))
    wt = spec.to_eigenbasis(np.asarray(w, dtype=complex))
    out = spec.from_eigenbasis(wt / k_from * k_to)
    if np.abs(np.asarray(w) - np.asarray(w).conj().T).max() <= 1e-12:
        out = hermitize(out)
    return out


def sphere_project(rho: np.ndarray, alpha: float, a: np.ndarray) -> np.ndarray:
    """Project onto the tangent space of the embedded unit-trace manifold.

    Pi(A) = A - Tr(rho^((1+alpha)/2) A) * rho^((1-alpha)/2). Idempotent at a
    unit-trace base; defined for alpha in [-1, 1] (the +-1 limits use
    rho^0 = I on the corresponding side).
    """
    alpha = _check_alpha(alpha)
    a = check_hermitian(a)
    spec = spectral_decompose(check_state(rho))
    p_plus = apply_scalar_function(spec, lambda x: x ** (0.5 * (1.0 + alpha)))
    p_minus = apply_scalar_function(spec, lambda x: x ** (0.5 * (1.0 - alpha)))
    coeff = float(np.trace(p_plus @ a).real)
    return a - coeff * p_minus


@dataclass
class ParametrizedFamily:
    """A chart theta -> positive matrix, with optional analytic derivatives.

    ``jacobian(theta, i)`` returns the i-th partial of the chart and
    ``hessian(theta, i, j)`` the second partial; when absent, consumers fall
    back to central differences with step fd_step * max(1, |theta_i|).
    Charts must keep the spectrum above ``guard`` (domain guard).
    """

    param_dim: int
    chart: Callable[[np.ndarray], np.ndarray]
    jacobian: Optional[Callable[[np.ndarray, int], np.ndarray]] = None
    hessian: Optional[Callable[[np.ndarray, int, int], np.ndarray]] = None
    fd_step: float = 1e-4
    guard: float = CHART_MIN_EIGENVALUE

    @property
    def has_analytic_second_order(self) -> bool:
        return self.jacobian is not None and self.hessian is not None

    def point(self, theta: np.ndarray) -> np.ndarray:
        theta = np.atleast_1d(np.asarray(theta, dtype=float))
        if theta.shape != (self.param_dim,):
            raise ValueError(
                f"parameter shape {theta.shape} does not match param_dim {self.param_dim}"
            )
        try:
            sigma = check_hermitian(self.chart(theta))
            low = float(np.linalg.eigvalsh(sigma).min())
            if low < self.guard:
                raise ValueError(
                    f"chart output min eigenvalue {low:.3e} below guard {self.guard:.1e}"
                )
        except ValueError as exc:
            raise ValueError(f"chart evaluation failed at theta={theta.tolist()}: {exc}") from exc
        return sigma

    def tangent_matrix(self, theta: np.ndarray, i: int) -> np.ndarray:
        theta = np.atleast_1d(np.asarray(theta, dtype=float))
        if not 0 <= i < self.param_dim:
            raise ValueError(f"direction index {i} out of range for param_dim {self.param_dim}")
        if self.jacobian is not None:
            return check_hermitian(self.jacobian(theta, i))
        h = self.fd_step * max(1.0, abs(theta[i]))
        up = theta.copy()
        dn = theta.copy()
        up[i] += h
        dn[i] -= h
        return hermitize((self.point(up) - self.point(dn)) / (2.0 * h))


def family_tangent(family: ParametrizedFamily, theta: np.ndarray, i: int) -> TangentVector:
    """Coordinate tangent vector of a chart at theta (mixture representation)."""
    base = family.point(theta)
    m = family.tangent_matrix(theta, i)
    if abs(float(np.trace(base).real) - 1.0) <= STATE_TRACE_TOL:
        # unit-trace chart: kill the round-off trace so the invariant is exact
        n = base.shape[0]
        m = m - (np.trace(m) / n) * np.eye(n) if abs(np.trace(m)) <= 1e-8 else m
        return state_tangent(base, m)
    return weight_tangent(base, m)


def basis_combination(xi: np.ndarray, basis: Sequence[np.ndarray]) -> np.ndarray:
    xi = np.asarray(xi, dtype=float)
    if xi.shape != (len(basis),):
        raise ValueError(f"coordinate shape {xi.shape} does not match basis size {len(basis)}")
    out = np.zeros_like(np.asarray(basis[0], dtype=complex))
    for c, x in zip(xi, basis):
        out = out + c * x
    return out


def affine_coordinates(
    sigma: np.ndarray, alpha: float, basis: Sequence[np.ndarray]
) -> np.ndarray:
    """Coordinates of the embedded matrix in a self-adjoint basis.

    Solves sum_i xi_i X_i = embed(sigma) through the basis Gram matrix;
    a singular Gram matrix is rejected.
    """
    spec = spectral_decompose(check_weight(sigma))
    target = apply_scalar_function(spec, embedding_function(alpha))
    d = len(basis)
    gram = np.empty((d, d), dtype=float)
    rhs = np.empty(d, dtype=float)
    for i, x in enumerate(basis):
        rhs[i] = hs_inner(x, target).real
        for j in range(i + 1):
            gram[i, j] = gram[j, i] = hs_inner(x, basis[j]).real
    if np.linalg.cond(gram) > 1e12:
        raise ValueError("basis Gram matrix is singular or nearly so; need a linearly independent basis")
    return np.linalg.solve(gram, rhs)


def xi_affine_family(
    basis: Sequence[np.ndarray], alpha: float, analytic: bool = True
) -> ParametrizedFamily:
    """Chart in which the order-alpha embedding is linear: embed(sigma) = sum xi_i X_i.

    With ``analytic=True`` the chart carries exact first and second
    derivatives through the inverse-embedding matrix calculus; with False it
    is a bare chart for finite-difference consumers.
    """
    alpha = _check_alpha(alpha)
    basis = [check_hermitian(x) for x in basis]
    inverse = inverse_embedding_function(alpha)

    def chart(xi):
        y = basis_combination(xi, basis)
        spec = spectral_decompose(y)
        if alpha != 1.0 and float(spec.eigenvalues.min()) <= 0.0:
            raise ValueError(
                f"embedded coordinates leave the positive cone: min eigenvalue "
                f"{float(spec.eigenvalues.min()):.3e}"
            )
        return apply_scalar_function(spec, inverse)

    jac = hess = None
    if analytic:

        def jac(xi, i):
            spec = spectral_decompose(basis_combination(xi, basis))
            return frechet_derivative(spec, basis[i], inverse)

        def hess(xi, i, j):
            spec = spectral_decompose(basis_combination(xi, basis))
            return frechet_second_derivative(spec, basis[i], basis[j], inverse)

    return ParametrizedFamily(param_dim=len(basis), chart=chart, jacobian=jac, hessian=hess)


def linear_family(
    base: np.ndarray, directions: Sequence[np.ndarray], fd_step: float = 1e-4
) -> ParametrizedFamily:
    """sigma(theta) = base + sum theta_k D_k with exact chart derivatives."""
    base = check_hermitian(base)
    directions = [check_hermitian(d) for d in directions]
    zero = np.zeros_like(base)

    def chart(theta):
        return base + basis_combination(theta, directions)

    return ParametrizedFamily(
        param_dim=len(directions),
        chart=chart,
        jacobian=lambda theta, i: directions[i],
        hessian=lambda theta, i, j: zero,
        fd_step=fd_step,
    )


def simplex_family(n: int) -> ParametrizedFamily:
    """Diagonal density chart p = (theta_1, ..., theta_{n-1}, 1 - sum theta)."""
    base = np.zeros((n, n), dtype=complex)
    base[n - 1, n - 1] = 1.0
    directions = []
    for i in range(n - 1):
        d = np.zeros((n, n), dtype=complex)
        d[i, i] = 1.0
        d[n - 1, n - 1] = -1.0
        directions.append(d)
    return linear_family(base, directions)

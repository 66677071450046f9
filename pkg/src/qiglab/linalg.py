"""Dense Hermitian spectral calculus.

Eigendecomposition-backed matrix functions, first and second directional
(Frechet) derivatives via divided differences, the Hilbert-Schmidt inner
product, and the splitting of a self-adjoint direction into the part that
commutes with a base matrix plus a commutator remainder.

Everything works on plain complex numpy arrays; matrices are small and dense.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional, Union

import numpy as np

__all__ = [
    "DEGENERACY_RTOL",
    "hermitize",
    "commutator",
    "check_hermitian",
    "hs_inner",
    "Spectrum",
    "spectral_decompose",
    "ScalarFunction",
    "identity_function",
    "log_function",
    "exp_function",
    "power_function",
    "apply_scalar_function",
    "divided_difference_matrix",
    "frechet_derivative",
    "frechet_second_derivative",
    "CommutantSplit",
    "commutant_split",
    "schatten_norm",
]

# Relative eigenvalue gap below which a pair is treated as coincident and the
# first divided difference falls back to the derivative at the midpoint.
DEGENERACY_RTOL = 1e-10

# Looser threshold for second divided differences, where the cancellation in
# the recursive quotient is one order worse.
_TRIPLE_RTOL = 1e-7

_HERMITIAN_TOL = 1e-12


def hermitize(a: np.ndarray) -> np.ndarray:
    """Symmetrize to (A + A†)/2, removing numerical skew."""
    a = np.asarray(a)
    return 0.5 * (a + a.conj().T)


def commutator(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return a @ b - b @ a


def check_hermitian(a: np.ndarray, tol: float = _HERMITIAN_TOL) -> np.ndarray:
    """Return ``a`` as a complex array, rejecting non-self-adjoint input."""
    a = np.asarray(a, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {a.shape}")
    dev = np.abs(a - a.conj().T)
    worst = float(dev.max()) if dev.size else 0.0
    if worst > tol:
        i, j = np.unravel_index(int(dev.argmax()), dev.shape)
        raise ValueError(
            "matrix is not self-adjoint: |A - A†| reaches "
            f"{worst:.3e} at entry ({i}, {j}), tolerance {tol:.1e}"
        )
    return a


def hs_inner(a: np.ndarray, b: np.ndarray) -> complex:
    """Hilbert-Schmidt inner product Tr(A† B).

    Real whenever both arguments are self-adjoint; returned as a complex
    scalar so that general arguments round-trip faithfully.
    """
    a = np.asarray(a)
    b = np.asarray(b)
    if a.shape != b.shape:
        raise ValueError(f"dimension mismatch: {a.shape} vs {b.shape}")
    return complex(np.sum(a.conj() * b))


def schatten_norm(a: np.ndarray, order: float) -> float:
    """Schatten r-norm (sum of singular values to the r-th power)^(1/r)."""
    s = np.linalg.svd(np.asarray(a, dtype=complex), compute_uv=False)
    return float(np.sum(s**order) ** (1.0 / order))


@dataclass(frozen=True)
class Spectrum:
    """Eigenvalues (real, ascending) and eigenvectors of a Hermitian matrix."""

    eigenvalues: np.ndarray
    unitary: np.ndarray

    @property
    def dim(self) -> int:
        return int(self.eigenvalues.shape[0])

    def matrix(self) -> np.ndarray:
        """Reconstruct U diag(λ) U†."""
        return (self.unitary * self.eigenvalues) @ self.unitary.conj().T

    def to_eigenbasis(self, m: np.ndarray) -> np.ndarray:
        return self.unitary.conj().T @ m @ self.unitary

    def from_eigenbasis(self, m: np.ndarray) -> np.ndarray:
        return self.unitary @ m @ self.unitary.conj().T


def spectral_decompose(a: np.ndarray, tol: float = _HERMITIAN_TOL) -> Spectrum:
    """Eigendecomposition of a self-adjoint matrix.

    Rejects input whose self-adjointness violation exceeds ``tol``; the error
    reports the size and location of the worst entry.
    """
    a = check_hermitian(a, tol)
    w, u = np.linalg.eigh(a)
    return Spectrum(w, u)


@dataclass(frozen=True)
class ScalarFunction:
    """A scalar function with derivatives, for spectral calculus.

    ``pair``, when present, evaluates the first divided difference
    (f(x) - f(y))/(x - y) for x != y in a cancellation-free form; without it
    the generic quotient with the coincidence threshold is used. ``deriv2``
    is needed only where coincident eigenvalue triples occur in second
    derivatives.
    """

    name: str
    fn: Callable
    deriv: Callable
    deriv2: Optional[Callable] = None
    pair: Optional[Callable] = None

    def __call__(self, x):
        return self.fn(x)


def identity_function() -> ScalarFunction:
    return ScalarFunction(
        "identity",
        fn=lambda x: x,
        deriv=lambda x: 1.0,
        deriv2=lambda x: 0.0,
        pair=lambda x, y: 1.0,
    )


def log_function() -> ScalarFunction:
    # pair: (log x - log y)/(x - y) = log1p((x-y)/y)/(x-y), exact for x ~ y
    return ScalarFunction(
        "log",
        fn=np.log,
        deriv=lambda x: 1.0 / x,
        deriv2=lambda x: -1.0 / (x * x),
        pair=lambda x, y: math.log1p((x - y) / y) / (x - y),
    )


def exp_function() -> ScalarFunction:
    return ScalarFunction(
        "exp",
        fn=np.exp,
        deriv=np.exp,
        deriv2=np.exp,
        pair=lambda x, y: math.exp(y) * math.expm1(x - y) / (x - y),
    )


def power_function(exponent: float, scale: float = 1.0, name: str = None) -> ScalarFunction:
    """scale * x**exponent on (0, inf), with a stable divided difference."""
    e, c = float(exponent), float(scale)

    def pair(x, y):
        # c*(x^e - y^e)/(x - y) = c*y^e*expm1(e*log1p((x-y)/y))/(x-y)
        return c * y**e * math.expm1(e * math.log1p((x - y) / y)) / (x - y)

    return ScalarFunction(
        name or f"{c:g}*x^{e:g}",
        fn=lambda x: c * x**e,
        deriv=lambda x: c * e * x ** (e - 1.0),
        deriv2=lambda x: c * e * (e - 1.0) * x ** (e - 2.0),
        pair=pair,
    )


def _as_scalar_function(f) -> ScalarFunction:
    if isinstance(f, ScalarFunction):
        return f
    return ScalarFunction(getattr(f, "__name__", "f"), fn=f, deriv=None)


def apply_scalar_function(spec: Spectrum, f) -> np.ndarray:
    """Apply f eigenvalue-wise: U diag(f(λ)) U†.

    Raises a domain error naming the offending eigenvalue if f is undefined
    (non-finite) there. Real-valued f yields a symmetrized Hermitian result;
    complex-valued f is returned as the general matrix it is.
    """
    fun = _as_scalar_function(f)
    values = []
    for lam in spec.eigenvalues:
        with np.errstate(all="ignore"):
            try:
                v = fun.fn(lam)
            except (ValueError, ZeroDivisionError, OverflowError) as exc:
                raise ValueError(
                    f"scalar function {fun.name!r} undefined at eigenvalue {lam!r}"
                ) from exc
        if not np.all(np.isfinite(v)):
            raise ValueError(
                f"scalar function {fun.name!r} undefined at eigenvalue {lam!r}"
            )
        values.append(v)
    values = np.asarray(values)
    out = (spec.unitary * values) @ spec.unitary.conj().T
    if not np.iscomplexobj(values) or np.abs(values.imag).max() == 0.0:
        out = hermitize(out)
    return out


def _pair_difference(fun: ScalarFunction, x: float, y: float, rtol: float) -> float:
    if x == y:
        return fun.deriv(x)
    if fun.pair is not None:
        return fun.pair(x, y)
    if abs(x - y) <= rtol * max(1.0, abs(x), abs(y)):
        if fun.deriv is None:
            raise ValueError(
                f"scalar function {fun.name!r} needs a derivative near the "
                f"coincident eigenvalue pair ({x!r}, {y!r})"
            )
        return fun.deriv(0.5 * (x + y))
    return (fun.fn(x) - fun.fn(y)) / (x - y)


def divided_difference_matrix(
    eigenvalues: np.ndarray, f, rtol: float = DEGENERACY_RTOL
) -> np.ndarray:
    """Matrix of first divided differences K[i, j] = f[λi, λj].

    Off the diagonal this is (f(λi) - f(λj))/(λi - λj); coincident pairs
    (relative gap below ``rtol``) use f' at the midpoint.
    """
    fun = _as_scalar_function(f)
    lam = np.asarray(eigenvalues, dtype=float)
    n = lam.shape[0]
    k = np.empty((n, n), dtype=float)
    for i in range(n):
        k[i, i] = fun.deriv(lam[i]) if fun.deriv is not None else _pair_difference(
            fun, lam[i], lam[i], rtol
        )
        for j in range(i):
            k[i, j] = k[j, i] = _pair_difference(fun, lam[i], lam[j], rtol)
    return k


def frechet_derivative(spec: Spectrum, direction: np.ndarray, f) -> np.ndarray:
    """Directional derivative of the matrix function f at the decomposed point.

    Daleckii-Krein form: in the eigenbasis, entry (i, j) of the direction is
    scaled by the first divided difference f[λi, λj].
    """
    d = np.asarray(direction, dtype=complex)
    if d.shape != (spec.dim, spec.dim):
        raise ValueError(f"direction shape {d.shape} does not match dim {spec.dim}")
    k = divided_difference_matrix(spec.eigenvalues, f)
    out = spec.from_eigenbasis(k * spec.to_eigenbasis(d))
    if np.abs(d - d.conj().T).max() <= _HERMITIAN_TOL:
        out = hermitize(out)
    return out


def _triple_difference(fun: ScalarFunction, x: float, y: float, z: float) -> float:
    """Second divided difference f[x, y, z], symmetric in its arguments."""
    a, b, c = sorted((x, y, z))
    tol = _TRIPLE_RTOL * max(1.0, abs(a), abs(c))
    if c - a <= tol:
        if fun.deriv2 is None:
            raise ValueError(
                f"scalar function {fun.name!r} needs a second derivative at the "
                f"coincident eigenvalue triple near {a!r}"
            )
        return 0.5 * fun.deriv2((a + b + c) / 3.0)
    if b - a <= tol:
        m = 0.5 * (a + b)
        return (_pair_difference(fun, m, c, DEGENERACY_RTOL) - fun.deriv(m)) / (c - m)
    if c - b <= tol:
        m = 0.5 * (b + c)
        return (_pair_difference(fun, a, m, DEGENERACY_RTOL) - fun.deriv(m)) / (a - m)
    return (
        _pair_difference(fun, a, b, DEGENERACY_RTOL)
        - _pair_difference(fun, b, c, DEGENERACY_RTOL)
    ) / (a - c)


def frechet_second_derivative(
    spec: Spectrum, first: np.ndarray, second: np.ndarray, f
) -> np.ndarray:
    """Bilinear second directional derivative D²f(A)[E, F].

    In the eigenbasis,
    out[i, j] = Σ_k f[λi, λk, λj] (E[i,k] F[k,j] + F[i,k] E[k,j])
    with f[.,.,.] the second divided difference.
    """
    fun = _as_scalar_function(f)
    e = spec.to_eigenbasis(np.asarray(first, dtype=complex))
    g = spec.to_eigenbasis(np.asarray(second, dtype=complex))
    lam = spec.eigenvalues
    n = spec.dim
    t = np.empty((n, n, n), dtype=float)
    cache: dict = {}
    for i in range(n):
        for k in range(n):
            for j in range(n):
                key = tuple(sorted((i, k, j)))
                if key not in cache:
                    cache[key] = _triple_difference(fun, lam[i], lam[k], lam[j])
                t[i, k, j] = cache[key]
    out = np.einsum("ikj,ik,kj->ij", t, e, g) + np.einsum("ikj,ik,kj->ij", t, g, e)
    out = spec.from_eigenbasis(out)
    herm = (
        np.abs(first - np.asarray(first).conj().T).max() <= _HERMITIAN_TOL
        and np.abs(second - np.asarray(second).conj().T).max() <= _HERMITIAN_TOL
    )
    return hermitize(out) if herm else out


@dataclass(frozen=True)
class CommutantSplit:
    """Decomposition D = commutant_part + [base, delta].

    ``commutant_part`` commutes with the base matrix (it is the block-diagonal
    restriction onto equal-eigenvalue blocks) and is Hilbert-Schmidt
    orthogonal to the commutator remainder; ``delta`` is anti-self-adjoint
    and vanishes inside the blocks.
    """

    commutant_part: np.ndarray
    delta: np.ndarray


def commutant_split(
    spec: Spectrum, direction: np.ndarray, rtol: float = DEGENERACY_RTOL
) -> CommutantSplit:
    """Split a self-adjoint direction relative to the decomposed base.

    In the eigenbasis the commuting part keeps the entries on (near-)equal
    eigenvalue pairs; the remainder fixes delta entrywise through
    delta[i, j] = D[i, j]/(λi - λj). Near-degenerate pairs are absorbed into
    the commutant part by the threshold, never a crash.
    """
    d = check_hermitian(direction)
    if d.shape != (spec.dim, spec.dim):
        raise ValueError(f"direction shape {d.shape} does not match dim {spec.dim}")
    lam = spec.eigenvalues
    dt = spec.to_eigenbasis(d)
    gap = lam[:, None] - lam[None, :]
    scale = np.maximum(1.0, np.maximum(np.abs(lam)[:, None], np.abs(lam)[None, :]))
    close = np.abs(gap) <= rtol * scale
    comm = np.where(close, dt, 0.0)
    with np.errstate(divide="ignore", invalid="ignore"):
        delta = np.where(close, 0.0, dt / np.where(close, 1.0, gap))
    comm = hermitize(spec.from_eigenbasis(comm))
    delta = spec.from_eigenbasis(delta)
    delta = 0.5 * (delta - delta.conj().T)  # anti-self-adjoint by construction
    return CommutantSplit(comm, delta)

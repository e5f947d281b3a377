"""Barut-Girardello coherent states of the Chebyshev oscillators.

States are unnormalized coefficient vectors in the psi_n basis with d_0 = 1
and d_{n+1} = z d_n / (sqrt2 b_n), so a_minus d = z d holds exactly on every
component the truncation keeps. The series converges for |z| < 1/sqrt2.

With b_n = 1/2 for n >= 1 every coefficient past the vacuum is
d_n = r^n / (2 b_0), r = sqrt2 z, which gives all the closed forms below in
terms of b_0 alone.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .oscillator_algebra import ladder_matrices
from .polynomial_basis import Kind, eval_basis_all
from .quadrature import CoefficientSource, coefficient_b0, recurrence_coefficients

SQRT2 = math.sqrt(2.0)
RADIUS = 1.0 / SQRT2
DEFAULT_MARGIN = 1e-6


def _check_disk(z: complex, margin: float = 0.0) -> None:
    if not abs(z) < RADIUS - margin:
        raise ValueError(
            f"|z| = {abs(z):.6g} is outside the convergence disk |z| < 1/sqrt(2)"
            + (f" (margin {margin:g})" if margin else "")
        )


@dataclass(frozen=True)
class CoherentStateVector:
    kind: Kind
    z: complex
    source: CoefficientSource
    coeffs: np.ndarray
    norm_sq_series: float
    tail_bound: float

    @property
    def dim(self) -> int:
        return len(self.coeffs)

    def paper_scaled(self) -> np.ndarray:
        """Coefficients multiplied by sqrt2, the overall scale of the printed first-kind series."""
        return SQRT2 * self.coeffs


def bg_state(kind, z: complex, dim: int, source=CoefficientSource.DERIVED,
             margin: float = DEFAULT_MARGIN) -> CoherentStateVector:
    kind = Kind.parse(kind)
    source = CoefficientSource.parse(source)
    z = complex(z)
    _check_disk(z, margin)
    if dim < 2:
        raise ValueError(f"dim must be at least 2, got {dim}")
    b = recurrence_coefficients(kind, dim, source)
    d = np.empty(dim, dtype=complex)
    d[0] = 1.0
    for n in range(dim - 1):
        d[n + 1] = z * d[n] / (SQRT2 * b[n])
    norm_sq = float(np.sum(np.abs(d) ** 2))
    # past the vacuum the ratio |d_{n+1}/d_n|^2 is 2|z|^2 exactly
    q = 2.0 * abs(z) ** 2
    tail = float(abs(d[-1]) ** 2 * q / (1.0 - q))
    return CoherentStateVector(kind, z, source, d, norm_sq, tail)


def annihilation_residual(state: CoherentStateVector, interior: bool = True) -> float:
    """||(a_minus - z) d|| / ||d||.

    With ``interior`` the last component is excluded, since a_minus d there
    would need d_dim. Without it the residual is |z| |d_{dim-1}| / ||d||.
    """
    am, _ = ladder_matrices(state.kind, state.dim, state.source)
    r = am.entries @ state.coeffs - state.z * state.coeffs
    if interior:
        r = r[:-1]
    return float(np.linalg.norm(r) / np.linalg.norm(state.coeffs))


def norm_squared_closed(kind, z: complex, source=CoefficientSource.DERIVED) -> float:
    """sum_n |d_n|^2 = 1 + |z|^2 / (2 b_0^2 (1 - 2|z|^2)).

    (1 - |z|^2)/(1 - 2|z|^2) when b_0 = 1/sqrt2, 1/(1 - 2|z|^2) when b_0 = 1/2.
    """
    _check_disk(complex(z))
    b0 = coefficient_b0(kind, source)
    a2 = abs(z) ** 2
    return 1.0 + a2 / (2.0 * b0 * b0 * (1.0 - 2.0 * a2))


def paper_claimed_norm(z: complex) -> float:
    """1 / (1 - 2|z|^2), the printed normalization."""
    _check_disk(complex(z))
    return 1.0 / (1.0 - 2.0 * abs(z) ** 2)


def wavefunction_series(state: CoherentStateVector, x):
    """sum_n d_n psi_n(x), unnormalized."""
    psi = eval_basis_all(state.kind, state.dim - 1, x)
    vals = np.tensordot(state.coeffs, psi, axes=(0, 0))
    return complex(vals) if np.ndim(vals) == 0 else vals


def chebyshev_t_generating(r: complex, x):
    """sum_n r^n T_n(x) = (1 - r x) / (1 - 2 r x + r^2), |r| < 1."""
    x = np.asarray(x, dtype=float)
    return (1.0 - r * x) / (1.0 - 2.0 * r * x + r * r)


def chebyshev_u_generating(r: complex, x):
    """sum_n r^n U_n(x) = 1 / (1 - 2 r x + r^2), |r| < 1."""
    x = np.asarray(x, dtype=float)
    return 1.0 / (1.0 - 2.0 * r * x + r * r)


def wavefunction_closed(kind, z: complex, x, source=CoefficientSource.DERIVED):
    """Closed form of sum_n d_n psi_n(x).

    For the first kind this is exactly (1 - sqrt2 z x) / (1 - 2 sqrt2 z x + 2 z^2).
    """
    kind = Kind.parse(kind)
    z = complex(z)
    _check_disk(z)
    x = np.asarray(x, dtype=float)
    if np.any(np.abs(x) > 1.0):
        raise ValueError("x must lie in [-1, 1]")
    b0 = coefficient_b0(kind, source)
    r = SQRT2 * z
    if kind is Kind.FIRST:
        vals = 1.0 + (SQRT2 / (2.0 * b0)) * (chebyshev_t_generating(r, x) - 1.0)
    else:
        vals = 1.0 + (1.0 / (2.0 * b0)) * (chebyshev_u_generating(r, x) - 1.0)
    return complex(vals) if vals.ndim == 0 else vals


def paper_closed_form(z: complex, x):
    """Printed normalized first-kind state sqrt(1 - 2|z|^2) (1 - sqrt2 z x)/(1 - 2 sqrt2 z x + 2 z^2)."""
    z = complex(z)
    _check_disk(z)
    return math.sqrt(1.0 - 2.0 * abs(z) ** 2) * chebyshev_t_generating(SQRT2 * z, x)


def overlap_kernel(kind, z1: complex, z2: complex, source=CoefficientSource.DERIVED) -> complex:
    """sum_n conj(d_n(z1)) d_n(z2) = 1 + w / (2 b_0^2 (1 - 2w)), w = conj(z1) z2."""
    z1, z2 = complex(z1), complex(z2)
    _check_disk(z1)
    _check_disk(z2)
    b0 = coefficient_b0(kind, source)
    w = z1.conjugate() * z2
    return 1.0 + w / (2.0 * b0 * b0 * (1.0 - 2.0 * w))


@dataclass
class BoundaryIntegral:
    diagonal: np.ndarray
    off_diagonal_max: float
    matrix: np.ndarray


def boundary_identity(kind, dim: int, n_samples: int | None = None,
                      source=CoefficientSource.DERIVED) -> BoundaryIntegral:
    """(1/2pi) integral of d d^* over z = e^{i theta}/sqrt2, uniform trapezoid in theta.

    Coefficients are formed directly on the circle, which is outside the
    open disk accepted by ``bg_state``.
    """
    kind = Kind.parse(kind)
    if n_samples is None:
        n_samples = 4 * dim
    if n_samples < 4 * dim:
        raise ValueError(f"n_samples must be at least 4*dim = {4 * dim}, got {n_samples}")
    b = recurrence_coefficients(kind, dim, source)
    theta = 2.0 * math.pi * np.arange(n_samples) / n_samples
    z = np.exp(1j * theta) / SQRT2
    d = np.empty((dim, n_samples), dtype=complex)
    d[0] = 1.0
    for n in range(dim - 1):
        d[n + 1] = z * d[n] / (SQRT2 * b[n])
    M = (d @ d.conj().T) / n_samples
    off = M - np.diag(np.diag(M))
    return BoundaryIntegral(np.real(np.diag(M)).copy(), float(np.max(np.abs(off))), M)


def boundary_identity_diagonal(kind, dim: int, n_samples: int | None = None,
                               source=CoefficientSource.DERIVED) -> np.ndarray:
    return boundary_identity(kind, dim, n_samples, source).diagonal


def boundary_prediction(kind, dim: int, source=CoefficientSource.DERIVED) -> np.ndarray:
    """|d_n|^2 on |z| = 1/sqrt2: 1 for n = 0, 1/(4 b_0^2) after."""
    b0 = coefficient_b0(kind, source)
    out = np.full(dim, 1.0 / (4.0 * b0 * b0))
    out[0] = 1.0
    return out

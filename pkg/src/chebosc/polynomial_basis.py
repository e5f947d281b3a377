"""Orthonormal Chebyshev bases and their measures.

Two families live here:

* first kind:  psi_0 = 1, psi_n = sqrt(2) T_n  in L^2([-1, 1], dx / (pi sqrt(1 - x^2)))
* second kind: psi_n = U_n                      in L^2([-1, 1], 2 sqrt(1 - x^2) dx / pi)

Values are produced two independent ways, by the forward three-term
recurrence and by the trigonometric closed forms in theta = arccos(x), so
each can be used to check the other.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

SQRT2 = math.sqrt(2.0)


class Kind(str, enum.Enum):
    FIRST = "first"
    SECOND = "second"

    @classmethod
    def parse(cls, value: "Kind | str") -> "Kind":
        if isinstance(value, cls):
            return value
        return cls(str(value).lower())


def basis_norm(kind: Kind | str, n: int) -> float:
    """Factor taking the raw polynomial of degree ``n`` to the orthonormal psi_n."""
    kind = Kind.parse(kind)
    if n < 0:
        raise ValueError(f"basis index must be non-negative, got {n}")
    if kind is Kind.FIRST:
        return 1.0 if n == 0 else SQRT2
    return 1.0


def _check_domain(x: np.ndarray) -> None:
    if np.any(np.abs(x) > 1.0):
        raise ValueError("x must lie in [-1, 1]")


def raw_polynomials(kind: Kind | str, nmax: int, x) -> np.ndarray:
    """T_0..T_nmax (or U_0..U_nmax) at ``x`` by forward recurrence.

    Returns an array of shape ``(nmax + 1,) + shape(x)``.
    """
    kind = Kind.parse(kind)
    x = np.asarray(x, dtype=float)
    out = np.empty((nmax + 1,) + x.shape)
    out[0] = 1.0
    if nmax >= 1:
        out[1] = x if kind is Kind.FIRST else 2.0 * x
    for k in range(1, nmax):
        out[k + 1] = 2.0 * x * out[k] - out[k - 1]
    return out


def eval_basis_all(kind: Kind | str, nmax: int, x) -> np.ndarray:
    """psi_0..psi_nmax at ``x``; shape ``(nmax + 1,) + shape(x)``."""
    kind = Kind.parse(kind)
    x = np.asarray(x, dtype=float)
    _check_domain(x)
    vals = raw_polynomials(kind, nmax, x)
    if kind is Kind.FIRST and nmax >= 1:
        vals[1:] *= SQRT2
    return vals


def eval_basis(kind: Kind | str, n: int, x):
    """psi_n(x) via the three-term recurrence. Accepts scalar or array ``x``."""
    if n < 0:
        raise ValueError(f"basis index must be non-negative, got {n}")
    vals = eval_basis_all(kind, n, x)[n]
    return float(vals) if vals.ndim == 0 else vals


def eval_trig(kind: Kind | str, n: int, theta):
    """psi_n(cos theta) from cos(n theta) or sin((n+1) theta) / sin(theta).

    At theta in {0, pi} the second-kind value is the removable limit
    U_n(+-1) = (+-1)^n (n + 1).
    """
    kind = Kind.parse(kind)
    if n < 0:
        raise ValueError(f"basis index must be non-negative, got {n}")
    theta = np.asarray(theta, dtype=float)
    if np.any((theta < 0.0) | (theta > math.pi)):
        raise ValueError("theta must lie in [0, pi]")
    if kind is Kind.FIRST:
        vals = basis_norm(kind, n) * np.cos(n * theta)
    else:
        s = np.sin(theta)
        at_zero = theta == 0.0
        at_pi = theta == math.pi
        safe = np.where(at_zero | at_pi, 1.0, s)
        vals = np.sin((n + 1) * theta) / safe
        vals = np.where(at_zero, n + 1.0, vals)
        vals = np.where(at_pi, (-1.0) ** n * (n + 1.0), vals)
    return float(vals) if np.ndim(vals) == 0 else vals


def measure_density(kind: Kind | str, x):
    """Normalized orthogonality density (unit total mass) at ``x``."""
    kind = Kind.parse(kind)
    x = np.asarray(x, dtype=float)
    if kind is Kind.FIRST:
        if np.any(np.abs(x) >= 1.0):
            raise ValueError("first-kind density is undefined for |x| >= 1")
        vals = 1.0 / (math.pi * np.sqrt(1.0 - x * x))
    else:
        _check_domain(x)
        vals = 2.0 * np.sqrt(1.0 - x * x) / math.pi
    return float(vals) if vals.ndim == 0 else vals


def derivative_times_weight(kind: Kind | str, n: int, x):
    """(1 - x^2) psi_n'(x), computed without the recurrence.

    First kind uses T_n' = n U_{n-1}; second kind differentiates
    sin((n+1) theta) / sin(theta) in theta. Interior points only.
    """
    kind = Kind.parse(kind)
    x = np.asarray(x, dtype=float)
    if np.any(np.abs(x) >= 1.0):
        raise ValueError("derivative oracle needs |x| < 1")
    theta = np.arccos(x)
    s = np.sin(theta)
    if kind is Kind.FIRST:
        if n == 0:
            vals = np.zeros_like(x)
        else:
            # U_{n-1}(cos t) = sin(n t) / sin t
            vals = basis_norm(kind, n) * n * np.sin(n * theta) * s
    else:
        m = n + 1
        vals = -m * np.cos(m * theta) + np.sin(m * theta) * np.cos(theta) / s
    return float(vals) if vals.ndim == 0 else vals


@dataclass(frozen=True)
class RecurrenceSystem:
    """A polynomial kind bundled with its measure and basis normalization."""

    kind: Kind
    support: tuple[float, float] = (-1.0, 1.0)

    @classmethod
    def of(cls, kind: Kind | str) -> "RecurrenceSystem":
        return cls(Kind.parse(kind))

    @property
    def measure_density(self) -> Callable:
        return lambda x: measure_density(self.kind, x)

    def basis_norm(self, n: int) -> float:
        return basis_norm(self.kind, n)

    def eval(self, n: int, x):
        return eval_basis(self.kind, n, x)

    def eval_trig(self, n: int, theta):
        return eval_trig(self.kind, n, theta)

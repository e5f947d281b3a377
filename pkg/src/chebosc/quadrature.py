"""Gauss-Chebyshev rules for the two normalized measures, and recurrence
coefficients recovered from them by inner products."""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .polynomial_basis import Kind, eval_basis_all

HALF = 0.5
INV_SQRT2 = 1.0 / math.sqrt(2.0)
SNAP_TOL = 1e-12


class CoefficientSource(str, enum.Enum):
    """Where b_n comes from: the printed values or the quadrature oracle."""

    PAPER = "paper"
    DERIVED = "derived"

    @classmethod
    def parse(cls, value: "CoefficientSource | str") -> "CoefficientSource":
        if isinstance(value, cls):
            return value
        return cls(str(value).lower())


@dataclass(frozen=True)
class QuadratureRule:
    kind: Kind
    m: int
    nodes: np.ndarray
    weights: np.ndarray

    @property
    def exact_degree(self) -> int:
        return 2 * self.m - 1

    def integrate(self, values) -> float:
        return float(np.dot(self.weights, values))


def gauss_chebyshev_rule(kind: Kind | str, m: int) -> QuadratureRule:
    """m-point Gauss rule for the unit-mass first- or second-kind measure."""
    kind = Kind.parse(kind)
    if m < 1:
        raise ValueError(f"node count must be positive, got {m}")
    k = np.arange(1, m + 1)
    if kind is Kind.FIRST:
        nodes = np.cos((2 * k - 1) * math.pi / (2 * m))
        weights = np.full(m, 1.0 / m)
    else:
        ang = k * math.pi / (m + 1)
        nodes = np.cos(ang)
        weights = (2.0 / (m + 1)) * np.sin(ang) ** 2
    return QuadratureRule(kind, m, nodes, weights)


def inner_product(rule: QuadratureRule, f, g) -> float:
    """sum_k w_k f(x_k) g(x_k); ``f`` and ``g`` must accept node arrays."""
    x = rule.nodes
    return float(np.sum(rule.weights * np.asarray(f(x)) * np.asarray(g(x))))


def gram_matrix(kind: Kind | str, count: int, rule: QuadratureRule) -> np.ndarray:
    """<psi_m, psi_n> for m, n < count."""
    vals = eval_basis_all(kind, count - 1, rule.nodes)
    return (vals * rule.weights) @ vals.T


def derive_recurrence_coefficient(kind: Kind | str, n: int, rule: QuadratureRule) -> float:
    """<x psi_n, psi_{n+1}> under ``rule``."""
    kind = Kind.parse(kind)
    if n < 0:
        raise ValueError(f"coefficient index must be non-negative, got {n}")
    if rule.exact_degree < 2 * n + 3:
        raise ValueError(f"rule with {rule.m} nodes is not exact to degree {2 * n + 3}")
    vals = eval_basis_all(kind, n + 1, rule.nodes)
    return float(np.sum(rule.weights * rule.nodes * vals[n] * vals[n + 1]))


def derive_diagonal_coefficient(kind: Kind | str, n: int, rule: QuadratureRule) -> float:
    """<x psi_n, psi_n>; zero for a symmetric measure."""
    vals = eval_basis_all(kind, n, rule.nodes)
    return float(np.sum(rule.weights * rule.nodes * vals[n] ** 2))


def _snap(value: float) -> float:
    for exact in (HALF, INV_SQRT2):
        if abs(value - exact) < SNAP_TOL:
            return exact
    return value


@lru_cache(maxsize=64)
def _derived(kind: Kind, count: int) -> tuple[float, ...]:
    rule = gauss_chebyshev_rule(kind, count + 2)
    vals = eval_basis_all(kind, count, rule.nodes)
    raw = np.sum(rule.weights * rule.nodes * vals[:-1] * vals[1:], axis=1)
    return tuple(_snap(float(b)) for b in raw)


def paper_coefficients(count: int) -> np.ndarray:
    """b_0 = 1/sqrt(2), b_n = 1/2 for n >= 1, as printed for both kinds."""
    b = np.full(count, HALF)
    if count:
        b[0] = INV_SQRT2
    return b


def recurrence_coefficients(
    kind: Kind | str, count: int, source: CoefficientSource | str = CoefficientSource.DERIVED
) -> np.ndarray:
    """b_0..b_{count-1} from the requested source.

    Derived values within 1e-12 of 1/2 or 1/sqrt(2) are replaced by the exact
    constant so downstream identities are not polluted by quadrature rounding.
    """
    kind = Kind.parse(kind)
    source = CoefficientSource.parse(source)
    if count < 0:
        raise ValueError("count must be non-negative")
    if count == 0:
        return np.zeros(0)
    if source is CoefficientSource.PAPER:
        return paper_coefficients(count)
    return np.array(_derived(kind, count))


def coefficient_b0(kind: Kind | str, source: CoefficientSource | str) -> float:
    return float(recurrence_coefficients(kind, 1, source)[0])

"""The operator A = (1 - x^2) d/dx and composite formulas built from it.

Each formula has the shape ``prefactor * R * K`` where ``K`` is a linear
combination of words in {A, X, N, I} and ``R`` is a product of resolvents
(N + sI)^{-1}. Words are read as operator products: the rightmost letter
acts first.

Two orderings are supported for where ``R`` sits:

* ``inverse_applied_last``:  prefactor * R @ K   (as printed)
* ``inverse_applied_first``: prefactor * K @ R

and two ways to handle a resolvent entry 1/(n+s) with n+s = 0:

* ``pseudo_inverse``: the entry is 0. Built with dense matrix products.
  Every entry where a singular row/column meets the structural band of ``K``
  is flagged, "divergent" if the coefficient there is nonzero and
  "indeterminate" (0 * inf) otherwise.
* ``index_limit``: each column n is evaluated with n treated as a
  continuous index t; numerator and denominator are polynomials in t and
  common factors (t - n) are cancelled before evaluating. Only genuinely
  divergent entries remain flagged.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from numpy.polynomial import Polynomial

from .oscillator_algebra import (
    TruncatedOperator,
    ladder_matrices,
    momentum_matrix,
    number_matrix,
    position_matrix,
)
from .polynomial_basis import Kind, eval_basis_all, derivative_times_weight
from .quadrature import CoefficientSource, recurrence_coefficients

INV_SQRT2 = 1.0 / math.sqrt(2.0)
ZERO_TOL = 1e-12


class Target(str, enum.Enum):
    A1_MINUS = "a1_minus"
    A1_PLUS = "a1_plus"
    A2_MINUS = "a2_minus"
    A2_PLUS = "a2_plus"
    P1 = "p1"
    P2 = "p2"


class Ordering(str, enum.Enum):
    INVERSE_APPLIED_LAST = "inverse_applied_last"
    INVERSE_APPLIED_FIRST = "inverse_applied_first"


class Resolvent(str, enum.Enum):
    PSEUDO_INVERSE = "pseudo_inverse"
    INDEX_LIMIT = "index_limit"


@dataclass(frozen=True)
class Formula:
    kind: Kind
    canonical: str  # "a_minus" | "a_plus" | "P"
    prefactor: complex
    shifts: tuple[int, ...]
    terms: tuple[tuple[float, str], ...]


FORMULAS: dict[Target, Formula] = {
    Target.A1_MINUS: Formula(Kind.FIRST, "a_minus", INV_SQRT2, (1,), ((1.0, "A"), (1.0, "XN"))),
    Target.A2_MINUS: Formula(Kind.SECOND, "a_minus", INV_SQRT2, (1,), ((1.0, "A"), (1.0, "XN"))),
    Target.A1_PLUS: Formula(Kind.FIRST, "a_plus", INV_SQRT2, (-1,), ((-1.0, "A"), (1.0, "XN"))),
    Target.A2_PLUS: Formula(
        Kind.SECOND, "a_plus", INV_SQRT2, (0,), ((-1.0, "A"), (1.0, "XN"), (2.0, "X"))
    ),
    Target.P1: Formula(Kind.FIRST, "P", 1j, (-1, 1), ((1.0, "NA"), (-1.0, "XN"))),
    Target.P2: Formula(
        Kind.SECOND, "P", 1j, (0, 2), ((1.0, "NA"), (1.0, "A"), (1.0, "XN"), (-1.0, "X"))
    ),
}


@dataclass(frozen=True)
class FormulaSpec:
    target: Target
    ordering: Ordering = Ordering.INVERSE_APPLIED_LAST

    @classmethod
    def of(cls, target, ordering=Ordering.INVERSE_APPLIED_LAST) -> "FormulaSpec":
        return cls(Target(target), Ordering(ordering))

    @property
    def formula(self) -> Formula:
        return FORMULAS[self.target]


@dataclass(frozen=True)
class SingularEntry:
    row: int
    col: int
    status: str  # "divergent" | "indeterminate"


@dataclass
class Realization:
    operator: TruncatedOperator
    flags: list[SingularEntry]


def _lower_factor(kind: Kind, t):
    # coefficient polynomial of the psi_{n-1} term in A psi_n
    return t if kind is Kind.FIRST else t + 2


def a_matrix(kind, dim: int, source=CoefficientSource.DERIVED) -> TruncatedOperator:
    """A psi_n = c_n b_{n-1} psi_{n-1} - n b_n psi_{n+1}, c_n = n (first) or n + 2 (second)."""
    kind = Kind.parse(kind)
    if dim < 2:
        raise ValueError(f"dim must be at least 2, got {dim}")
    b = recurrence_coefficients(kind, dim, source)
    A = np.zeros((dim, dim), dtype=complex)
    for n in range(dim):
        if n >= 1:
            A[n - 1, n] = _lower_factor(kind, n) * b[n - 1]
        if n + 1 < dim:
            A[n + 1, n] = -n * b[n]
    return TruncatedOperator("A", A, range(dim - 1))


def validate_a_numerically(
    kind, dim: int, grid=None, source=CoefficientSource.DERIVED
) -> float:
    """Max over n <= dim-2 and x in ``grid`` of |(1-x^2) psi_n'(x) - sum_m A[m,n] psi_m(x)|."""
    kind = Kind.parse(kind)
    if grid is None:
        grid = np.linspace(-0.99, 0.99, 101)
    grid = np.asarray(grid, dtype=float)
    if np.any(np.abs(grid) >= 1.0):
        raise ValueError("grid must be interior to (-1, 1)")
    A = a_matrix(kind, dim, source).entries.real
    psi = eval_basis_all(kind, dim - 1, grid)  # (dim, npts)
    via_matrix = A.T @ psi  # row n: sum_m A[m, n] psi_m
    worst = 0.0
    for n in range(dim - 1):
        exact = derivative_times_weight(kind, n, grid)
        worst = max(worst, float(np.max(np.abs(via_matrix[n] - exact))))
    return worst


def _word_matrix(word: str, mats: dict[str, np.ndarray]) -> np.ndarray:
    out = mats["I"]
    for letter in word:
        out = out @ mats[letter]
    return out


def _pattern(word: str, dim: int) -> np.ndarray:
    band = (np.eye(dim, k=1) + np.eye(dim, k=-1)).astype(int)
    diag = np.eye(dim, dtype=int)
    pats = {"A": band, "X": band, "N": diag, "I": diag}
    out = diag
    for letter in word:
        out = (out @ pats[letter] > 0).astype(int)
    return out.astype(bool)


def _resolvent_diag(shifts, dim: int) -> tuple[np.ndarray, np.ndarray]:
    vals = np.ones(dim)
    singular = np.zeros(dim, dtype=bool)
    for s in shifts:
        d = np.arange(dim, dtype=float) + s
        singular |= d == 0
        vals = vals * np.divide(1.0, d, out=np.zeros(dim), where=d != 0)
    return vals, singular


def _numerator(formula: Formula, kind: Kind, dim: int, source) -> tuple[np.ndarray, np.ndarray]:
    mats = {
        "A": a_matrix(kind, dim, source).entries,
        "X": position_matrix(kind, dim, source).entries,
        "N": number_matrix(dim).entries,
        "I": np.eye(dim, dtype=complex),
    }
    K = np.zeros((dim, dim), dtype=complex)
    pattern = np.zeros((dim, dim), dtype=bool)
    for coef, word in formula.terms:
        K += coef * _word_matrix(word, mats)
        pattern |= _pattern(word, dim)
    return K, pattern


def _matrix_route(spec: FormulaSpec, kind: Kind, dim: int, source) -> Realization:
    f = spec.formula
    K, pattern = _numerator(f, kind, dim, source)
    r, singular = _resolvent_diag(f.shifts, dim)
    flags = []
    if spec.ordering is Ordering.INVERSE_APPLIED_LAST:
        M = f.prefactor * (r[:, None] * K)
        for row in np.flatnonzero(singular):
            for col in range(dim):
                if abs(K[row, col]) > ZERO_TOL:
                    flags.append(SingularEntry(int(row), col, "divergent"))
                elif pattern[row, col]:
                    flags.append(SingularEntry(int(row), col, "indeterminate"))
    else:
        M = f.prefactor * (K * r[None, :])
        for col in np.flatnonzero(singular):
            for row in range(dim):
                if abs(K[row, col]) > ZERO_TOL:
                    flags.append(SingularEntry(row, int(col), "divergent"))
                elif pattern[row, col]:
                    flags.append(SingularEntry(row, int(col), "indeterminate"))
    flags.sort(key=lambda e: (e.col, e.row))
    return Realization(TruncatedOperator(spec.target.value, M, range(dim - 1)), flags)


# --- column-wise evaluation with a continuous index ------------------------

_T = Polynomial([0.0, 1.0])
_ONE = Polynomial([1.0])


def _same(p: Polynomial, q: Polynomial) -> bool:
    a, b = p.coef, q.coef
    if len(a) != len(b):
        return False
    return bool(np.allclose(a, b, rtol=0.0, atol=1e-14))


class _FormalColumn:
    """Vector sum_k (num_k(t) / den_k(t)) e_{t+k}, b values frozen at column n."""

    def __init__(self, n: int, dim: int, b: np.ndarray, kind: Kind):
        self.n, self.dim, self.b, self.kind = n, dim, b, kind
        self.comp: dict[int, tuple[Polynomial, Polynomial]] = {0: (_ONE, _ONE)}

    def _bval(self, idx: int) -> float:
        return float(self.b[idx]) if 0 <= idx < len(self.b) else 0.0

    def _put(self, out, k, num, den):
        if not 0 <= self.n + k < self.dim:
            return
        if k in out:
            p, q = out[k]
            if _same(q, den):
                out[k] = (p + num, q)
            else:
                out[k] = (p * den + num * q, q * den)
        else:
            out[k] = (num, den)

    def apply(self, letter: str) -> None:
        out: dict[int, tuple[Polynomial, Polynomial]] = {}
        for k, (p, q) in self.comp.items():
            shifted = _T + k  # index of this component as a polynomial in t
            if letter == "I":
                self._put(out, k, p, q)
            elif letter == "N":
                self._put(out, k, p * shifted, q)
            elif letter == "X":
                self._put(out, k + 1, p * self._bval(self.n + k), q)
                self._put(out, k - 1, p * self._bval(self.n + k - 1), q)
            elif letter == "A":
                self._put(out, k - 1, p * _lower_factor(self.kind, shifted) * self._bval(self.n + k - 1), q)
                self._put(out, k + 1, p * shifted * (-self._bval(self.n + k)), q)
            else:
                raise ValueError(f"unknown operator letter {letter!r}")
        self.comp = out

    def resolve(self, shift: int) -> None:
        self.comp = {k: (p, q * (_T + k + shift)) for k, (p, q) in self.comp.items()}

    def scale(self, c: float) -> None:
        self.comp = {k: (p * c, q) for k, (p, q) in self.comp.items()}

    def add(self, other: "_FormalColumn") -> None:
        for k, (p, q) in other.comp.items():
            self._put(self.comp, k, p, q)


def _is_zero_at(p: Polynomial, t: float) -> bool:
    scale = max(1.0, float(np.max(np.abs(p.coef))))
    return abs(p(t)) <= ZERO_TOL * scale


def _limit_value(p: Polynomial, q: Polynomial, t: float) -> tuple[float, bool]:
    """(value, divergent) of p/q at t after cancelling common roots at t."""
    root = Polynomial([-t, 1.0])
    while _is_zero_at(q, t) and _is_zero_at(p, t) and q.degree() > 0:
        p, q = p // root, q // root
    if _is_zero_at(q, t):
        return 0.0, True
    return p(t) / q(t), False


def _limit_route(spec: FormulaSpec, kind: Kind, dim: int, source) -> Realization:
    f = spec.formula
    b = recurrence_coefficients(kind, dim, source)
    M = np.zeros((dim, dim), dtype=complex)
    flags = []
    for n in range(dim):
        total: Optional[_FormalColumn] = None
        for coef, word in f.terms:
            col = _FormalColumn(n, dim, b, kind)
            if spec.ordering is Ordering.INVERSE_APPLIED_FIRST:
                for s in f.shifts:
                    col.resolve(s)
            for letter in reversed(word):
                col.apply(letter)
            col.scale(coef)
            if total is None:
                total = col
            else:
                total.add(col)
        if spec.ordering is Ordering.INVERSE_APPLIED_LAST:
            for s in f.shifts:
                total.resolve(s)
        for k, (p, q) in sorted(total.comp.items()):
            val, divergent = _limit_value(p, q, float(n))
            if divergent:
                flags.append(SingularEntry(n + k, n, "divergent"))
            M[n + k, n] = f.prefactor * val
    return Realization(TruncatedOperator(spec.target.value, M, range(dim - 1)), flags)


def realize(
    spec: FormulaSpec,
    dim: int,
    source=CoefficientSource.DERIVED,
    kind=None,
    resolvent=Resolvent.PSEUDO_INVERSE,
) -> Realization:
    """Evaluate a formula; ``kind`` defaults to the family the formula is written for."""
    if dim < 4:
        raise ValueError(f"dim must be at least 4, got {dim}")
    kind = spec.formula.kind if kind is None else Kind.parse(kind)
    source = CoefficientSource.parse(source)
    if Resolvent(resolvent) is Resolvent.PSEUDO_INVERSE:
        return _matrix_route(spec, kind, dim, source)
    return _limit_route(spec, kind, dim, source)


def build_formula(
    spec: FormulaSpec, kind=None, dim: int = 16, source=CoefficientSource.DERIVED,
    resolvent=Resolvent.PSEUDO_INVERSE,
) -> TruncatedOperator:
    return realize(spec, dim, source, kind, resolvent).operator


def unflagged_singular_entries(spec: FormulaSpec, dim: int, source, flags) -> list[tuple[int, int]]:
    """Cells where a singular resolvent entry meets the numerator but no flag was raised."""
    f = spec.formula
    K, pattern = _numerator(f, f.kind, dim, CoefficientSource.parse(source))
    _, singular = _resolvent_diag(f.shifts, dim)
    live = pattern | (np.abs(K) > 0)
    flagged = {(e.row, e.col) for e in flags}
    cells = []
    for s in np.flatnonzero(singular):
        if spec.ordering is Ordering.INVERSE_APPLIED_LAST:
            cells += [(int(s), c) for c in np.flatnonzero(live[s, :])]
        else:
            cells += [(int(r), int(s)) for r in np.flatnonzero(live[:, s])]
    return [c for c in cells if c not in flagged]


def canonical_matrix(name: str, kind, dim: int, source=CoefficientSource.DERIVED) -> np.ndarray:
    if name == "a_minus":
        return ladder_matrices(kind, dim, source)[0].entries
    if name == "a_plus":
        return ladder_matrices(kind, dim, source)[1].entries
    if name == "P":
        return momentum_matrix(kind, dim, source).entries
    raise ValueError(f"no canonical operator named {name!r}")


def column_residuals(spec: FormulaSpec, dim: int, source=CoefficientSource.DERIVED,
                     resolvent=Resolvent.PSEUDO_INVERSE) -> tuple[np.ndarray, list[SingularEntry]]:
    """Per-column max |formula - canonical| on interior columns 0..dim-2."""
    real = realize(spec, dim, source, resolvent=resolvent)
    canon = canonical_matrix(spec.formula.canonical, spec.formula.kind, dim, source)
    diff = np.abs(real.operator.entries - canon)[:, : dim - 1]
    return diff.max(axis=0), real.flags


def _ranges(mask: np.ndarray) -> list[tuple[int, int]]:
    """Half-open [start, stop) runs where ``mask`` is true."""
    out = []
    start = None
    for i, ok in enumerate(mask):
        if ok and start is None:
            start = i
        elif not ok and start is not None:
            out.append((start, i))
            start = None
    if start is not None:
        out.append((start, len(mask)))
    return out


@dataclass
class RealizationEntry:
    target: Target
    ordering: Ordering
    resolvent: Resolvent
    kind: Kind
    residual: float
    residual_unflagged: float
    column_residuals: list[float]
    matching_columns: list[tuple[int, int]]
    flags: list[SingularEntry]

    def to_dict(self) -> dict:
        return {
            "target": self.target.value,
            "ordering": self.ordering.value,
            "resolvent": self.resolvent.value,
            "kind": self.kind.value,
            "residual": self.residual,
            "residual_unflagged": self.residual_unflagged,
            "matching_columns": [list(r) for r in self.matching_columns],
            "flags": [[e.row, e.col, e.status] for e in self.flags],
        }


@dataclass
class RealizationReport:
    dim: int
    source: CoefficientSource
    tol: float
    entries: list[RealizationEntry] = field(default_factory=list)

    def get(self, target, ordering, resolvent=Resolvent.PSEUDO_INVERSE) -> RealizationEntry:
        target, ordering, resolvent = Target(target), Ordering(ordering), Resolvent(resolvent)
        for e in self.entries:
            if (e.target, e.ordering, e.resolvent) == (target, ordering, resolvent):
                return e
        raise KeyError((target, ordering, resolvent))

    def best(self, target, resolvent=Resolvent.PSEUDO_INVERSE, columns: slice = slice(None)) -> tuple[Ordering, float]:
        """Ordering with the smallest residual over ``columns``."""
        cands = []
        for ordering in Ordering:
            e = self.get(target, ordering, resolvent)
            cr = np.asarray(e.column_residuals)[columns]
            cands.append((float(cr.max()) if cr.size else 0.0, ordering))
        res, ordering = min(cands, key=lambda c: c[0])
        return ordering, res


def targets_for(kind) -> list[Target]:
    kind = Kind.parse(kind)
    return [t for t, f in FORMULAS.items() if f.kind is kind]


def compare_all_realizations(
    dim: int, source=CoefficientSource.DERIVED, tol: float = 1e-13, kind=None,
    resolvents=tuple(Resolvent),
) -> RealizationReport:
    """Residual table over targets x orderings x resolvent conventions.

    Each formula is evaluated in its own family; ``kind`` restricts the table
    to the formulas written for that family.
    """
    if dim < 8:
        raise ValueError(f"dim must be at least 8, got {dim}")
    source = CoefficientSource.parse(source)
    targets = list(Target) if kind is None else targets_for(kind)
    rep = RealizationReport(dim, source, tol)
    for target in targets:
        for ordering in Ordering:
            for resolvent in resolvents:
                spec = FormulaSpec(target, ordering)
                cr, flags = column_residuals(spec, dim, source, Resolvent(resolvent))
                flagged_cols = {e.col for e in flags if e.col < dim - 1}
                unflagged = [c for i, c in enumerate(cr) if i not in flagged_cols]
                rep.entries.append(
                    RealizationEntry(
                        target=target,
                        ordering=ordering,
                        resolvent=Resolvent(resolvent),
                        kind=spec.formula.kind,
                        residual=float(cr.max()),
                        residual_unflagged=float(max(unflagged)) if unflagged else 0.0,
                        column_residuals=[float(c) for c in cr],
                        matching_columns=_ranges(cr < tol),
                        flags=flags,
                    )
                )
    return rep

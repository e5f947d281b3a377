"""Truncated matrix representations of the Chebyshev oscillator algebra.

All operators act on span{psi_0, ..., psi_{dim-1}}. Column ``n`` of a matrix
is the image of psi_n. Truncation drops components beyond index dim-1, so
identities are only asserted on each operator's ``interior`` columns.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .polynomial_basis import Kind
from .quadrature import CoefficientSource, recurrence_coefficients
from .report import VerificationReport

SQRT2 = math.sqrt(2.0)
PAPER_LAMBDA0 = 0.5
PAPER_LAMBDA = 1.0


@dataclass(frozen=True)
class TruncatedOperator:
    name: str
    entries: np.ndarray
    interior: range

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    def __matmul__(self, other: "TruncatedOperator") -> np.ndarray:
        return self.entries @ other.entries

    def interior_block(self) -> np.ndarray:
        idx = np.array(self.interior, dtype=int)
        return self.entries[np.ix_(idx, idx)]


@dataclass
class Spectrum:
    eigenvalues: np.ndarray
    diagonal_form: np.ndarray
    paper_claim: np.ndarray
    max_deviation_from_claim: float
    matches_paper_claim: bool
    notes: list[str] = field(default_factory=list)


def _check_dim(dim: int, minimum: int) -> None:
    if dim < minimum:
        raise ValueError(f"dim must be at least {minimum}, got {dim}")


def _b(kind, dim, source) -> np.ndarray:
    # b_0..b_{dim-1}; the last one only feeds the raising entry that truncation drops
    return recurrence_coefficients(kind, dim, source)


def position_matrix(kind, dim: int, source=CoefficientSource.DERIVED) -> TruncatedOperator:
    _check_dim(dim, 1)
    b = _b(kind, dim, source)
    X = np.zeros((dim, dim), dtype=complex)
    n = np.arange(dim - 1)
    X[n + 1, n] = b[: dim - 1]
    X[n, n + 1] = b[: dim - 1]
    return TruncatedOperator("X", X, range(dim - 1) if dim > 1 else range(0))


def momentum_matrix(kind, dim: int, source=CoefficientSource.DERIVED) -> TruncatedOperator:
    _check_dim(dim, 1)
    b = _b(kind, dim, source)
    P = np.zeros((dim, dim), dtype=complex)
    n = np.arange(dim - 1)
    P[n + 1, n] = -1j * b[: dim - 1]
    P[n, n + 1] = 1j * b[: dim - 1]
    return TruncatedOperator("P", P, range(dim - 1) if dim > 1 else range(0))


def ladder_matrices(
    kind, dim: int, source=CoefficientSource.DERIVED
) -> tuple[TruncatedOperator, TruncatedOperator]:
    """(a_minus, a_plus) with a_minus psi_n = sqrt2 b_{n-1} psi_{n-1},
    a_plus psi_n = sqrt2 b_n psi_{n+1}."""
    _check_dim(dim, 2)
    b = _b(kind, dim, source)
    am = np.zeros((dim, dim), dtype=complex)
    ap = np.zeros((dim, dim), dtype=complex)
    n = np.arange(dim - 1)
    am[n, n + 1] = SQRT2 * b[: dim - 1]
    ap[n + 1, n] = SQRT2 * b[: dim - 1]
    return (
        TruncatedOperator("a_minus", am, range(dim)),
        TruncatedOperator("a_plus", ap, range(dim - 1)),
    )


def number_matrix(dim: int) -> TruncatedOperator:
    _check_dim(dim, 1)
    return TruncatedOperator("N", np.diag(np.arange(dim, dtype=float)).astype(complex), range(dim))


def identity_matrix(dim: int) -> TruncatedOperator:
    return TruncatedOperator("I", np.eye(dim, dtype=complex), range(dim))


def b_of_n_matrix(kind, dim: int, source=CoefficientSource.DERIVED, shift: int = 0) -> TruncatedOperator:
    """B(N + shift): diagonal with entries b_{n+shift-1}^2, b_{-1} = 0."""
    _check_dim(dim, 1)
    b = _b(kind, dim + max(shift, 0), source)
    diag = np.zeros(dim)
    for n in range(dim):
        k = n + shift - 1
        diag[n] = b[k] ** 2 if k >= 0 else 0.0
    name = "B(N)" if shift == 0 else f"B(N+{shift}I)"
    return TruncatedOperator(name, np.diag(diag).astype(complex), range(dim))


def hamiltonian(kind, dim: int, source=CoefficientSource.DERIVED) -> TruncatedOperator:
    """H = X^2 + P^2, exact on columns 0..dim-3."""
    _check_dim(dim, 3)
    X = position_matrix(kind, dim, source)
    P = momentum_matrix(kind, dim, source)
    return TruncatedOperator("H", X @ X + P @ P, range(dim - 2))


def expected_hamiltonian_diagonal(kind, count: int, source=CoefficientSource.DERIVED) -> np.ndarray:
    """2 (b_{n-1}^2 + b_n^2) for n < count."""
    b = recurrence_coefficients(kind, count, source)
    prev = np.concatenate([[0.0], b[:-1]])
    return 2.0 * (prev**2 + b**2)


def paper_claimed_spectrum(count: int) -> np.ndarray:
    lam = np.full(count, PAPER_LAMBDA)
    if count:
        lam[0] = PAPER_LAMBDA0
    return lam


def hamiltonian_spectrum(kind, dim: int, source=CoefficientSource.DERIVED, tol: float = 1e-12) -> Spectrum:
    """Spectrum of the exact interior block of H, compared with the printed values."""
    H = hamiltonian(kind, dim, source)
    block = H.interior_block()
    herm_dev = float(np.max(np.abs(block - block.conj().T)))
    if herm_dev > tol:
        raise ValueError(f"interior block of H is not Hermitian (deviation {herm_dev:.3e})")
    eig = np.sort(np.linalg.eigvalsh(block))
    diag = np.real(np.diag(block)).copy()
    claim = paper_claimed_spectrum(len(diag))
    dev = float(np.max(np.abs(np.sort(diag) - np.sort(claim))))
    matches = dev < tol
    notes = []
    if not matches:
        notes.append(
            f"H diagonal starts {diag[:3].tolist()}, printed claim starts {claim[:3].tolist()}"
        )
    return Spectrum(eig, diag, claim, dev, matches, notes)


def _max_abs(a: np.ndarray) -> float:
    return float(np.max(np.abs(a))) if a.size else 0.0


def verify_commutators(kind, dim: int, source=CoefficientSource.DERIVED, tol: float = 1e-13) -> VerificationReport:
    """Residuals of [a-, a+] = 2(B(N+I) - B(N)) and [N, a+-] = +-a+- on columns 0..dim-3."""
    _check_dim(dim, 4)
    kind = Kind.parse(kind)
    source = CoefficientSource.parse(source)
    am, ap = ladder_matrices(kind, dim, source)
    N = number_matrix(dim)
    lhs = am @ ap - ap @ am
    rhs = 2.0 * (b_of_n_matrix(kind, dim, source, shift=1).entries - b_of_n_matrix(kind, dim, source).entries)
    cols = slice(0, dim - 2)
    rep = VerificationReport()
    tag = f"{kind.value}/{source.value}"
    rep.add(f"commutator[a-,a+] ({tag})", _max_abs((lhs - rhs)[:, cols]), tol)
    rep.add(f"commutator[N,a+] ({tag})", _max_abs((N @ ap - ap @ N - ap.entries)[:, cols]), tol)
    rep.add(f"commutator[N,a-] ({tag})", _max_abs((N @ am - am @ N + am.entries)[:, cols]), tol)
    return rep


def verify_structure(kind, dim: int, source=CoefficientSource.DERIVED, tol: float = 1e-13) -> VerificationReport:
    """Hermiticity, (X, P) reconstruction from ladders, adjointness, H diagonal form."""
    _check_dim(dim, 4)
    kind = Kind.parse(kind)
    source = CoefficientSource.parse(source)
    tag = f"{kind.value}/{source.value}"
    X = position_matrix(kind, dim, source)
    P = momentum_matrix(kind, dim, source)
    am, ap = ladder_matrices(kind, dim, source)
    H = hamiltonian(kind, dim, source)
    rep = VerificationReport()
    herm = 0.0
    for op in (X, P, number_matrix(dim), b_of_n_matrix(kind, dim, source), H):
        blk = op.interior_block() if op is H else op.entries
        herm = max(herm, _max_abs(blk - blk.conj().T))
    rep.add(f"hermiticity ({tag})", herm, tol)
    rep.add(f"X = (a+ + a-)/sqrt2 ({tag})", _max_abs((ap.entries + am.entries) / SQRT2 - X.entries), tol)
    rep.add(f"P = (a+ - a-)/(i sqrt2) ({tag})", _max_abs((ap.entries - am.entries) / (1j * SQRT2) - P.entries), tol)
    k = dim - 1
    rep.add(f"a+ = (a-)^dagger ({tag})", _max_abs(ap.entries[:k, :k] - am.entries[:k, :k].conj().T), tol)
    block = H.interior_block()
    expected = expected_hamiltonian_diagonal(kind, len(block), source)
    rep.add(f"H diagonal = 2(b_(n-1)^2 + b_n^2) ({tag})", _max_abs(np.diag(block) - expected), tol)
    rep.add(f"H off-diagonal vanishes ({tag})", _max_abs(block - np.diag(np.diag(block))), tol)
    return rep


OPERATOR_BUILDERS = {
    "X": position_matrix,
    "P": momentum_matrix,
    "a_minus": lambda k, d, s: ladder_matrices(k, d, s)[0],
    "a_plus": lambda k, d, s: ladder_matrices(k, d, s)[1],
    "N": lambda k, d, s: number_matrix(d),
    "B(N)": b_of_n_matrix,
    "H": hamiltonian,
}


def compare_kinds(dim: int, source=CoefficientSource.DERIVED) -> dict[str, dict]:
    """Entry-wise comparison of each algebra matrix between the two kinds.

    Returns per operator the max absolute difference and the (row, col)
    positions that differ.
    """
    out = {}
    for name, build in OPERATOR_BUILDERS.items():
        a = build(Kind.FIRST, dim, source).entries
        b = build(Kind.SECOND, dim, source).entries
        diff = np.abs(a - b)
        rows, cols = np.nonzero(diff > 0.0)
        out[name] = {
            "max_difference": float(diff.max()),
            "differing_entries": sorted(zip(rows.tolist(), cols.tolist())),
        }
    return out

"""chebosc command line: verify | coherent | table | boundary.

Exit codes: 0 all hard checks pass, 1 a hard check failed, 2 usage or
domain error. Informational checks (comparisons against printed claims)
never change the exit code.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import dataclass, asdict
from typing import Any, Optional, Sequence

import numpy as np

from . import __version__
from .coherent_states import (
    RADIUS,
    annihilation_residual,
    bg_state,
    boundary_identity,
    boundary_prediction,
    norm_squared_closed,
    paper_claimed_norm,
    paper_closed_form,
    wavefunction_closed,
    wavefunction_series,
)
from .diffop_realization import (
    FormulaSpec,
    Resolvent,
    compare_all_realizations,
    targets_for,
    unflagged_singular_entries,
    validate_a_numerically,
)
from .oscillator_algebra import (
    compare_kinds,
    expected_hamiltonian_diagonal,
    hamiltonian,
    hamiltonian_spectrum,
    momentum_matrix,
    number_matrix,
    position_matrix,
    verify_commutators,
    verify_structure,
)
from .polynomial_basis import Kind
from .quadrature import (
    CoefficientSource,
    derive_recurrence_coefficient,
    gauss_chebyshev_rule,
    gram_matrix,
    paper_coefficients,
    recurrence_coefficients,
)
from .report import VerificationReport

TOOL = "chebosc"
COMMANDS = ("verify", "coherent", "table", "boundary")
MIN_DIM = {"verify": 8, "coherent": 2, "table": 3, "boundary": 2}
TABLE_QUANTITIES = ("b", "X", "P", "N", "H_diagonal", "H_spectrum")
CSV_DIGITS = 17


class UsageError(Exception):
    pass


@dataclass(frozen=True)
class RunConfig:
    command: str
    kind: str = "first"
    dim: int = 64
    source: str = "derived"
    tol: float = 1e-10
    z_re: float = 0.0
    z_im: float = 0.0
    x_min: float = -1.0
    x_max: float = 1.0
    x_points: int = 101
    samples: Optional[int] = None
    what: str = "all"
    format: str = "json"
    out: Optional[str] = None

    @property
    def z(self) -> complex:
        return complex(self.z_re, self.z_im)

    def validate(self) -> None:
        need = MIN_DIM[self.command]
        if self.dim < need:
            raise UsageError(f"--dim must be at least {need} for {self.command}, got {self.dim}")
        if not (self.tol > 0 and math.isfinite(self.tol)):
            raise UsageError(f"--tol must be a positive number, got {self.tol}")
        if self.command == "coherent":
            if not abs(self.z) < RADIUS:
                raise UsageError(
                    f"|z| = {abs(self.z):.6g} lies outside the convergence disk |z| < 1/sqrt(2)"
                )
            if not (-1.0 <= self.x_min <= self.x_max <= 1.0):
                raise UsageError("x grid must satisfy -1 <= x-min <= x-max <= 1")
            if self.x_points < 1:
                raise UsageError("--x-points must be positive")
        if self.command == "boundary" and self.samples is not None and self.samples < 4 * self.dim:
            raise UsageError(f"--samples must be at least 4*dim = {4 * self.dim}")

    def echo(self) -> dict[str, Any]:
        d = asdict(self)
        d.pop("out")
        return d


# --- commands ---------------------------------------------------------------


def _coefficient_checks(kind: Kind, dim: int, source: CoefficientSource, tol: float) -> tuple[VerificationReport, dict]:
    rep = VerificationReport()
    big = gauss_chebyshev_rule(kind, max(512, dim + 1))
    gram = gram_matrix(kind, dim, big)
    rep.add(f"orthonormality ({kind.value})", float(np.max(np.abs(gram - np.eye(dim)))), tol)

    count = min(dim, 48)
    r1 = gauss_chebyshev_rule(kind, count + 2)
    r2 = gauss_chebyshev_rule(kind, count + 9)
    oracle = np.array([derive_recurrence_coefficient(kind, n, r1) for n in range(count)])
    oracle2 = np.array([derive_recurrence_coefficient(kind, n, r2) for n in range(count)])
    rep.add(f"oracle b_n independent of node count ({kind.value})",
            float(np.max(np.abs(oracle - oracle2))), tol)
    used = recurrence_coefficients(kind, count, source)
    dev = float(np.max(np.abs(used - oracle)))
    printed = paper_coefficients(count)
    paper_dev = float(np.max(np.abs(printed - oracle)))
    note = (
        f"printed b_0 = {printed[0]:.17g}, oracle b_0 = {oracle[0]:.17g}, "
        f"|difference| = {abs(printed[0] - oracle[0]):.17g}"
    )
    rep.add(
        f"printed b_n vs quadrature oracle ({kind.value})",
        paper_dev, tol, informational=True, note=note, matches_paper_claim=paper_dev < tol,
    )
    if source is CoefficientSource.DERIVED:
        rep.add(f"coefficients in use vs oracle ({kind.value}/{source.value})", dev, tol)
    else:
        rep.add(
            f"coefficients in use vs oracle ({kind.value}/{source.value})", dev, tol,
            informational=True, note="printed coefficients used verbatim",
        )
    data = {"b_oracle": oracle.tolist(), "b_used": used.tolist()}
    return rep, data


def cmd_verify(cfg: RunConfig) -> tuple[VerificationReport, dict]:
    kind = Kind.parse(cfg.kind)
    source = CoefficientSource.parse(cfg.source)
    dim, tol = cfg.dim, cfg.tol
    rep, data = _coefficient_checks(kind, dim, source, tol)
    rep.extend(verify_commutators(kind, dim, source, tol))
    rep.extend(verify_structure(kind, dim, source, tol))

    hspec = hamiltonian_spectrum(kind, dim, source, tol)
    rep.add(
        f"H spectrum vs printed 1/2, 1, 1, ... ({kind.value}/{source.value})",
        hspec.max_deviation_from_claim, tol, informational=True,
        note="; ".join(hspec.notes), matches_paper_claim=hspec.matches_paper_claim,
    )
    data["H_diagonal"] = hspec.diagonal_form.tolist()

    a_dev = validate_a_numerically(kind, min(dim, 21), source=source)
    rep.add(
        f"A basis action vs (1-x^2) d/dx ({kind.value}/{source.value})",
        a_dev, tol, informational=True, matches_paper_claim=a_dev < tol,
    )

    real = compare_all_realizations(dim, source, tol, kind=kind)
    unflagged = 0
    for e in real.entries:
        if e.resolvent is Resolvent.PSEUDO_INVERSE:
            spec = FormulaSpec(e.target, e.ordering)
            unflagged += len(unflagged_singular_entries(spec, dim, source, e.flags))
    rep.add(f"every singular resolvent entry flagged ({kind.value})", float(unflagged), 0.5)
    for target in targets_for(kind):
        for resolvent in Resolvent:
            ordering, best = real.best(target, resolvent)
            rep.add(
                f"realization {target.value} [{resolvent.value}] best ordering",
                best, tol, informational=True,
                note=f"best ordering {ordering.value}",
                matches_paper_claim=best < tol,
            )
    data["realizations"] = [e.to_dict() for e in real.entries]

    eq = compare_kinds(dim, source)
    worst = max(v["max_difference"] for v in eq.values())
    differing = sorted(k for k, v in eq.items() if v["max_difference"] > 0)
    rep.add(
        f"algebra matrices identical across kinds ({source.value})",
        worst, tol, informational=True,
        note="differing operators: " + (", ".join(differing) if differing else "none"),
        matches_paper_claim=worst < tol,
    )
    return rep, data


def _x_grid(cfg: RunConfig) -> np.ndarray:
    if cfg.x_points == 1:
        return np.array([cfg.x_min])
    return np.linspace(cfg.x_min, cfg.x_max, cfg.x_points)


def cmd_coherent(cfg: RunConfig) -> tuple[VerificationReport, dict]:
    kind = Kind.parse(cfg.kind)
    source = CoefficientSource.parse(cfg.source)
    z, tol = cfg.z, cfg.tol
    state = bg_state(kind, z, cfg.dim, source, margin=0.0)
    x = _x_grid(cfg)
    series = np.atleast_1d(wavefunction_series(state, x))
    closed = np.atleast_1d(wavefunction_closed(kind, z, x, source))
    diff = np.abs(series - closed)
    rows = [
        {"x": float(xi), "series_re": float(s.real), "series_im": float(s.imag),
         "closed_re": float(c.real), "closed_im": float(c.imag), "abs_diff": float(d)}
        for xi, s, c, d in zip(x, series, closed, diff)
    ]
    rep = VerificationReport()
    rep.add("wavefunction series vs closed form", float(diff.max()), tol)
    closed_norm = norm_squared_closed(kind, z, source)
    rep.add("norm^2 series vs closed form", abs(state.norm_sq_series - closed_norm), tol)
    rep.add("annihilation residual (interior)", annihilation_residual(state), tol)
    claimed = paper_claimed_norm(z)
    rep.add(
        "norm^2 closed form vs printed 1/(1-2|z|^2)", abs(closed_norm - claimed), tol,
        informational=True, matches_paper_claim=abs(closed_norm - claimed) < tol,
    )
    if kind is Kind.FIRST:
        normalized = closed / math.sqrt(closed_norm)
        pdev = float(np.max(np.abs(normalized - paper_closed_form(z, x))))
        rep.add(
            "normalized state vs printed closed form", pdev, tol,
            informational=True, matches_paper_claim=pdev < tol,
        )
    data = {
        "rows": rows,
        "norm": {
            "series": state.norm_sq_series,
            "closed": closed_norm,
            "paper_claimed": claimed,
            "tail_bound": state.tail_bound,
        },
    }
    return rep, data


def table_records(cfg: RunConfig) -> list[dict]:
    kind = Kind.parse(cfg.kind)
    source = CoefficientSource.parse(cfg.source)
    dim = cfg.dim
    want = TABLE_QUANTITIES if cfg.what == "all" else (cfg.what,)
    recs: list[dict] = []

    def vec(name, values):
        for i, v in enumerate(values):
            v = complex(v)
            recs.append({"quantity": name, "i": i, "j": None, "re": v.real, "im": v.imag})

    def mat(name, m):
        rows, cols = np.nonzero(m)
        for i, j in zip(rows.tolist(), cols.tolist()):
            v = complex(m[i, j])
            recs.append({"quantity": name, "i": i, "j": j, "re": v.real, "im": v.imag})

    for q in want:
        if q == "b":
            vec("b", recurrence_coefficients(kind, dim, source))
        elif q == "X":
            mat("X", position_matrix(kind, dim, source).entries)
        elif q == "P":
            mat("P", momentum_matrix(kind, dim, source).entries)
        elif q == "N":
            vec("N_diagonal", np.diag(number_matrix(dim).entries))
        elif q == "H_diagonal":
            vec("H_diagonal", np.diag(hamiltonian(kind, dim, source).interior_block()))
        elif q == "H_spectrum":
            vec("H_spectrum", hamiltonian_spectrum(kind, dim, source).eigenvalues)
    return recs


def cmd_table(cfg: RunConfig) -> tuple[VerificationReport, dict]:
    kind = Kind.parse(cfg.kind)
    source = CoefficientSource.parse(cfg.source)
    recs = table_records(cfg)
    rep = VerificationReport()
    H = hamiltonian(kind, cfg.dim, source).interior_block()
    expected = expected_hamiltonian_diagonal(kind, len(H), source)
    rep.add("H diagonal = 2(b_(n-1)^2 + b_n^2)", float(np.max(np.abs(np.diag(H) - expected))), cfg.tol)
    return rep, {"records": recs}


def cmd_boundary(cfg: RunConfig) -> tuple[VerificationReport, dict]:
    kind = Kind.parse(cfg.kind)
    source = CoefficientSource.parse(cfg.source)
    res = boundary_identity(kind, cfg.dim, cfg.samples, source)
    pred = boundary_prediction(kind, cfg.dim, source)
    rep = VerificationReport()
    rep.add("boundary integral off-diagonal", res.off_diagonal_max, cfg.tol)
    rep.add("boundary integral diagonal vs |d_n|^2 on the circle",
            float(np.max(np.abs(res.diagonal - pred))), cfg.tol)
    ident = float(np.max(np.abs(res.diagonal - 1.0)))
    rep.add(
        "boundary measure resolves the identity", ident, cfg.tol,
        informational=True, matches_paper_claim=ident < cfg.tol,
    )
    data = {
        "diagonal": res.diagonal.tolist(),
        "prediction": pred.tolist(),
        "off_diagonal_max": res.off_diagonal_max,
        "samples": cfg.samples if cfg.samples is not None else 4 * cfg.dim,
    }
    return rep, data


RUNNERS = {
    "verify": cmd_verify,
    "coherent": cmd_coherent,
    "table": cmd_table,
    "boundary": cmd_boundary,
}


# --- serialization ------------------------------------------------------------


def build_document(cfg: RunConfig, rep: VerificationReport, data: dict) -> dict:
    return {
        "tool": TOOL,
        "version": __version__,
        "command": cfg.command,
        "config": cfg.echo(),
        "checks": [c.to_dict() for c in rep.checks],
        "data": data,
        "status": "pass" if rep.passed else "fail",
    }


def to_json(doc: dict) -> str:
    # repr-based floats round-trip exactly
    return json.dumps(doc, indent=2, sort_keys=True, allow_nan=False) + "\n"


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return format(v, f".{CSV_DIGITS}g")
    return str(v)


def _csv(header: Sequence[str], rows: list[dict]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([_fmt(r[h]) for h in header])
    return buf.getvalue()


def to_csv(cfg: RunConfig, doc: dict) -> str:
    if cfg.command == "coherent":
        header = ["x", "series_re", "series_im", "closed_re", "closed_im", "abs_diff"]
        return _csv(header, doc["data"]["rows"])
    if cfg.command == "table":
        return _csv(["quantity", "i", "j", "re", "im"], doc["data"]["records"])
    if cfg.command == "boundary":
        d = doc["data"]
        rows = [{"n": n, "diagonal": a, "prediction": b}
                for n, (a, b) in enumerate(zip(d["diagonal"], d["prediction"]))]
        return _csv(["n", "diagonal", "prediction"], rows)
    header = ["name", "residual", "tolerance", "passed", "informational", "matches_paper_claim", "note"]
    return _csv(header, doc["checks"])


# --- entry point ----------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog=TOOL, description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"{TOOL} {__version__}")
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("--kind", choices=[k.value for k in Kind], default="first")
    p.add_argument("--dim", type=int, default=64)
    p.add_argument("--source", choices=[s.value for s in CoefficientSource], default="derived")
    p.add_argument("--tol", type=float, default=1e-10)
    p.add_argument("--z-re", type=float, default=0.0)
    p.add_argument("--z-im", type=float, default=0.0)
    p.add_argument("--x-min", type=float, default=-1.0)
    p.add_argument("--x-max", type=float, default=1.0)
    p.add_argument("--x-points", type=int, default=101)
    p.add_argument("--samples", type=int, default=None, help="boundary quadrature points (default 4*dim)")
    p.add_argument("--what", choices=("all",) + TABLE_QUANTITIES, default="all",
                   help="table: which quantity to emit")
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("--out", default=None, help="output path (default stdout)")
    return p


def run(cfg: RunConfig) -> tuple[str, int]:
    cfg.validate()
    rep, data = RUNNERS[cfg.command](cfg)
    doc = build_document(cfg, rep, data)
    text = to_json(doc) if cfg.format == "json" else to_csv(cfg, doc)
    return text, 0 if rep.passed else 1


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    cfg = RunConfig(**vars(args))
    try:
        text, code = run(cfg)
    except (UsageError, ValueError) as exc:
        print(f"{TOOL}: error: {exc}", file=sys.stderr)
        return 2
    if cfg.out:
        with open(cfg.out, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())

from __future__ import annotations

from dataclasses import dataclass, field, asdict
from typing import Any, Optional


@dataclass
class CheckRecord:
    """One verified identity or one comparison against a printed claim.

    Informational records never affect the overall status.
    """

    name: str
    residual: float
    tolerance: float
    passed: bool
    informational: bool = False
    note: str = ""
    matches_paper_claim: Optional[bool] = None

    def to_dict(self) -> dict[str, Any]:
        return asdict(self)


@dataclass
class VerificationReport:
    checks: list[CheckRecord] = field(default_factory=list)

    def add(
        self,
        name: str,
        residual: float,
        tolerance: float,
        *,
        informational: bool = False,
        note: str = "",
        matches_paper_claim: Optional[bool] = None,
    ) -> CheckRecord:
        rec = CheckRecord(
            name=name,
            residual=float(residual),
            tolerance=float(tolerance),
            passed=bool(residual < tolerance),
            informational=informational,
            note=note,
            matches_paper_claim=matches_paper_claim,
        )
        self.checks.append(rec)
        return rec

    def extend(self, other: "VerificationReport") -> None:
        self.checks.extend(other.checks)

    def __getitem__(self, name: str) -> CheckRecord:
        for rec in self.checks:
            if rec.name == name:
                return rec
        raise KeyError(name)

    @property
    def passed(self) -> bool:
        return all(rec.passed for rec in self.checks if not rec.informational)

    def failures(self) -> list[CheckRecord]:
        return [rec for rec in self.checks if not rec.informational and not rec.passed]

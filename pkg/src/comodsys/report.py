"""Verification reports: a flat list of named pass/fail checks."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any


@dataclass
class Check:
    name: str
    passed: bool
    detail: str = ""
    witness: dict[str, float] | None = None
    deviation: float | None = None
    # informational findings (e.g. a printed formula that disagrees with the
    # derived one) are flagged but do not fail the suite
    flagged: bool = False

    def to_dict(self) -> dict[str, Any]:
        out: dict[str, Any] = {"name": self.name, "passed": self.passed}
        if self.detail:
            out["detail"] = self.detail
        if self.deviation is not None:
            out["deviation"] = float(f"{self.deviation:.6e}")
        if self.witness is not None:
            out["witness"] = {k: float(f"{v:.15g}") for k, v in sorted(self.witness.items())}
        if self.flagged:
            out["flagged"] = True
        return out


@dataclass
class Report:
    title: str
    checks: list[Check] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def __bool__(self) -> bool:
        return self.passed

    def add(self, check: Check) -> Check:
        self.checks.append(check)
        return check

    def extend(self, other: "Report", prefix: str | None = None) -> None:
        for c in other.checks:
            if prefix:
                c = Check(f"{prefix}: {c.name}", c.passed, c.detail, c.witness, c.deviation, c.flagged)
            self.checks.append(c)

    @property
    def failures(self) -> list[Check]:
        return [c for c in self.checks if not c.passed]

    @property
    def flags(self) -> list[Check]:
        return [c for c in self.checks if c.flagged]

    def to_dict(self) -> dict[str, Any]:
        return {
            "title": self.title,
            "passed": self.passed,
            "checks": [c.to_dict() for c in self.checks],
        }

    def render(self) -> str:
        lines = [f"{self.title}: {'PASS' if self.passed else 'FAIL'}"]
        for c in self.checks:
            mark = "ok  " if c.passed else "FAIL"
            if c.flagged:
                mark = "flag" if c.passed else mark
            line = f"  [{mark}] {c.name}"
            if c.deviation is not None:
                line += f"  (dev {c.deviation:.2e})"
            if c.detail and (not c.passed or c.flagged):
                line += f"  -- {c.detail}"
            lines.append(line)
        return "\n".join(lines)

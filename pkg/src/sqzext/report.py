"""Verdict reports and enumeration budgets shared by all verifiers."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any

SIZE_CAP = 64
STEP_BUDGET = 10**7


class BudgetExceeded(RuntimeError):
    pass


class ImplementationFault(RuntimeError):
    """A check that is a theorem failed; the fault is in the code, not the input."""


class Budget:
    """Counts candidate steps across an enumeration and aborts past the cap."""

    def __init__(self, steps: int = STEP_BUDGET, size_cap: int = SIZE_CAP):
        if steps <= 0 or size_cap <= 0:
            raise ValueError("budget and size cap must be positive")
        self.steps = steps
        self.size_cap = size_cap
        self.used = 0

    def tick(self, n: int = 1) -> None:
        self.used += n
        if self.used > self.steps:
            raise BudgetExceeded(f"enumeration exceeded {self.steps} candidate steps")

    def check_size(self, n: int, what: str = "carrier") -> None:
        if n > self.size_cap:
            raise BudgetExceeded(f"{what} of size {n} exceeds cap {self.size_cap}")


def as_budget(budget: Budget | int | None) -> Budget:
    if budget is None:
        return Budget()
    if isinstance(budget, Budget):
        return budget
    return Budget(int(budget))


def _plain(x: Any) -> Any:
    # numpy scalars / tuples -> json friendly values
    if hasattr(x, "tolist"):
        return x.tolist()
    if isinstance(x, (tuple, list)):
        return [_plain(v) for v in x]
    if isinstance(x, dict):
        return {str(k): _plain(v) for k, v in x.items()}
    return x


@dataclass
class Check:
    name: str
    ok: bool | None  # None = not applicable
    witness: Any = None

    def to_dict(self) -> dict:
        d = {"name": self.name, "verdict": {True: "pass", False: "fail", None: "n/a"}[self.ok]}
        if self.witness is not None:
            d["witness"] = _plain(self.witness)
        return d


@dataclass
class Report:
    subject: str = ""
    checks: list[Check] = field(default_factory=list)

    def add(self, name: str, ok: bool | None, witness: Any = None) -> bool | None:
        self.checks.append(Check(name, ok, witness))
        return ok

    def extend(self, other: Report, prefix: str = "") -> None:
        for c in other.checks:
            self.checks.append(Check(prefix + c.name, c.ok, c.witness))

    @property
    def ok(self) -> bool:
        return all(c.ok is not False for c in self.checks)

    @property
    def applicable(self) -> bool:
        return any(c.ok is not None for c in self.checks)

    def failures(self) -> list[Check]:
        return [c for c in self.checks if c.ok is False]

    def get(self, name: str) -> Check:
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)

    def __bool__(self) -> bool:
        return self.ok

    def to_dict(self) -> dict:
        return {
            "subject": self.subject,
            "status": "pass" if self.ok else "fail",
            "checks": [c.to_dict() for c in self.checks],
        }

    def __str__(self) -> str:
        lines = [f"{self.subject or 'report'}: {'pass' if self.ok else 'FAIL'}"]
        for c in self.checks:
            v = {True: "ok", False: "FAIL", None: "n/a"}[c.ok]
            w = f"  witness={_plain(c.witness)}" if c.witness is not None else ""
            lines.append(f"  [{v}] {c.name}{w}")
        return "\n".join(lines)


def not_applicable(subject: str, reason: str) -> Report:
    r = Report(subject)
    r.add("precondition", None, reason)
    return r

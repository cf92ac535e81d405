"""Named residual checks collected into serializable reports."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, Iterable

import numpy as np


@dataclass(frozen=True)
class CheckEntry:
    check_id: str
    description: str
    residual: float
    tol: float
    paper_ref: str = ""

    @property
    def passed(self) -> bool:
        return bool(self.residual <= self.tol)

    def to_dict(self) -> dict[str, Any]:
        return {
            "id": self.check_id,
            "description": self.description,
            "paper_ref": self.paper_ref,
            "residual": float(self.residual),
            "tol": float(self.tol),
            "pass": self.passed,
        }


@dataclass
class CheckReport:
    entries: list[CheckEntry] = field(default_factory=list)
    params_echo: Any = None

    def add(self, check_id: str, description: str, residual: float, tol: float,
            paper_ref: str = "") -> CheckEntry:
        r = float(residual)
        if math.isnan(r):
            r = math.inf
        entry = CheckEntry(check_id, description, r, float(tol), paper_ref)
        self.entries.append(entry)
        return entry

    def extend(self, other: CheckReport) -> CheckReport:
        self.entries.extend(other.entries)
        return self

    @property
    def passed(self) -> bool:
        return all(e.passed for e in self.entries)

    def failures(self) -> list[CheckEntry]:
        return [e for e in self.entries if not e.passed]

    def __getitem__(self, check_id: str) -> CheckEntry:
        for e in self.entries:
            if e.check_id == check_id:
                return e
        raise KeyError(check_id)

    def __contains__(self, check_id: str) -> bool:
        return any(e.check_id == check_id for e in self.entries)

    def select(self, prefix: str) -> list[CheckEntry]:
        return [e for e in self.entries if e.check_id.startswith(prefix)]

    def max_residual(self, prefix: str = "") -> float:
        return max((e.residual for e in self.select(prefix)), default=0.0)

    def to_dict(self) -> dict[str, Any]:
        return {"checks": [e.to_dict() for e in self.entries]}


def mat_residual(*pairs: tuple[np.ndarray, np.ndarray]) -> float:
    """Largest Frobenius norm of ``a - b`` over the given pairs."""
    return max(float(np.linalg.norm(np.asarray(a) - np.asarray(b))) for a, b in pairs)


def norm(a: Iterable[complex] | np.ndarray) -> float:
    return float(np.linalg.norm(np.asarray(a)))

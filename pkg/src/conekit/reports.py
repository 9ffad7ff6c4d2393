"""Pass/fail report containers shared by the builders and verifiers."""

from __future__ import annotations

import json
from dataclasses import dataclass, field

__all__ = ["BoundCheck", "VerificationReport"]


@dataclass(frozen=True)
class BoundCheck:
    """One measured quantity against one declared bound.

    kind = "min_ge": passes iff value >= bound - tol (grid minima).
    kind = "match":  passes iff |value - bound| <= tol (pointwise targets).
    kind = "max_le": passes iff value <= bound + tol.

    ``bound_expr`` optionally carries the symbolic form of the bound (e.g.
    "2 - 2*c^2") next to its representable 64-bit value.
    """

    name: str
    value: float
    bound: float
    kind: str = "min_ge"
    tol: float = 1e-9
    bound_expr: str = ""

    @property
    def passed(self) -> bool:
        if self.kind == "min_ge":
            return bool(self.value >= self.bound - self.tol)
        if self.kind == "max_le":
            return bool(self.value <= self.bound + self.tol)
        if self.kind == "match":
            return bool(abs(self.value - self.bound) <= self.tol)
        raise ValueError(f"unknown check kind {self.kind!r}")

    def describe(self) -> str:
        op = {"min_ge": ">=", "max_le": "<=", "match": "=="}[self.kind]
        expr = f" [{self.bound_expr}]" if self.bound_expr else ""
        status = "PASS" if self.passed else "FAIL"
        return (f"{status} {self.name}: {self.value:.12g} {op} "
                f"{self.bound:.12g}{expr} (tol {self.tol:g})")


@dataclass(frozen=True)
class VerificationReport:
    """A labelled bundle of bound checks over a grid.

    For region verification the ``min_ge`` checks carry the per-entry grid
    minima against the declared bounds; the pass flag of each check is true
    iff the minimum clears its bound minus the tolerance.
    """

    label: str
    grid_size: int
    tol: float
    checks: tuple[BoundCheck, ...] = field(default_factory=tuple)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    @property
    def minima(self) -> dict[str, float]:
        return {c.name: c.value for c in self.checks if c.kind == "min_ge"}

    @property
    def bounds(self) -> dict[str, float]:
        return {c.name: c.bound for c in self.checks}

    @property
    def flags(self) -> dict[str, bool]:
        return {c.name: c.passed for c in self.checks}

    def to_dict(self) -> dict:
        return {
            "label": self.label,
            "grid_size": self.grid_size,
            "tol": self.tol,
            "passed": self.passed,
            "checks": [
                {
                    "name": c.name,
                    "value": float(c.value),
                    "bound": float(c.bound),
                    "bound_expr": c.bound_expr,
                    "kind": c.kind,
                    "tol": float(c.tol),
                    "passed": c.passed,
                }
                for c in self.checks
            ],
        }

    def to_json(self, indent: int = 2) -> str:
        return json.dumps(self.to_dict(), indent=indent)

    def describe(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        lines = [f"{status} {self.label} (grid {self.grid_size}, tol {self.tol:g})"]
        lines += ["  " + c.describe() for c in self.checks]
        return "\n".join(lines)

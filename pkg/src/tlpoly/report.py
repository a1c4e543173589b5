"""Fit/check reports shared by the two-level checker and the detector."""
from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Optional

from .core_math import fraction_to_str


def _value_json(v):
    if hasattr(v, "to_json"):
        return v.to_json()
    return fraction_to_str(Fraction(v))


@dataclass(frozen=True)
class Mismatch:
    """One disagreement; ``q`` is None for whole-table (polynomial) comparisons."""

    q: Optional[int]
    r: int
    i: int
    expected: Any
    got: Any

    @property
    def key(self) -> tuple:
        return (-1 if self.q is None else self.q, self.r, self.i)

    def to_json(self) -> dict:
        return {
            "q": self.q,
            "r": self.r,
            "i": self.i,
            "expected": _value_json(self.expected),
            "got": _value_json(self.got),
        }


@dataclass
class FitReport:
    """Outcome of fitting or checking a two-level object.

    ``status`` is derived: pass iff there are no mismatches and no errors.
    """

    family: str = ""
    config: dict = field(default_factory=dict)
    table: Any = None  # TwoLevelQP, set by producers
    fitted: dict = field(default_factory=dict)  # (r, i) -> (Poly, sample count)
    mismatches: list = field(default_factory=list)
    errors: list = field(default_factory=list)
    periods: dict = field(default_factory=dict)
    checked: list = field(default_factory=list)  # (q, r, i) triples compared
    notes: list = field(default_factory=list)
    observed: dict = field(default_factory=dict)  # (q, r, i) -> extracted coefficient

    @property
    def status(self) -> str:
        return "pass" if not self.mismatches and not self.errors else "fail"

    @property
    def ok(self) -> bool:
        return self.status == "pass"

    def sort(self) -> None:
        self.mismatches.sort(key=lambda m: m.key)
        self.checked.sort()

    def to_json(self) -> dict:
        self.sort()
        return {
            "status": self.status,
            "family": self.family,
            "config": self.config,
            "table": self.table.to_json() if self.table is not None else None,
            "fitted": [
                {"r": r, "i": i, "poly": p.to_json(), "samples": cnt}
                for (r, i), (p, cnt) in sorted(self.fitted.items())
            ],
            "mismatches": [m.to_json() for m in self.mismatches],
            "errors": list(self.errors),
            "periods": {str(k): v for k, v in sorted(self.periods.items())},
            "checked": len(self.checked),
            "notes": list(self.notes),
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True, indent=2)

    def coefficient_rows(self) -> list[tuple[int, int, int, Fraction]]:
        """(q, r, i, value) tuples of the fitted table over the checked q values."""
        rows = []
        if self.table is None:
            return rows
        for q, r, i in sorted(set(self.checked)):
            rows.append((q, r, i, self.table.phi(r, i)(q)))
        return rows

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["q", "r", "i", "value"])
        for q, r, i, v in self.coefficient_rows():
            w.writerow([q, r, i, fraction_to_str(v)])
        return buf.getvalue()

"""Verification reports: one record per checked identity."""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field
from typing import Optional

__all__ = ["Record", "Report", "default_tol", "DEFAULT_TOL"]

DEFAULT_TOL = 1e-9


def default_tol() -> float:
    """Tolerance from ``MPOGAUGE_TOL`` if set, else ``1e-9``."""
    raw = os.environ.get("MPOGAUGE_TOL")
    if raw is None or raw.strip() == "":
        return DEFAULT_TOL
    val = float(raw)
    if not val > 0:
        raise ValueError("MPOGAUGE_TOL must be positive")
    return val


@dataclass(frozen=True)
class Record:
    identity: str
    anchor: str
    residual: float
    tol: float
    note: str = ""

    @property
    def passed(self) -> bool:
        return bool(self.residual < self.tol)

    def to_json(self) -> dict:
        return {
            "identity": self.identity,
            "anchor": self.anchor,
            "residual": float(self.residual),
            "tol": float(self.tol),
            "pass": self.passed,
            "note": self.note,
        }


@dataclass
class Report:
    """Ordered collection of :class:`Record` plus free-form metadata."""

    records: list = field(default_factory=list)
    meta: dict = field(default_factory=dict)

    def add(self, identity: str, anchor: str, residual: float,
            tol: Optional[float] = None, note: str = "") -> Record:
        rec = Record(identity, anchor, float(residual),
                     default_tol() if tol is None else float(tol), note)
        self.records.append(rec)
        return rec

    def extend(self, other: "Report", prefix: str = "") -> None:
        for r in other.records:
            self.records.append(Record(prefix + r.identity, r.anchor, r.residual, r.tol, r.note))

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.records)

    @property
    def max_residual(self) -> float:
        return max((r.residual for r in self.records), default=0.0)

    def failures(self) -> list:
        return [r for r in self.records if not r.passed]

    def find(self, identity: str) -> list:
        return [r for r in self.records if r.identity == identity]

    def summary_line(self) -> str:
        n_fail = len(self.failures())
        state = "PASS" if n_fail == 0 else "FAIL"
        return (f"{state}: {len(self.records) - n_fail}/{len(self.records)} identities "
                f"hold, max residual {self.max_residual:.2e}")

    def to_json(self) -> dict:
        recs = sorted(self.records, key=lambda r: r.identity)
        return {
            "meta": self.meta,
            "pass": self.passed,
            "records": [r.to_json() for r in recs],
        }

    def write(self, path) -> None:
        with open(path, "w") as fh:
            json.dump(self.to_json(), fh, indent=2, sort_keys=True)

"""Check rows, reports and their deterministic JSON form."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, replace
from typing import Any, Iterable, Optional

import numpy as np

SCHEMA_VERSION = 1

PASS = "PASS"
FAIL = "FAIL"
NA = "NOT-APPLICABLE"
FLAGGED = "FLAGGED"
STATUSES = (PASS, FAIL, NA, FLAGGED)


def clean(value: Any) -> Any:
    """Convert numpy scalars/arrays to plain JSON values; non-finite floats become None."""
    if isinstance(value, dict):
        return {str(k): clean(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [clean(v) for v in value]
    if isinstance(value, np.ndarray):
        return clean(value.tolist())
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        x = float(value)
        return x if math.isfinite(x) else None
    return value


@dataclass
class Row:
    check_id: str
    point_index: int
    probe_index: int
    probe: str
    lhs: Any
    rhs: Any
    residual: float
    tol: float
    status: str
    point: Optional[dict] = None
    note: str = ""
    # status given to a failed residual; empty for rows not judged by tolerance
    on_fail: str = field(default="", repr=False, compare=False)

    def sort_key(self):
        return (self.check_id, self.point_index, self.probe_index)

    def as_dict(self) -> dict:
        d = {
            "check_id": self.check_id,
            "point_index": self.point_index,
            "point": self.point,
            "probe_index": self.probe_index,
            "probe": self.probe,
            "lhs": self.lhs,
            "rhs": self.rhs,
            "residual": self.residual,
            "tol": self.tol,
            "status": self.status,
        }
        if self.note:
            d["note"] = self.note
        return clean(d)


def judged(check_id, point_index, probe_index, probe, lhs, rhs, residual, tol, *,
           on_fail=FAIL, gate: Optional[str] = None, point=None, note="") -> Row:
    """Build a row whose status follows from ``residual <= tol``.

    ``gate`` is a reason string when a precondition failed; the row then
    records its values but is NOT-APPLICABLE.
    """
    residual = float(residual)
    if gate:
        status = NA
        note = f"{note}; {gate}" if note else gate
    elif math.isfinite(residual) and residual <= tol:
        status = PASS
    else:
        status = on_fail
    return Row(check_id, point_index, probe_index, probe, lhs, rhs, residual, tol, status, point, note, on_fail)


def with_tol(row: Row, tol: float) -> Row:
    """Re-judge a tolerance-judged row; gated and hand-built rows are returned unchanged."""
    if not row.on_fail or row.status not in (PASS, row.on_fail):
        return row
    ok = math.isfinite(row.residual) and row.residual <= tol
    return replace(row, tol=tol, status=PASS if ok else row.on_fail)


@dataclass
class CheckReport:
    rows: list = field(default_factory=list)
    reference_claims: list = field(default_factory=list)
    measurements: dict = field(default_factory=dict)
    scenario: str = ""
    digest: str = ""
    seed: Optional[int] = None

    def append(self, row: Row) -> "CheckReport":
        self.rows.append(row)
        return self

    def extend(self, rows: Iterable[Row]) -> "CheckReport":
        self.rows.extend(rows)
        return self

    def merge(self, other: "CheckReport") -> "CheckReport":
        self.rows.extend(other.rows)
        self.reference_claims.extend(other.reference_claims)
        self.measurements.update(other.measurements)
        return self

    def sorted_rows(self) -> list:
        return sorted(self.rows, key=Row.sort_key)

    def by_check(self, check_id: str) -> list:
        return [r for r in self.sorted_rows() if r.check_id == check_id]

    def max_residual(self, check_id: Optional[str] = None) -> float:
        vals = [r.residual for r in self.rows
                if (check_id is None or r.check_id == check_id) and math.isfinite(r.residual)]
        return max(vals, default=0.0)

    @property
    def passed(self) -> bool:
        return all(r.status == PASS for r in self.rows)

    @property
    def failed(self) -> bool:
        return any(r.status == FAIL for r in self.rows)

    def summary(self) -> dict:
        counts = {s: 0 for s in STATUSES}
        for r in self.rows:
            counts[r.status] += 1
        finite = [r.residual for r in self.rows
                  if r.status in (PASS, FAIL) and math.isfinite(r.residual)]
        return {
            "n_pass": counts[PASS],
            "n_fail": counts[FAIL],
            "n_na": counts[NA],
            "n_flagged": counts[FLAGGED],
            "max_residual": max(finite, default=0.0),
        }

    def as_dict(self) -> dict:
        return clean({
            "schema": SCHEMA_VERSION,
            "scenario": self.scenario,
            "digest": self.digest,
            "seed": self.seed,
            "summary": self.summary(),
            "reference_claims": self.reference_claims,
            "measurements": self.measurements,
            "rows": [r.as_dict() for r in self.sorted_rows()],
        })

    def to_json(self) -> str:
        return json.dumps(self.as_dict(), sort_keys=True, indent=1, allow_nan=False) + "\n"

    def to_text(self) -> str:
        lines = [f"scenario {self.scenario}  digest {self.digest[:12]}  seed {self.seed}"]
        for r in self.sorted_rows():
            lines.append(
                f"{r.status:<15} {r.check_id:<16} pt={r.point_index:<3} {r.probe:<40} "
                f"res={r.residual:.3e} tol={r.tol:.1e}" + (f"  [{r.note}]" if r.note else "")
            )
        for c in self.reference_claims:
            lines.append(f"CLAIM {c['quantity']}: claimed {c['claimed']!r}, measured {c['measured']!r} "
                         f"-> {c['status']}   ({c['source']})")
        s = self.summary()
        lines.append(
            f"summary: {s['n_pass']} pass, {s['n_fail']} fail, {s['n_na']} n/a, "
            f"{s['n_flagged']} flagged, max residual {s['max_residual']:.3e}"
        )
        return "\n".join(lines) + "\n"

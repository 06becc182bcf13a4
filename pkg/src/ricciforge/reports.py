"""Verification reports and their JSON / CSV serialization."""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from typing import Any, Iterable

import numpy as np

CSV_COLUMNS = ("claim_id", "k", "lambda", "samples", "worst_margin", "tolerance", "passed", "runtime_ms", "seed")


@dataclass(frozen=True)
class VerificationReport:
    """Outcome of one claim.  ``passed`` holds iff ``worst_margin >= 0``."""

    claim_id: str
    parameters: dict[str, Any]
    samples: int
    worst_margin: float
    tolerance: float
    runtime_ms: int = 0
    seed: int = 0
    value: Any = None
    notes: str = ""
    extra: dict[str, Any] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return bool(self.worst_margin >= 0)

    def as_dict(self) -> dict[str, Any]:
        return {
            "claim_id": self.claim_id,
            "parameters": dict(self.parameters),
            "samples": int(self.samples),
            "worst_margin": float(self.worst_margin),
            "tolerance": float(self.tolerance),
            "passed": self.passed,
            "runtime_ms": int(self.runtime_ms),
            "seed": int(self.seed),
            "value": self.value,
            "notes": self.notes,
            "extra": dict(self.extra),
        }

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> "VerificationReport":
        return cls(d["claim_id"], d.get("parameters", {}), d["samples"], d["worst_margin"], d["tolerance"],
                   d.get("runtime_ms", 0), d.get("seed", 0), d.get("value"), d.get("notes", ""), d.get("extra", {}))


def _encode(obj, indent: int, level: int) -> str:
    pad = " " * (indent * (level + 1))
    end = " " * (indent * level)
    if isinstance(obj, bool) or obj is None:
        return json.dumps(obj)
    if isinstance(obj, int):
        return str(obj)
    if isinstance(obj, float):
        if not math.isfinite(obj):
            return "null"
        text = format(obj, ".17g")
        if all(ch not in text for ch in ".en"):
            text += ".0"
        return text
    if isinstance(obj, str):
        return json.dumps(obj, ensure_ascii=False)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k), ensure_ascii=False)}: {_encode(v, indent, level + 1)}"
                 for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        items = [pad + _encode(v, indent, level + 1) for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + end + "]"
    if isinstance(obj, np.ndarray):
        return _encode(obj.tolist(), indent, level)
    if isinstance(obj, np.generic):
        return _encode(obj.item(), indent, level)
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def dumps_json(reports: Iterable[VerificationReport], indent: int = 2) -> str:
    """JSON array of reports; floats carry 17 significant digits."""
    return _encode([r.as_dict() for r in reports], indent, 0) + "\n"


def loads_json(text: str) -> list[VerificationReport]:
    return [VerificationReport.from_dict(d) for d in json.loads(text)]


def _csv_cell(v):
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return format(v, ".17g")
    return "" if v is None else str(v)


def dumps_csv(reports: Iterable[VerificationReport]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for r in reports:
        p = r.parameters
        w.writerow([_csv_cell(x) for x in (r.claim_id, p.get("k"), p.get("lambda"), r.samples,
                                            float(r.worst_margin), float(r.tolerance), r.passed,
                                            r.runtime_ms, r.seed)])
    return buf.getvalue()

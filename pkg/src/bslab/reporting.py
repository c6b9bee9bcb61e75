"""Structured verification reports and deterministic serialization.

JSON output is emitted by a small writer of our own so that floats are
always formatted at 17 significant digits and key order is the
insertion order: identical inputs produce byte-identical files.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field


@dataclass
class EstimateReport:
    """Outcome of one verified bound or trend check.

    ``samples`` is a list of (params, value) pairs where params is a
    flat dict of floats; ``details`` records the quantities the
    pass/fail rule was computed from so the verdict can be re-derived.
    """

    name: str
    samples: list = field(default_factory=list)
    fitted_exponent: float | None = None
    bound_constant: float | None = None
    passed: bool = True
    tolerance_used: float = 0.0
    details: dict = field(default_factory=dict)

    def add(self, params: dict, value: float):
        self.samples.append((dict(params), float(value)))

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "samples": [{"params": p, "value": v} for p, v in self.samples],
            "fitted_exponent": self.fitted_exponent,
            "bound_constant": self.bound_constant,
            "passed": self.passed,
            "tolerance": self.tolerance_used,
            "details": self.details,
        }


def _emit(obj, parts):
    if obj is None:
        parts.append("null")
    elif obj is True:
        parts.append("true")
    elif obj is False:
        parts.append("false")
    elif isinstance(obj, str):
        escaped = obj.replace("\\", "\\\\").replace('"', '\\"')
        escaped = escaped.replace("\n", "\\n").replace("\t", "\\t")
        parts.append(f'"{escaped}"')
    elif isinstance(obj, int):
        parts.append(str(obj))
    elif isinstance(obj, float):
        if math.isnan(obj) or math.isinf(obj):
            parts.append("null")
        else:
            parts.append(format(obj, ".17g"))
    elif isinstance(obj, complex):
        _emit({"re": obj.real, "im": obj.imag}, parts)
    elif isinstance(obj, dict):
        parts.append("{")
        for i, (key, val) in enumerate(obj.items()):
            if i:
                parts.append(",")
            _emit(str(key), parts)
            parts.append(":")
            _emit(val, parts)
        parts.append("}")
    elif isinstance(obj, (list, tuple)):
        parts.append("[")
        for i, val in enumerate(obj):
            if i:
                parts.append(",")
            _emit(val, parts)
        parts.append("]")
    else:
        try:
            _emit(float(obj), parts)
        except (TypeError, ValueError):
            raise TypeError(f"cannot serialize {type(obj).__name__}")


def dumps_json(obj) -> str:
    """Deterministic JSON text (17-significant-digit floats)."""
    parts = []
    _emit(obj, parts)
    return "".join(parts)


def dump_json(obj, path):
    text = dumps_json(obj)
    with open(path, "w") as fh:
        fh.write(text)
        fh.write("\n")


def report_to_csv(report: EstimateReport, path):
    """Plot-ready CSV twin: one row per sample."""
    keys = []
    for params, _ in report.samples:
        for k in params:
            if k not in keys:
                keys.append(k)
    with open(path, "w") as fh:
        fh.write(",".join(keys + ["value"]) + "\n")
        for params, value in report.samples:
            row = [format(float(params.get(k, math.nan)), ".17g") for k in keys]
            row.append(format(value, ".17g"))
            fh.write(",".join(row) + "\n")

"""Deterministic JSON reports."""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any

import numpy as np


def jsonable(x: Any) -> Any:
    """Plain JSON data: Fractions become "a/b", numpy scalars and arrays become Python values."""
    if isinstance(x, bool) or x is None or isinstance(x, str):
        return x
    if isinstance(x, (int, np.integer)):
        return int(x)
    if isinstance(x, np.bool_):
        return bool(x)
    if isinstance(x, Fraction):
        return str(x) if x.denominator != 1 else int(x.numerator)
    if isinstance(x, float):
        return x
    if isinstance(x, np.ndarray):
        return jsonable(x.tolist())
    if isinstance(x, dict):
        return {str(k): jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [jsonable(v) for v in x]
    if isinstance(x, (set, frozenset)):
        return sorted(jsonable(v) for v in x)
    if hasattr(x, "to_json"):
        return jsonable(x.to_json())
    raise TypeError(f"cannot serialize {type(x).__name__}")


def dumps(obj: Any) -> str:
    return json.dumps(jsonable(obj), sort_keys=True, indent=2, ensure_ascii=False) + "\n"


@dataclass
class Report:
    command: str
    params: dict
    result: Any
    assertions: list = field(default_factory=list)
    timing: float | None = None

    def to_json(self) -> dict:
        d = {"command": self.command, "params": self.params, "result": self.result,
             "assertions": self.assertions}
        if self.timing is not None:
            d["timing_seconds"] = round(self.timing, 6)
        return d

    def dumps(self) -> str:
        return dumps(self.to_json())


def error_document(exc: BaseException, kind: str) -> dict:
    d = {"error": {"kind": kind, "message": str(exc)}}
    for attr in ("path", "reason", "cap", "limit", "requested"):
        if hasattr(exc, attr):
            d["error"][attr] = getattr(exc, attr)
    return d

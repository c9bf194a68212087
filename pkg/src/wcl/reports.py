"""Structured outcome of one inequality check."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

PASS = "PASS"
FAIL = "FAIL"
VIOLATED = "VIOLATED"
INCONCLUSIVE = "INCONCLUSIVE"
VERDICTS = (PASS, FAIL, VIOLATED, INCONCLUSIVE)


@dataclass
class VerificationReport:
    check: str
    verdict: str
    lhs: object = None
    rhs: object = None
    ratio: object = None
    params: dict = field(default_factory=dict)
    witnesses: list = field(default_factory=list)
    trials: int = 1
    seed: object = None
    wall_time: float | None = None
    details: dict = field(default_factory=dict)
    # verdict the underlying mathematics predicts; used for exit codes
    expected: str = PASS

    def __post_init__(self):
        if self.verdict not in VERDICTS:
            raise ValueError(f"unknown verdict {self.verdict!r}")

    @property
    def passed(self) -> bool:
        return self.verdict == PASS

    @property
    def as_expected(self) -> bool:
        return self.verdict == self.expected

    def to_dict(self, timestamps: bool = True) -> dict:
        d = {
            "check": self.check,
            "params": jsonable(self.params),
            "lhs": jsonable(self.lhs),
            "rhs": jsonable(self.rhs),
            "ratio": jsonable(self.ratio),
            "witnesses": jsonable(self.witnesses),
            "verdict": self.verdict,
            "expected": self.expected,
            "trials": self.trials,
            "seed": jsonable(self.seed),
        }
        if self.details:
            d["details"] = jsonable(self.details)
        if timestamps and self.wall_time is not None:
            d["wall_time"] = round(self.wall_time, 6)
        return d

    def to_json(self, timestamps: bool = True) -> str:
        return json.dumps(self.to_dict(timestamps), sort_keys=True)

    @classmethod
    def from_dict(cls, d: dict) -> "VerificationReport":
        return cls(
            check=d["check"],
            verdict=d["verdict"],
            lhs=from_jsonable(d.get("lhs")),
            rhs=from_jsonable(d.get("rhs")),
            ratio=from_jsonable(d.get("ratio")),
            params=d.get("params", {}),
            witnesses=d.get("witnesses", []),
            trials=d.get("trials", 1),
            seed=d.get("seed"),
            wall_time=d.get("wall_time"),
            details=d.get("details", {}),
            expected=d.get("expected", PASS),
        )

    def summary(self) -> str:
        return f"{self.check}: {self.verdict} lhs={_short(self.lhs)} rhs={_short(self.rhs)} ratio={_short(self.ratio)}"


def _short(x):
    if isinstance(x, float):
        return f"{x:.6g}"
    return str(x)


def jsonable(x):
    """Convert to JSON-safe values; exact rationals become ``"p/q"`` strings."""
    if isinstance(x, bool) or x is None or isinstance(x, str):
        return x
    if isinstance(x, Fraction):
        return x.numerator if x.denominator == 1 else f"{x.numerator}/{x.denominator}"
    if isinstance(x, (int, np.integer)):
        return int(x)
    if isinstance(x, (float, np.floating)):
        x = float(x)
        if math.isnan(x) or math.isinf(x):
            return repr(x)
        return x
    if isinstance(x, complex):
        return [jsonable(x.real), jsonable(x.imag)]
    if isinstance(x, dict):
        return {str(k): jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple, np.ndarray)):
        return [jsonable(v) for v in x]
    if hasattr(x, "re") and hasattr(x, "im"):
        return [jsonable(x.re), jsonable(x.im)]
    return str(x)


def from_jsonable(x):
    if isinstance(x, str) and "/" in x:
        try:
            return Fraction(x)
        except ValueError:
            return x
    if x in ("inf", "-inf", "nan"):
        return float(x)
    return x

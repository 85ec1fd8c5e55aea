"""Shared records: verification reports and truncation settings."""

from __future__ import annotations

import math
import time
from dataclasses import asdict, dataclass, field
from typing import Any

MODES = ("abs", "rel", "either")


@dataclass(frozen=True)
class VerificationReport:
    check: str
    inputs: dict
    lhs: complex
    rhs: complex
    abs_err: float
    rel_err: float
    tol: float
    mode: str
    passed: bool
    runtime_ms: int
    note: str = ""

    def as_dict(self) -> dict[str, Any]:
        d = asdict(self)
        d["lhs"] = _encode(self.lhs)
        d["rhs"] = _encode(self.rhs)
        d["inputs"] = {k: _encode(v) for k, v in self.inputs.items()}
        return d


def _encode(x):
    if isinstance(x, complex):
        if x.imag == 0:
            return x.real
        return {"re": x.real, "im": x.imag}
    if isinstance(x, (list, tuple)):
        return [_encode(v) for v in x]
    if hasattr(x, "item"):
        return _encode(x.item())
    return x


def make_report(check: str, inputs: dict, lhs, rhs, tol: float, mode: str = "rel",
                start: float | None = None, note: str = "") -> VerificationReport:
    """Build a report; ``start`` is a ``time.perf_counter()`` stamp."""
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}")
    lhs, rhs = complex(lhs), complex(rhs)
    abs_err = abs(lhs - rhs)
    if abs(rhs) > 0:
        rel_err = abs_err / abs(rhs)
    else:
        rel_err = 0.0 if abs_err == 0 else math.inf
    if mode == "abs":
        ok = abs_err <= tol
    elif mode == "rel":
        ok = rel_err <= tol
    else:
        ok = abs_err <= tol or rel_err <= tol
    ms = int(round(1000 * (time.perf_counter() - start))) if start is not None else 0
    return VerificationReport(check, dict(inputs), lhs, rhs, abs_err, rel_err, tol, mode,
                              bool(ok), ms, note)


@dataclass(frozen=True)
class TruncationConfig:
    """Cutoffs for every infinite sum.  ``None`` means choose automatically
    from a certified tail bound below ``tail_tol``."""

    j_max: int | None = None
    l_max: int | None = None
    n_max: int | None = None
    m_max: int | None = None
    sum_k_max: int = 10_000
    tail_tol: float = 1e-13

    def __post_init__(self):
        for name in ("j_max", "l_max", "n_max", "m_max"):
            v = getattr(self, name)
            if v is not None and v < 1:
                raise ValueError(f"{name} must be positive")
        if self.sum_k_max < 1 or self.tail_tol <= 0:
            raise ValueError("sum_k_max and tail_tol must be positive")


@dataclass
class TailRecord:
    """Tail estimates recorded by a truncated computation."""

    entries: dict = field(default_factory=dict)

    def add(self, name: str, bound: float):
        self.entries[name] = max(bound, self.entries.get(name, 0.0))

    @property
    def total(self) -> float:
        return math.fsum(self.entries.values())

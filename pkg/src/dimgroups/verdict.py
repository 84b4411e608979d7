"""Three-valued verdicts with certificates, and exact serialization helpers."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any


class Truth(enum.Enum):
    TRUE = "true"
    FALSE = "false"
    UNKNOWN = "unknown"


@dataclass(frozen=True)
class Verdict:
    value: Truth
    certificate: dict = field(default_factory=dict)

    @classmethod
    def true(cls, **cert) -> "Verdict":
        return cls(Truth.TRUE, cert)

    @classmethod
    def false(cls, **cert) -> "Verdict":
        return cls(Truth.FALSE, cert)

    @classmethod
    def unknown(cls, **cert) -> "Verdict":
        return cls(Truth.UNKNOWN, cert)

    @property
    def is_true(self) -> bool:
        return self.value is Truth.TRUE

    @property
    def is_false(self) -> bool:
        return self.value is Truth.FALSE

    @property
    def is_unknown(self) -> bool:
        return self.value is Truth.UNKNOWN

    def to_dict(self) -> dict:
        return {"value": self.value.value, "certificate": to_plain(self.certificate)}

    @classmethod
    def from_dict(cls, data: dict) -> "Verdict":
        return cls(Truth(data["value"]), from_plain(data.get("certificate", {})))


def frac_str(q) -> str:
    q = Fraction(q)
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def to_plain(obj: Any) -> Any:
    """Convert certificates into JSON-ready data; fractions become tagged strings."""
    from .laurent import LaurentPoly

    if isinstance(obj, bool) or obj is None or isinstance(obj, str):
        return obj
    if isinstance(obj, (int, float)):
        return obj
    if isinstance(obj, Fraction):
        return {"frac": frac_str(obj)}
    if isinstance(obj, LaurentPoly):
        return {"poly": str(obj)}
    if isinstance(obj, enum.Enum):
        return obj.value
    if isinstance(obj, dict):
        return {str(k): to_plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_plain(v) for v in obj]
    if isinstance(obj, (set, frozenset)):
        return [to_plain(v) for v in sorted(obj)]
    if hasattr(obj, "to_dict"):
        return obj.to_dict()
    raise TypeError(f"cannot serialize {obj!r}")


def from_plain(obj: Any) -> Any:
    from .laurent import parse_poly

    if isinstance(obj, dict):
        if set(obj) == {"frac"}:
            return Fraction(obj["frac"])
        if set(obj) == {"poly"}:
            return parse_poly(obj["poly"])
        return {k: from_plain(v) for k, v in obj.items()}
    if isinstance(obj, list):
        return [from_plain(v) for v in obj]
    return obj

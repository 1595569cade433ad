"""
reporting.py - JSON rendering of results.

Every rational is written as {"exact": "p/q", "decimal": "..."}; the decimal
string is for reading only (settings.DECIMAL_DIGITS significant digits,
round-half-even). Key order is fixed, so identical results give identical
bytes.
"""

import dataclasses
import json
from decimal import ROUND_HALF_EVEN, Context, Decimal
from enum import Enum
from fractions import Fraction
from typing import Any

from src.audit import Deviation, JointReport, PositionReport, PreferenceReport
from src.config import settings
from src.model import Instance, Lottery, Solution
from src.services.instance_io import InstanceFile

_MISREPORT_KINDS = {
    PreferenceReport: "preferences",
    PositionReport: "position",
    JointReport: "joint",
}


def render_decimal(value: Fraction, digits: int | None = None) -> str:
    ctx = Context(prec=digits or settings.DECIMAL_DIGITS, rounding=ROUND_HALF_EVEN)
    quotient = ctx.divide(Decimal(value.numerator), Decimal(value.denominator))
    return format(quotient, "f")


def rational(value: Fraction) -> dict[str, str]:
    return {"exact": str(value), "decimal": render_decimal(value)}


def _approvals(vector: tuple[bool, ...]) -> list[int]:
    return [int(v) for v in vector]


def to_jsonable(obj: Any) -> Any:
    """Recursively convert results to JSON-ready structures."""
    if isinstance(obj, bool) or obj is None or isinstance(obj, (int, str)):
        return obj
    if isinstance(obj, Fraction):
        return rational(obj)
    if isinstance(obj, Enum):
        return obj.value
    if isinstance(obj, Solution):
        return {"facility": obj.facility, "location": rational(obj.location)}
    if isinstance(obj, Lottery):
        return [
            {"facility": sol.facility, "location": rational(sol.location), "probability": rational(p)}
            for sol, p in obj.atoms
        ]
    if isinstance(obj, Instance):
        return InstanceFile.from_instance(obj).model_dump()
    if isinstance(obj, (PreferenceReport, PositionReport, JointReport)):
        out: dict[str, Any] = {"type": _MISREPORT_KINDS[type(obj)]}
        if not isinstance(obj, PreferenceReport):
            out["position"] = rational(obj.position)
        if not isinstance(obj, PositionReport):
            out["approvals"] = _approvals(obj.approvals)
        return out
    if isinstance(obj, Deviation):
        return {
            "agent_index": obj.agent_index,
            "misreport": to_jsonable(obj.kind),
            "truthful_utility": rational(obj.truthful_utility),
            "deviant_utility": rational(obj.deviant_utility),
            "gain": rational(obj.gain),
        }
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        return {f.name: to_jsonable(getattr(obj, f.name)) for f in dataclasses.fields(obj)}
    if isinstance(obj, dict):
        return {str(to_jsonable(k)): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    raise TypeError(f"cannot render {type(obj).__name__} in a report")


def dump_report(obj: Any) -> str:
    return json.dumps(to_jsonable(obj), indent=2) + "\n"

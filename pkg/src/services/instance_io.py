"""
instance_io.py - versioned JSON instance files (and random sweep specs).

    {
      "version": 1,
      "k": 2,
      "candidates": ["0", "1/2", "0.75"],
      "agents": [{"x": "1/1000", "approvals": [1, 0]}, ...]
    }

Rationals are strings ("p/q", integers, or decimals parsed exactly, so
"0.43" is 43/100). Serialization writes the canonical "p/q" form, which makes
parse -> serialize -> parse the identity.
"""

import json
import logging
from pathlib import Path
from typing import Annotated, Literal

from pydantic import AfterValidator, BaseModel, ConfigDict, Field, ValidationError

from src.generators import ApprovalModel, RandomSpec
from src.model import Agent, Instance, parse_rational, validate_instance

logger = logging.getLogger(__name__)

FORMAT_VERSION = 1


class InstanceParseError(ValueError):
    """Malformed instance text; the message names the offending position."""


def _check_rational(value: str) -> str:
    try:
        parse_rational(value)
    except (ValueError, ZeroDivisionError):
        raise ValueError(f"not an exact rational: {value!r}") from None
    return value


RationalText = Annotated[str, AfterValidator(_check_rational)]


class AgentEntry(BaseModel):
    model_config = ConfigDict(extra="forbid")

    x: RationalText
    approvals: list[Literal[0, 1]]


class InstanceFile(BaseModel):
    model_config = ConfigDict(extra="forbid")

    version: Literal[1] = FORMAT_VERSION
    k: int
    candidates: list[RationalText] = Field(default_factory=list)
    agents: list[AgentEntry] = Field(default_factory=list)

    def to_instance(self) -> Instance:
        """Build and validate; invariant violations raise InstanceError subclasses."""
        inst = Instance(
            k=self.k,
            agents=tuple(
                Agent(parse_rational(a.x), tuple(bool(v) for v in a.approvals))
                for a in self.agents
            ),
            candidates=tuple(parse_rational(c) for c in self.candidates),
        )
        validate_instance(inst)
        return inst

    @classmethod
    def from_instance(cls, inst: Instance) -> "InstanceFile":
        return cls(
            k=inst.k,
            candidates=[str(c) for c in inst.candidates],
            agents=[
                AgentEntry(x=str(a.position), approvals=[int(v) for v in a.approvals])
                for a in inst.agents
            ],
        )


def _describe(err: ValidationError) -> str:
    first = err.errors()[0]
    where = ".".join(str(part) for part in first["loc"]) or "<root>"
    return f"{where}: {first['msg']}"


def parse_instance(text: str) -> Instance:
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as e:
        raise InstanceParseError(f"line {e.lineno}, column {e.colno}: {e.msg}") from None
    try:
        model = InstanceFile.model_validate(raw)
    except ValidationError as e:
        raise InstanceParseError(_describe(e)) from None
    return model.to_instance()


def serialize_instance(inst: Instance) -> str:
    return InstanceFile.from_instance(inst).model_dump_json(indent=2) + "\n"


def load_instance(path: str | Path) -> Instance:
    path = Path(path)
    logger.debug("Loading instance from %s", path)
    try:
        return parse_instance(path.read_text(encoding="utf-8"))
    except InstanceParseError as e:
        raise InstanceParseError(f"{path}: {e}") from None


def write_instance(inst: Instance, path: str | Path) -> None:
    Path(path).write_text(serialize_instance(inst), encoding="utf-8")


class RandomSpecFile(BaseModel):
    """JSON form of a random sweep spec (``sweep --spec FILE``)."""

    model_config = ConfigDict(extra="forbid")

    seed: int = 0
    n_range: tuple[int, int] = (1, 6)
    k_range: tuple[int, int] = (2, 3)
    denominator: int = 12
    c_range: tuple[int, int] = (1, 3)
    approval_model: ApprovalModel = ApprovalModel.NONEMPTY

    def to_spec(self, seed: int | None = None) -> RandomSpec:
        data = self.model_dump()
        if seed is not None:
            data["seed"] = seed
        return RandomSpec(**data)


def load_random_spec(path: str | Path) -> RandomSpecFile:
    text = Path(path).read_text(encoding="utf-8")
    try:
        return RandomSpecFile.model_validate_json(text)
    except ValidationError as e:
        raise InstanceParseError(f"{path}: {_describe(e)}") from None

"""
src/mechanisms/theta.py: Deterministic θ-mechanism for known positions.

For θ in [0, 1/2]:
  HAS_MIDDLE  a candidate lies in [θ, 1-θ]
  ONE_SIDE    all candidates in [0, θ) or all in (1-θ, 1]
  TWO_SIDES   candidates on both sides; compare the best facility at c1 for
              the agents left of the midpoint with the best at c2 for the rest

Ratio at most max{1/θ, 1-θ+1/(1-θ)}; 43/100 is the default θ.
"""

import logging
import math
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import ClassVar

from src.mechanisms.base import Mechanism
from src.model import HALF, Instance, Lottery, Solution
from src.solver import best_facility_at

logger = logging.getLogger(__name__)

THETA_DEFAULT = Fraction(43, 100)


class ThetaOutOfRange(ValueError):
    pass


class ThetaCaseTag(str, Enum):
    HAS_MIDDLE = "has_middle"
    ONE_SIDE = "one_side"
    TWO_SIDES = "two_sides"


@dataclass(frozen=True)
class ThetaCase:
    tag: ThetaCaseTag
    location: Fraction | None = None
    left: Fraction | None = None
    right: Fraction | None = None


def theta_default() -> Fraction:
    return THETA_DEFAULT


def _check_theta(theta: Fraction) -> Fraction:
    theta = Fraction(theta)
    if not 0 <= theta <= HALF:
        raise ThetaOutOfRange(f"theta must lie in [0, 1/2], got {theta}")
    return theta


def theta_ratio_bound(theta: Fraction) -> Fraction:
    """max{1/θ, 1-θ+1/(1-θ)}; only defined for θ in (0, 1/2]."""
    theta = _check_theta(theta)
    if theta == 0:
        raise ThetaOutOfRange("the ratio bound is unbounded at theta = 0")
    return max(1 / theta, 1 - theta + 1 / (1 - theta))


def balanced_theta() -> float:
    """
    Closed-form θ balancing the two bound terms (about 0.4302).

    Display only: exact paths use a rational θ such as 43/100.
    """
    root = 3 * math.sqrt(69) - 11
    return (2 - 5 * (2 / root) ** (1 / 3) + (root / 2) ** (1 / 3)) / 3


def classify_theta(inst: Instance, theta: Fraction) -> ThetaCase:
    theta = _check_theta(theta)
    candidates = inst.candidates

    if any(theta <= c <= 1 - theta for c in candidates):
        return ThetaCase(ThetaCaseTag.HAS_MIDDLE, location=inst.closest_to_half())

    below = [c for c in candidates if c < theta]
    above = [c for c in candidates if c > 1 - theta]
    if not below or not above:
        return ThetaCase(ThetaCaseTag.ONE_SIDE, location=inst.closest_to_half())
    return ThetaCase(ThetaCaseTag.TWO_SIDES, left=max(below), right=min(above))


def mech_theta(inst: Instance, theta: Fraction) -> Solution:
    case = classify_theta(inst, theta)

    if case.tag is not ThetaCaseTag.TWO_SIDES:
        facility, _ = best_facility_at(inst, case.location)
        return Solution(facility, case.location)

    c1, c2 = case.left, case.right
    midpoint = (c1 + c2) / 2
    left_group = [i for i, agent in enumerate(inst.agents) if agent.position <= midpoint]
    right_group = [i for i, agent in enumerate(inst.agents) if agent.position > midpoint]
    f1, w1 = best_facility_at(inst, c1, left_group)
    f2, w2 = best_facility_at(inst, c2, right_group)
    logger.debug("two sides: (F%d,%s)=%s vs (F%d,%s)=%s", f1, c1, w1, f2, c2, w2)
    if w1 >= w2:
        return Solution(f1, c1)
    return Solution(f2, c2)


class ThetaMechanism(Mechanism):
    name: ClassVar[str] = "theta"

    def __init__(self, theta: Fraction = THETA_DEFAULT):
        self.theta = _check_theta(theta)

    def outcome(self, inst: Instance) -> Lottery:
        return Lottery.point(mech_theta(inst, self.theta))

    def __repr__(self) -> str:
        return f"<ThetaMechanism theta={self.theta}>"

"""
src/mechanisms/general.py -- Randomized k-approximate mechanism for the
general setting (positions and preferences both private).

The case is decided from k and the candidate set alone; the distribution then
depends on reported approvals only through the counts n_j. Positions never
enter, which is what makes position misreports useless.

Cases (L = leftmost, R = rightmost candidate):
  SINGLE_LOCATION   L = R                      uniform over the k facilities
  MIDDLE_LOCATION   some X in [1/k, (k-1)/k]    most-approved facility at X
  STRADDLE          L < 1/k, R > (k-1)/k        most-approved facility at L or R
  ALL_RIGHT         (k-1)/k < L                 every facility at L
  ALL_LEFT          R < 1/k                     every facility at R
"""

import logging
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import ClassVar

from src.mechanisms.base import Mechanism
from src.model import HALF, Instance, Lottery, Solution

logger = logging.getLogger(__name__)


class GeneralCaseTag(str, Enum):
    SINGLE_LOCATION = "single_location"
    MIDDLE_LOCATION = "middle_location"
    STRADDLE = "straddle"
    ALL_RIGHT = "all_right"
    ALL_LEFT = "all_left"


@dataclass(frozen=True)
class GeneralCase:
    """Case tag plus the locations it is parameterised by."""

    tag: GeneralCaseTag
    middle: Fraction | None = None
    left: Fraction | None = None
    right: Fraction | None = None


def classify_general(inst: Instance) -> GeneralCase:
    k = inst.k
    low, high = Fraction(1, k), Fraction(k - 1, k)
    left, right = inst.L, inst.R

    if left == right:
        return GeneralCase(GeneralCaseTag.SINGLE_LOCATION, middle=left)

    middles = [c for c in inst.candidates if low <= c <= high]
    if middles:
        x = min(middles, key=lambda c: (abs(c - HALF), c))
        return GeneralCase(GeneralCaseTag.MIDDLE_LOCATION, middle=x)

    if left < low and right > high:
        return GeneralCase(GeneralCaseTag.STRADDLE, left=left, right=right)
    if left > high:
        return GeneralCase(GeneralCaseTag.ALL_RIGHT, left=left)
    if right < low:
        return GeneralCase(GeneralCaseTag.ALL_LEFT, right=right)
    # unreachable: every candidate lies below 1/k or above (k-1)/k here
    raise AssertionError(f"unclassified candidate set {inst.candidates} for k={k}")


def most_approved_facility(inst: Instance) -> tuple[int, int, int]:
    """
    Return (facility, n_1, n) over agents reporting at least one approval.

    Ties on n_j go to the lowest original index.
    """
    counted = [agent for agent in inst.agents if agent.approves_any]
    counts = [sum(1 for agent in counted if agent.approvals[j]) for j in range(inst.k)]
    top = max(range(inst.k), key=lambda j: (counts[j], -j))
    return top + 1, counts[top], len(counted)


def _one_side_probability(
    k: int, n_top: int, n: int, near: Fraction, far: Fraction
) -> Fraction:
    """
    Probability of the most-approved facility when every facility is built at
    one extreme candidate. ``near`` is the candidate's distance to the closer
    end of [0,1] (1-L or R), ``far`` its distance to the other end (L or 1-R).
    """
    scale = Fraction(k, k - 1) * near * (n - n_top)
    return (n_top - scale) / (k * far * n_top - scale)


def mech_general(inst: Instance) -> Lottery:
    k = inst.k
    case = classify_general(inst)
    top, n_top, n = most_approved_facility(inst)

    if case.tag is GeneralCaseTag.SINGLE_LOCATION:
        return Lottery.uniform([Solution(j, inst.L) for j in range(1, k + 1)])

    if case.tag is GeneralCaseTag.MIDDLE_LOCATION:
        return Lottery.point(Solution(top, case.middle))

    if case.tag is GeneralCaseTag.STRADDLE:
        left, right = case.left, case.right
        p_left = (1 - k + k * right) / (k * (right - left))
        return Lottery(
            (
                (Solution(top, left), p_left),
                (Solution(top, right), 1 - p_left),
            )
        )

    location = case.left if case.tag is GeneralCaseTag.ALL_RIGHT else case.right

    # uniform at the one-sided location: an empty report can never buy more
    # than a/k, which the truthful lottery already pays
    if n_top == 0:
        logger.warning(
            "Degenerate counts: no agent reports an approval (case=%s); uniform at %s",
            case.tag.value,
            location,
        )
        return Lottery.uniform([Solution(j, location) for j in range(1, k + 1)])

    if case.tag is GeneralCaseTag.ALL_RIGHT:
        p_top = _one_side_probability(k, n_top, n, near=1 - location, far=location)
    else:
        p_top = _one_side_probability(k, n_top, n, near=location, far=1 - location)

    rest = (1 - p_top) / (k - 1)
    atoms = [(Solution(top, location), p_top)]
    atoms.extend((Solution(j, location), rest) for j in range(1, k + 1) if j != top)
    logger.debug(
        "general %s: top=F%d n_top=%d n=%d p_top=%s", case.tag.value, top, n_top, n, p_top
    )
    return Lottery(tuple(atoms))


class GeneralMechanism(Mechanism):
    name: ClassVar[str] = "general"
    position_independent: ClassVar[bool] = True

    def outcome(self, inst: Instance) -> Lottery:
        return mech_general(inst)

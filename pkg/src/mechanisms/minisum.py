"""
src/mechanisms/minisum.py - Minisum location, welfare-maximising facility.

The location depends only on the (known) positions, so preference misreports
can only move welfare between facilities. 2-approximate for k = 2 and
k-approximate for larger k.
"""

from fractions import Fraction
from typing import ClassVar

from src.mechanisms.base import Mechanism
from src.model import Instance, Lottery, Solution
from src.solver import best_facility_at


def total_distance(inst: Instance, location: Fraction) -> Fraction:
    return sum((abs(agent.position - location) for agent in inst.agents), Fraction(0))


def mech_minisum(inst: Instance) -> Solution:
    # min over (distance, location) keeps the leftmost minimiser
    location = min(inst.candidates, key=lambda c: (total_distance(inst, c), c))
    facility, _ = best_facility_at(inst, location)
    return Solution(facility, location)


class MinisumMechanism(Mechanism):
    name: ClassVar[str] = "minisum"

    def outcome(self, inst: Instance) -> Lottery:
        return Lottery.point(mech_minisum(inst))

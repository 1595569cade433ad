from typing import ClassVar

from src.mechanisms.base import Mechanism
from src.model import Instance, Lottery
from src.solver import optimal_solution


class OptimalBaseline(Mechanism):
    """
    The welfare-optimal solution used as if it were a mechanism.

    Not strategyproof; audits of it check that the deviation search finds
    profitable misreports when they exist.
    """

    name: ClassVar[str] = "opt"

    def outcome(self, inst: Instance) -> Lottery:
        return Lottery.point(optimal_solution(inst).best)

"""
src/solver.py -- Brute-force welfare oracles.

Enumerates all k·|C| solutions exactly. Tie-break everywhere: lowest facility
index first, then leftmost location.
"""

import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable

from src.model import (
    Instance,
    InfeasibleSolution,
    Solution,
    agent_utility,
    social_welfare,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class OptResult:
    """Optimal solution, its welfare, and the full welfare table."""

    best: Solution
    opt_welfare: Fraction
    full_table: tuple[tuple[Solution, Fraction], ...]

    def welfare_of(self, solution: Solution) -> Fraction:
        return dict(self.full_table)[solution]


def all_solutions(inst: Instance) -> list[Solution]:
    """Every feasible solution, facility-major then location ascending."""
    return [
        Solution(facility, location)
        for facility in range(1, inst.k + 1)
        for location in inst.candidates
    ]


def optimal_solution(inst: Instance) -> OptResult:
    table = tuple((sol, social_welfare(inst, sol)) for sol in all_solutions(inst))
    best, opt_welfare = table[0]
    # strict improvement keeps the earliest (lowest facility, leftmost) maximiser
    for sol, welfare in table[1:]:
        if welfare > opt_welfare:
            best, opt_welfare = sol, welfare
    logger.debug("OPT=%s at %s over %d solutions", opt_welfare, best, len(table))
    return OptResult(best=best, opt_welfare=opt_welfare, full_table=table)


def best_facility_at(
    inst: Instance,
    loc: Fraction,
    subset: Iterable[int] | None = None,
) -> tuple[int, Fraction]:
    """
    Welfare-maximising facility at a fixed candidate location.

    Parameters
    ----------
    loc:
        Candidate location the facility is built at.
    subset:
        Agent indices whose utility counts; None means all agents.

    Returns
    -------
    (facility index, welfare of the agents in ``subset`` approving it).
    """
    if loc not in inst.candidate_set:
        raise InfeasibleSolution(f"location {loc} is not a candidate")
    indices = range(inst.n) if subset is None else sorted(set(subset))
    agents = [inst.agents[i] for i in indices]

    best_facility, best_welfare = 1, Fraction(-1)
    for facility in range(1, inst.k + 1):
        sol = Solution(facility, loc)
        welfare = sum((agent_utility(agent, sol) for agent in agents), Fraction(0))
        if welfare > best_welfare:
            best_facility, best_welfare = facility, welfare
    return best_facility, best_welfare

"""
src/model.py -- Instance model and exact welfare arithmetic.

Implements:
  - Agent / Instance / Solution / Lottery value types (immutable)
  - validate_instance: first-violated-invariant diagnostics
  - utility, expected_utility, social_welfare, expected_social_welfare
  - approval_counts (n_j per facility)

Every quantity is a fractions.Fraction; floats are rejected at construction.
"""

import logging
import re
from dataclasses import dataclass, replace
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Sequence

logger = logging.getLogger(__name__)

Rational = Fraction

HALF = Fraction(1, 2)


# ---------------------------------------------------------------------------
# Errors
# ---------------------------------------------------------------------------


class InstanceError(ValueError):
    """An Instance or Agent invariant does not hold."""


class PositionOutOfRange(InstanceError):
    pass


class CandidateOutOfRange(InstanceError):
    pass


class DuplicateCandidate(InstanceError):
    pass


class EmptyCandidates(InstanceError):
    pass


class ApprovalLengthMismatch(InstanceError):
    pass


class KTooSmall(InstanceError):
    pass


class InvalidLottery(ValueError):
    """Probabilities are negative, do not sum to 1, or repeat a solution."""


class InfeasibleSolution(ValueError):
    """Facility index outside [1..k] or location not a candidate."""


# ---------------------------------------------------------------------------
# Value types
# ---------------------------------------------------------------------------


# Fraction() expands decimal exponents into integers; 1e-999999999 never returns
MAX_DECIMAL_EXPONENT = 64
_EXPONENT = re.compile(r"[eE]([+-]?[\d_]+)$")


def parse_rational(text: str) -> Fraction:
    """Parse "p/q", integers and decimals exactly; huge exponents are refused."""
    text = text.strip()
    match = _EXPONENT.search(text)
    if match and abs(int(match.group(1))) > MAX_DECIMAL_EXPONENT:
        raise ValueError(f"exponent out of range (|e| <= {MAX_DECIMAL_EXPONENT}): {text!r}")
    return Fraction(text)


def as_rational(value: object) -> Fraction:
    """Coerce ints, strings and Fractions to Fraction; floats are refused."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool) or isinstance(value, float):
        raise TypeError(f"exact rational expected, got {type(value).__name__} {value!r}")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        return parse_rational(value)
    raise TypeError(f"cannot interpret {value!r} as a rational")


@dataclass(frozen=True)
class Agent:
    """An agent's position x_i in [0,1] and approval vector over the k facilities."""

    position: Fraction
    approvals: tuple[bool, ...]

    def __post_init__(self):
        object.__setattr__(self, "position", as_rational(self.position))
        object.__setattr__(self, "approvals", tuple(bool(a) for a in self.approvals))

    def approves(self, facility: int) -> bool:
        """True when the agent approves facility F_j (1-based)."""
        return self.approvals[facility - 1]

    @property
    def approves_any(self) -> bool:
        return any(self.approvals)


@dataclass(frozen=True)
class Instance:
    """
    A facility-location instance.

    Parameters
    ----------
    k:
        Number of facilities (one of them is built).
    agents:
        Reported positions and approvals, in input order.
    candidates:
        Candidate locations C; stored sorted ascending. Duplicates are kept so
        that validate_instance can report them.
    """

    k: int
    agents: tuple[Agent, ...]
    candidates: tuple[Fraction, ...]

    def __post_init__(self):
        object.__setattr__(self, "agents", tuple(self.agents))
        object.__setattr__(
            self, "candidates", tuple(sorted(as_rational(c) for c in self.candidates))
        )

    @property
    def n(self) -> int:
        return len(self.agents)

    @property
    def L(self) -> Fraction:
        """Leftmost candidate location."""
        return self.candidates[0]

    @property
    def R(self) -> Fraction:
        """Rightmost candidate location."""
        return self.candidates[-1]

    @cached_property
    def candidate_set(self) -> frozenset[Fraction]:
        return frozenset(self.candidates)

    def approvers(self, facility: int) -> list[int]:
        """Indices of the agents in N_j."""
        return [i for i, agent in enumerate(self.agents) if agent.approves(facility)]

    def with_agent(self, index: int, agent: Agent) -> "Instance":
        """Return a copy where agent ``index`` reports ``agent`` instead."""
        agents = list(self.agents)
        agents[index] = agent
        return replace(self, agents=tuple(agents))

    def closest_to_half(self) -> Fraction:
        """Candidate closest to 1/2; ties go to the left one."""
        return min(self.candidates, key=lambda c: (abs(c - HALF), c))

    @classmethod
    def build(
        cls,
        k: int,
        agents: Iterable[tuple[object, Sequence[int | bool]]],
        candidates: Iterable[object],
    ) -> "Instance":
        """Construct from plain (position, approvals) pairs and validate."""
        inst = cls(
            k=k,
            agents=tuple(Agent(position, tuple(approvals)) for position, approvals in agents),
            candidates=tuple(candidates),
        )
        validate_instance(inst)
        return inst


@dataclass(frozen=True, order=True)
class Solution:
    """A feasible solution (j, x): facility F_j (1-based) built at candidate x."""

    facility: int
    location: Fraction

    def __post_init__(self):
        object.__setattr__(self, "location", as_rational(self.location))


@dataclass(frozen=True)
class Lottery:
    """
    Exact probability distribution over solutions.

    Atoms are stored ordered by (facility, location), so two lotteries with
    the same distribution compare equal regardless of construction order.
    """

    atoms: tuple[tuple[Solution, Fraction], ...]

    def __post_init__(self):
        atoms = tuple(sorted((sol, as_rational(p)) for sol, p in self.atoms))
        if not atoms:
            raise InvalidLottery("lottery has no atoms")
        seen: set[Solution] = set()
        for sol, p in atoms:
            if p < 0:
                raise InvalidLottery(f"negative probability {p} on {sol}")
            if sol in seen:
                raise InvalidLottery(f"solution {sol} appears twice")
            seen.add(sol)
        total = sum((p for _, p in atoms), Fraction(0))
        if total != 1:
            raise InvalidLottery(f"probabilities sum to {total}, not 1")
        object.__setattr__(self, "atoms", atoms)

    @classmethod
    def point(cls, solution: Solution) -> "Lottery":
        return cls(((solution, Fraction(1)),))

    @classmethod
    def uniform(cls, solutions: Sequence[Solution]) -> "Lottery":
        share = Fraction(1, len(solutions))
        return cls(tuple((sol, share) for sol in solutions))

    def as_dict(self) -> dict[Solution, Fraction]:
        return dict(self.atoms)

    def probability(self, solution: Solution) -> Fraction:
        return self.as_dict().get(solution, Fraction(0))

    @property
    def is_deterministic(self) -> bool:
        return len(self.atoms) == 1


# ---------------------------------------------------------------------------
# Validation
# ---------------------------------------------------------------------------


def validate_instance(inst: Instance) -> None:
    """
    Raise the InstanceError subclass naming the first violated invariant.

    Order: k, candidate list (nonempty, in range, distinct), then agents in
    input order (position range, approval length).
    """
    if inst.k < 2:
        raise KTooSmall(f"k must be at least 2, got {inst.k}")
    if not inst.candidates:
        raise EmptyCandidates("candidate list is empty")
    for c in inst.candidates:
        if not 0 <= c <= 1:
            raise CandidateOutOfRange(f"candidate {c} outside [0,1]")
    for left, right in zip(inst.candidates, inst.candidates[1:]):
        if left == right:
            raise DuplicateCandidate(f"candidate {left} listed more than once")
    if not inst.agents:
        raise InstanceError("instance has no agents")
    for i, agent in enumerate(inst.agents):
        if not 0 <= agent.position <= 1:
            raise PositionOutOfRange(f"agent {i} position {agent.position} outside [0,1]")
        if len(agent.approvals) != inst.k:
            raise ApprovalLengthMismatch(
                f"agent {i} has {len(agent.approvals)} approvals, expected k={inst.k}"
            )


def check_feasible(inst: Instance, sol: Solution) -> None:
    if not 1 <= sol.facility <= inst.k:
        raise InfeasibleSolution(f"facility {sol.facility} outside [1..{inst.k}]")
    if sol.location not in inst.candidate_set:
        raise InfeasibleSolution(f"location {sol.location} is not a candidate")


# ---------------------------------------------------------------------------
# Welfare arithmetic
# ---------------------------------------------------------------------------


def agent_utility(agent: Agent, sol: Solution) -> Fraction:
    """alpha_{i,j} * (1 - |x_i - x|) without feasibility checks."""
    if not agent.approves(sol.facility):
        return Fraction(0)
    return 1 - abs(agent.position - sol.location)


def utility(inst: Instance, agent_index: int, sol: Solution) -> Fraction:
    """Utility of agent ``agent_index`` for the deterministic solution ``sol``."""
    if not 0 <= agent_index < inst.n:
        raise IndexError(f"agent index {agent_index} out of range for n={inst.n}")
    check_feasible(inst, sol)
    return agent_utility(inst.agents[agent_index], sol)


def expected_utility(inst: Instance, agent_index: int, lot: Lottery) -> Fraction:
    return sum(
        (p * utility(inst, agent_index, sol) for sol, p in lot.atoms),
        Fraction(0),
    )


def social_welfare(inst: Instance, sol: Solution) -> Fraction:
    check_feasible(inst, sol)
    return sum((agent_utility(agent, sol) for agent in inst.agents), Fraction(0))


def expected_social_welfare(inst: Instance, lot: Lottery) -> Fraction:
    """Per-atom summation; equals the per-agent sum by linearity."""
    return sum((p * social_welfare(inst, sol) for sol, p in lot.atoms), Fraction(0))


def approval_counts(inst: Instance) -> tuple[int, ...]:
    """n_j for j = 1..k (an agent may count towards several facilities)."""
    return tuple(
        sum(1 for agent in inst.agents if agent.approvals[j]) for j in range(inst.k)
    )

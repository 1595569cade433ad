"""
src/audit.py - Strategyproofness and approximation-ratio audits.

Implements:
  - audit_preferences: every alternative approval report of every agent
  - audit_positions: structured (non-exhaustive) position misreports
  - audit_joint: position x preference misreports, capped per agent
  - empirical_ratio: exact OPT / MECH with 0/0 and x/0 markers
  - check_case_guarantees: per-agent 1/k guarantees of the general mechanism
  - is_tie_break_deviation: misreports that work through the most-approved tie-break

Deviations are unilateral and always scored with the deviator's TRUE
position and approvals.
"""

import itertools
import logging
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Iterable, Iterator

from src.config import settings
from src.mechanisms import GeneralCaseTag, Mechanism, classify_general, mech_general
from src.mechanisms.general import most_approved_facility
from src.model import (
    Agent,
    Instance,
    Lottery,
    Solution,
    expected_social_welfare,
    expected_utility,
    utility,
)
from src.solver import optimal_solution

logger = logging.getLogger(__name__)


class KTooLargeForExhaustive(ValueError):
    pass


# ---------------------------------------------------------------------------
# Data classes
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PreferenceReport:
    approvals: tuple[bool, ...]


@dataclass(frozen=True)
class PositionReport:
    position: Fraction


@dataclass(frozen=True)
class JointReport:
    position: Fraction
    approvals: tuple[bool, ...]


Misreport = PreferenceReport | PositionReport | JointReport


@dataclass(frozen=True)
class Deviation:
    """A strictly profitable unilateral misreport."""

    agent_index: int
    kind: Misreport
    truthful_utility: Fraction
    deviant_utility: Fraction

    @property
    def gain(self) -> Fraction:
        return self.deviant_utility - self.truthful_utility


@dataclass
class AuditReport:
    instance_id: str
    mechanism: str
    deviations: list[Deviation] = field(default_factory=list)
    deviations_checked: int = 0
    exhaustive_preferences: bool = False
    # False for position and joint searches (continuous space)
    exhaustive: bool = True
    # Whether every misreport produced the truthful outcome (position audits)
    outcome_invariant: bool | None = None
    budget: int | None = None
    truncated: bool = False

    @property
    def found(self) -> bool:
        return bool(self.deviations)


class RatioMarker(str, Enum):
    ONE = "one"            # OPT = MECH = 0
    INFINITE = "infinite"  # OPT > 0, MECH = 0


@dataclass(frozen=True)
class RatioReport:
    instance_id: str
    mechanism: str
    opt: Fraction
    mech: Fraction
    ratio: Fraction | RatioMarker

    @property
    def value(self) -> Fraction | None:
        """The ratio as a number (ONE reads as 1); None when infinite."""
        if self.ratio is RatioMarker.ONE:
            return Fraction(1)
        if self.ratio is RatioMarker.INFINITE:
            return None
        return self.ratio

    def within(self, bound: Fraction) -> bool:
        value = self.value
        return value is not None and value <= bound


# ---------------------------------------------------------------------------
# Helpers
# ---------------------------------------------------------------------------


def approval_vectors(k: int) -> Iterator[tuple[bool, ...]]:
    return itertools.product((False, True), repeat=k)


def _kind_key(kind: Misreport) -> tuple:
    if isinstance(kind, PreferenceReport):
        return (0, Fraction(0), kind.approvals)
    if isinstance(kind, PositionReport):
        return (1, kind.position, ())
    return (2, kind.position, kind.approvals)


def _sorted(deviations: Iterable[Deviation]) -> list[Deviation]:
    return sorted(deviations, key=lambda d: (d.agent_index, _kind_key(d.kind)))


def deviation_positions(inst: Instance, agent_index: int, grid_denominator: int) -> list[Fraction]:
    """
    Positions tried for one agent: candidates, the other agents' positions,
    the t/D grid, and midpoints of consecutive candidates; the true position
    is left out.
    """
    if grid_denominator < 1:
        raise ValueError(f"grid denominator must be >= 1, got {grid_denominator}")
    points = set(inst.candidates)
    points.update(a.position for j, a in enumerate(inst.agents) if j != agent_index)
    points.update(Fraction(t, grid_denominator) for t in range(grid_denominator + 1))
    points.update((a + b) / 2 for a, b in zip(inst.candidates, inst.candidates[1:]))
    points.discard(inst.agents[agent_index].position)
    return sorted(points)


def _log_report(report: AuditReport) -> None:
    if report.found:
        logger.warning(
            "Audit %s on %s: %d profitable deviation(s) out of %d checked",
            report.mechanism, report.instance_id or "<instance>",
            len(report.deviations), report.deviations_checked,
        )
    else:
        logger.debug(
            "Audit %s on %s: clean (%d checked)",
            report.mechanism, report.instance_id, report.deviations_checked,
        )


# ---------------------------------------------------------------------------
# Audits
# ---------------------------------------------------------------------------


def audit_preferences(
    mechanism: Mechanism, inst: Instance, instance_id: str = ""
) -> AuditReport:
    """Try all 2^k - 1 alternative approval reports for every agent."""
    if inst.k > settings.EXHAUSTIVE_K_LIMIT:
        raise KTooLargeForExhaustive(
            f"k={inst.k} exceeds the exhaustive limit {settings.EXHAUSTIVE_K_LIMIT}"
        )
    truthful = mechanism.outcome(inst)
    deviations: list[Deviation] = []
    checked = 0
    for i, agent in enumerate(inst.agents):
        honest = expected_utility(inst, i, truthful)
        for report in approval_vectors(inst.k):
            if report == agent.approvals:
                continue
            deviant = mechanism.outcome(inst.with_agent(i, Agent(agent.position, report)))
            checked += 1
            gained = expected_utility(inst, i, deviant)
            if gained > honest:
                deviations.append(Deviation(i, PreferenceReport(report), honest, gained))

    report = AuditReport(
        instance_id=instance_id,
        mechanism=mechanism.name,
        deviations=_sorted(deviations),
        deviations_checked=checked,
        exhaustive_preferences=True,
    )
    _log_report(report)
    return report


def audit_positions(
    mechanism: Mechanism,
    inst: Instance,
    grid_denominator: int,
    instance_id: str = "",
    positions: Iterable[Fraction] | None = None,
) -> AuditReport:
    """
    Misreport positions from a structured set (see deviation_positions), or
    from ``positions`` when given. Also records whether every misreport left
    the outcome distribution unchanged.
    """
    truthful = mechanism.outcome(inst)
    deviations: list[Deviation] = []
    checked = 0
    invariant = True
    fixed = None if positions is None else sorted(set(positions))
    for i, agent in enumerate(inst.agents):
        honest = expected_utility(inst, i, truthful)
        if fixed is None:
            tried = deviation_positions(inst, i, grid_denominator)
        else:
            tried = [x for x in fixed if x != agent.position]
        for position in tried:
            deviant = mechanism.outcome(inst.with_agent(i, Agent(position, agent.approvals)))
            checked += 1
            if deviant != truthful:
                invariant = False
            gained = expected_utility(inst, i, deviant)
            if gained > honest:
                deviations.append(Deviation(i, PositionReport(position), honest, gained))

    report = AuditReport(
        instance_id=instance_id,
        mechanism=mechanism.name,
        deviations=_sorted(deviations),
        deviations_checked=checked,
        exhaustive=False,
        outcome_invariant=invariant,
    )
    _log_report(report)
    return report


def audit_joint(
    mechanism: Mechanism,
    inst: Instance,
    grid_denominator: int,
    budget: int,
    instance_id: str = "",
) -> AuditReport:
    """Position x approval misreports, at most ``budget`` per agent."""
    if inst.k > settings.EXHAUSTIVE_K_LIMIT:
        raise KTooLargeForExhaustive(
            f"k={inst.k} exceeds the exhaustive limit {settings.EXHAUSTIVE_K_LIMIT}"
        )
    if budget < 1:
        raise ValueError(f"joint deviation budget must be positive, got {budget}")
    truthful = mechanism.outcome(inst)
    deviations: list[Deviation] = []
    checked = 0
    truncated = False
    for i, agent in enumerate(inst.agents):
        honest = expected_utility(inst, i, truthful)
        positions = [agent.position, *deviation_positions(inst, i, grid_denominator)]
        pairs = (
            (x, report)
            for x in positions
            for report in approval_vectors(inst.k)
            if (x, report) != (agent.position, agent.approvals)
        )
        for tried, (position, report) in enumerate(pairs):
            if tried == budget:
                truncated = True
                break
            deviant = mechanism.outcome(inst.with_agent(i, Agent(position, report)))
            checked += 1
            gained = expected_utility(inst, i, deviant)
            if gained > honest:
                deviations.append(Deviation(i, JointReport(position, report), honest, gained))

    report = AuditReport(
        instance_id=instance_id,
        mechanism=mechanism.name,
        deviations=_sorted(deviations),
        deviations_checked=checked,
        exhaustive=False,
        budget=budget,
        truncated=truncated,
    )
    _log_report(report)
    return report


def ratio_of(opt: Fraction, mech: Fraction) -> Fraction | RatioMarker:
    if mech > 0:
        return opt / mech
    if opt == 0:
        return RatioMarker.ONE
    return RatioMarker.INFINITE


def empirical_ratio(
    mechanism: Mechanism, inst: Instance, instance_id: str = ""
) -> RatioReport:
    opt = optimal_solution(inst).opt_welfare
    mech = expected_social_welfare(inst, mechanism.outcome(inst))
    return RatioReport(
        instance_id=instance_id,
        mechanism=mechanism.name,
        opt=opt,
        mech=mech,
        ratio=ratio_of(opt, mech),
    )


def check_case_guarantees(inst: Instance, lottery: Lottery | None = None) -> list[str]:
    """
    Per-agent guarantees of the general mechanism: in the middle-location
    case every approver of the chosen facility gets at least 1/k; in the
    straddle case every approver of the most-approved facility gets at least
    1/k in expectation. Returns human-readable violations (empty when clean).
    """
    case = classify_general(inst)
    if case.tag not in (GeneralCaseTag.MIDDLE_LOCATION, GeneralCaseTag.STRADDLE):
        return []
    lottery = lottery or mech_general(inst)
    top, _, _ = most_approved_facility(inst)
    floor = Fraction(1, inst.k)
    violations = []
    for i in inst.approvers(top):
        if case.tag is GeneralCaseTag.MIDDLE_LOCATION:
            got = utility(inst, i, Solution(top, case.middle))
        else:
            got = expected_utility(inst, i, lottery)
        if got < floor:
            violations.append(f"{case.tag.value}: agent {i} gets {got} < {floor}")
    return violations


def _counted_approvals(inst: Instance) -> list[int]:
    counted = [agent for agent in inst.agents if agent.approves_any]
    return [sum(1 for agent in counted if agent.approvals[j]) for j in range(inst.k)]


def is_tie_break_deviation(inst: Instance, deviation: Deviation) -> bool:
    """
    True when a preference misreport works through the general mechanism's
    choice of most-approved facility: the truthful counts tie at the top, or
    the report changes which facility is most approved.

    Position-only misreports never qualify.
    """
    if isinstance(deviation.kind, PositionReport):
        return False
    counts = _counted_approvals(inst)
    if counts.count(max(counts)) > 1:
        return True
    agent = inst.agents[deviation.agent_index]
    deviant = inst.with_agent(
        deviation.agent_index, Agent(agent.position, deviation.kind.approvals)
    )
    return most_approved_facility(deviant)[0] != most_approved_facility(inst)[0]

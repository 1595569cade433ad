"""
sweep.py: run mechanisms, audits and ratio checks over an instance family.

Each instance is evaluated independently (optionally on a thread pool); the
per-instance results come back in index order and are folded into one
SweepReport, so the report does not depend on the worker count.
"""

from __future__ import annotations

import logging
from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Iterable

from src.audit import (
    RatioMarker,
    RatioReport,
    audit_positions,
    audit_preferences,
    check_case_guarantees,
    empirical_ratio,
    is_tie_break_deviation,
)
from src.mechanisms import (
    GeneralMechanism,
    Mechanism,
    ThetaMechanism,
    classify_general,
    classify_theta,
    theta_ratio_bound,
)
from src.model import Instance, InvalidLottery

logger = logging.getLogger(__name__)


# ---------------------------------------------------------------------------
# Data classes
# ---------------------------------------------------------------------------


@dataclass
class MechanismSummary:
    mechanism: str
    bound_asserted: str
    count: int = 0
    max_ratio: Fraction | RatioMarker | None = None
    argmax_index: int | None = None
    argmax_instance: Instance | None = None
    deviations_found: int = 0
    position_deviations_found: int = 0
    position_outcome_changes: int = 0
    bound_satisfied: bool = True
    bound_violations: list[int] = field(default_factory=list)
    # ratio above k on profiles with overlapping approvals (general only)
    multi_approval_findings: list[int] = field(default_factory=list)
    # profitable misreports through the most-approved tie-break (general only)
    tie_break_deviations: int = 0
    tie_break_findings: list[int] = field(default_factory=list)


@dataclass
class SweepReport:
    spec: dict[str, Any]
    instances: int = 0
    general_cases: dict[str, int] = field(default_factory=dict)
    theta_cases: dict[str, int] = field(default_factory=dict)
    lottery_violations: list[str] = field(default_factory=list)
    guarantee_violations: list[str] = field(default_factory=list)
    mechanisms: list[MechanismSummary] = field(default_factory=list)
    ok: bool = True


@dataclass
class _MechanismOutcome:
    ratio: RatioReport | None
    bound: Fraction | None
    deviations: int = 0
    tie_break_deviations: int = 0
    position_deviations: int = 0
    position_outcome_changed: bool = False
    lottery_error: str | None = None


@dataclass
class _InstanceOutcome:
    index: int
    general_case: str
    theta_case: str
    single_approval: bool
    guarantee_violations: list[str]
    per_mechanism: list[_MechanismOutcome]


# ---------------------------------------------------------------------------
# Bounds
# ---------------------------------------------------------------------------


def bound_label(mechanism: Mechanism) -> str:
    if isinstance(mechanism, GeneralMechanism):
        return "k"
    if isinstance(mechanism, ThetaMechanism):
        return str(theta_ratio_bound(mechanism.theta)) if mechanism.theta > 0 else "none"
    if mechanism.name == "minisum":
        return "2 for k=2, k otherwise"
    if mechanism.name == "opt":
        return "1"
    return "none"


def ratio_bound(mechanism: Mechanism, inst: Instance) -> Fraction | None:
    """Per-instance approximation bound asserted for ``mechanism``, or None."""
    if isinstance(mechanism, GeneralMechanism):
        return Fraction(inst.k)
    if isinstance(mechanism, ThetaMechanism):
        return theta_ratio_bound(mechanism.theta) if mechanism.theta > 0 else None
    if mechanism.name == "minisum":
        return Fraction(2) if inst.k == 2 else Fraction(inst.k)
    if mechanism.name == "opt":
        return Fraction(1)
    return None


def _ratio_key(ratio: Fraction | RatioMarker) -> tuple[int, Fraction]:
    if ratio is RatioMarker.INFINITE:
        return (1, Fraction(0))
    if ratio is RatioMarker.ONE:
        return (0, Fraction(1))
    return (0, ratio)


# ---------------------------------------------------------------------------
# Per-instance evaluation
# ---------------------------------------------------------------------------


def _evaluate(
    index: int,
    inst: Instance,
    mechanisms: list[Mechanism],
    theta: Fraction,
    audit: bool,
    position_denominator: int | None,
) -> _InstanceOutcome:
    instance_id = f"#{index}"
    outcomes = []
    for mechanism in mechanisms:
        try:
            ratio = empirical_ratio(mechanism, inst, instance_id)
        except InvalidLottery as e:
            outcomes.append(_MechanismOutcome(ratio=None, bound=None, lottery_error=str(e)))
            continue
        result = _MechanismOutcome(ratio=ratio, bound=ratio_bound(mechanism, inst))
        if audit:
            found = audit_preferences(mechanism, inst, instance_id).deviations
            if isinstance(mechanism, GeneralMechanism):
                ties = sum(1 for d in found if is_tie_break_deviation(inst, d))
            else:
                ties = 0
            result.tie_break_deviations = ties
            result.deviations = len(found) - ties
        if position_denominator and mechanism.position_independent:
            report = audit_positions(mechanism, inst, position_denominator, instance_id)
            result.position_deviations = len(report.deviations)
            result.position_outcome_changed = not report.outcome_invariant
        outcomes.append(result)

    guarantees = []
    if any(isinstance(m, GeneralMechanism) for m in mechanisms):
        guarantees = [f"{instance_id} {v}" for v in check_case_guarantees(inst)]

    return _InstanceOutcome(
        index=index,
        general_case=classify_general(inst).tag.value,
        theta_case=classify_theta(inst, theta).tag.value,
        single_approval=all(sum(a.approvals) <= 1 for a in inst.agents),
        guarantee_violations=guarantees,
        per_mechanism=outcomes,
    )


# ---------------------------------------------------------------------------
# Sweep
# ---------------------------------------------------------------------------


def run_sweep(
    instances: Iterable[Instance],
    mechanisms: list[Mechanism],
    spec: dict[str, Any],
    theta: Fraction,
    audit: bool = True,
    position_denominator: int | None = None,
    workers: int = 1,
) -> SweepReport:
    """
    Evaluate every mechanism on every instance and fold the results.

    Parameters
    ----------
    spec:
        Echoed verbatim into the report.
    theta:
        θ used for the case-coverage counters.
    audit:
        Run exhaustive preference audits for every mechanism.
    position_denominator:
        When set, also run position audits of every position-independent
        mechanism on the 1/position_denominator grid.
    workers:
        Thread count; results are merged in instance order regardless.
    """
    logger.info(
        "Sweep start: mechanisms=%s audit=%s positions=%s workers=%d",
        [m.name for m in mechanisms], audit, position_denominator, workers,
    )

    def task(item: tuple[int, Instance]) -> tuple[Instance, _InstanceOutcome]:
        index, inst = item
        return inst, _evaluate(index, inst, mechanisms, theta, audit, position_denominator)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(task, enumerate(instances)))
    else:
        results = [task(item) for item in enumerate(instances)]

    summaries = [MechanismSummary(m.name, bound_label(m)) for m in mechanisms]
    general_cases: Counter[str] = Counter()
    theta_cases: Counter[str] = Counter()
    report = SweepReport(spec=spec, mechanisms=summaries)

    for inst, outcome in results:
        report.instances += 1
        general_cases[outcome.general_case] += 1
        theta_cases[outcome.theta_case] += 1
        report.guarantee_violations.extend(outcome.guarantee_violations)

        for summary, mech_outcome in zip(summaries, outcome.per_mechanism):
            if mech_outcome.lottery_error is not None:
                report.lottery_violations.append(
                    f"#{outcome.index} {summary.mechanism}: {mech_outcome.lottery_error}"
                )
                continue
            ratio = mech_outcome.ratio.ratio
            summary.count += 1
            summary.deviations_found += mech_outcome.deviations
            if mech_outcome.tie_break_deviations:
                summary.tie_break_deviations += mech_outcome.tie_break_deviations
                summary.tie_break_findings.append(outcome.index)
                logger.warning(
                    "Instance #%d: %d %s deviation(s) through the most-approved tie-break",
                    outcome.index, mech_outcome.tie_break_deviations, summary.mechanism,
                )
            summary.position_deviations_found += mech_outcome.position_deviations
            summary.position_outcome_changes += int(mech_outcome.position_outcome_changed)
            if summary.max_ratio is None or _ratio_key(ratio) > _ratio_key(summary.max_ratio):
                summary.max_ratio = ratio
                summary.argmax_index = outcome.index
                summary.argmax_instance = inst

            bound = mech_outcome.bound
            if bound is None or mech_outcome.ratio.within(bound):
                continue
            if summary.mechanism == "general" and not outcome.single_approval:
                summary.multi_approval_findings.append(outcome.index)
                logger.warning(
                    "Instance #%d: general ratio %s above k on overlapping approvals",
                    outcome.index, ratio,
                )
            else:
                summary.bound_satisfied = False
                summary.bound_violations.append(outcome.index)
                logger.warning(
                    "Instance #%d: %s ratio %s exceeds bound %s",
                    outcome.index, summary.mechanism, ratio, bound,
                )

    report.general_cases = dict(sorted(general_cases.items()))
    report.theta_cases = dict(sorted(theta_cases.items()))
    report.ok = not (
        report.lottery_violations
        or report.guarantee_violations
        or any(
            s.deviations_found
            or s.position_deviations_found
            or s.position_outcome_changes
            or s.bound_violations
            for s in summaries
        )
    )
    logger.info("Sweep done: %d instances, ok=%s", report.instances, report.ok)
    return report

from fractions import Fraction

from .base import Mechanism
from .baselines import OptimalBaseline
from .general import (
    GeneralCase,
    GeneralCaseTag,
    GeneralMechanism,
    classify_general,
    mech_general,
    most_approved_facility,
)
from .minisum import MinisumMechanism, mech_minisum
from .theta import (
    THETA_DEFAULT,
    ThetaCase,
    ThetaCaseTag,
    ThetaMechanism,
    ThetaOutOfRange,
    balanced_theta,
    classify_theta,
    mech_theta,
    theta_default,
    theta_ratio_bound,
)

MECHANISM_NAMES = ("general", "theta", "minisum", "opt")


def get_mechanism(name: str, theta: Fraction | None = None) -> Mechanism:
    """Instantiate a mechanism by its CLI name."""
    if name == "general":
        return GeneralMechanism()
    if name == "theta":
        return ThetaMechanism(THETA_DEFAULT if theta is None else theta)
    if name == "minisum":
        return MinisumMechanism()
    if name == "opt":
        return OptimalBaseline()
    raise ValueError(f"unknown mechanism: {name}")


__all__ = [
    "GeneralCase",
    "GeneralCaseTag",
    "GeneralMechanism",
    "MECHANISM_NAMES",
    "Mechanism",
    "MinisumMechanism",
    "OptimalBaseline",
    "THETA_DEFAULT",
    "ThetaCase",
    "ThetaCaseTag",
    "ThetaMechanism",
    "ThetaOutOfRange",
    "balanced_theta",
    "classify_general",
    "classify_theta",
    "get_mechanism",
    "mech_general",
    "mech_minisum",
    "mech_theta",
    "most_approved_facility",
    "theta_default",
    "theta_ratio_bound",
]

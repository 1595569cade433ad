"""
src/generators.py -- Instance families.

  gen_random              seeded pseudorandom instances on a rational grid
  gen_grid_family         every small instance on a grid (exhaustive checks)
  gen_deterministic_gap   two agents at eps, C = {1}; unbounded ratio for
                          deterministic mechanisms
  gen_randomized_gap      k agents at eps, one facility each; ratio -> k for
                          randomized mechanisms (variant "J" moves agent 1 to 1)
  gen_flip_sequence       C = {0, 1} with agents near 1/2 flipping preferences
                          one at a time; 3/2 deterministic gap
"""

import itertools
import logging
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Iterator

import numpy as np

from src.model import HALF, Agent, Instance, as_rational, validate_instance

logger = logging.getLogger(__name__)


class EpsOutOfRange(ValueError):
    pass


class StepOutOfRange(ValueError):
    pass


class EmptyRange(ValueError):
    pass


class ApprovalModel(str, Enum):
    SINGLE = "single"              # exactly one approved facility
    NONEMPTY = "nonempty"          # any nonempty subset, uniformly
    UNRESTRICTED = "unrestricted"  # any subset, the empty one included


@dataclass(frozen=True)
class RandomSpec:
    """
    Parameters of a random instance stream. Ranges are inclusive.

    Instance ``i`` is drawn from ``numpy.random.default_rng([seed, i])``, so the
    stream is reproducible and can be generated by index in any order.
    """

    seed: int = 0
    n_range: tuple[int, int] = (1, 6)
    k_range: tuple[int, int] = (2, 3)
    denominator: int = 12
    c_range: tuple[int, int] = (1, 3)
    approval_model: ApprovalModel = ApprovalModel.NONEMPTY

    def __post_init__(self):
        object.__setattr__(self, "approval_model", ApprovalModel(self.approval_model))
        if self.seed < 0:
            raise ValueError(f"seed must be non-negative, got {self.seed}")
        if self.denominator < 1:
            raise EmptyRange(f"grid denominator must be >= 1, got {self.denominator}")
        for label, (lo, hi), floor in (
            ("n", self.n_range, 1),
            ("k", self.k_range, 2),
            ("|C|", self.c_range, 1),
        ):
            if lo > hi or lo < floor:
                raise EmptyRange(f"{label} range {lo}..{hi} is empty or below {floor}")


def _draw_approvals(rng: np.random.Generator, k: int, model: ApprovalModel) -> tuple[bool, ...]:
    if model is ApprovalModel.SINGLE:
        chosen = int(rng.integers(0, k))
        return tuple(j == chosen for j in range(k))
    low = 1 if model is ApprovalModel.NONEMPTY else 0
    mask = int(rng.integers(low, 2**k))
    return tuple(bool(mask >> j & 1) for j in range(k))


def random_instance(spec: RandomSpec, index: int) -> Instance:
    """The ``index``-th instance of the stream described by ``spec``."""
    rng = np.random.default_rng([spec.seed, index])
    d = spec.denominator
    k = int(rng.integers(spec.k_range[0], spec.k_range[1] + 1))
    n = int(rng.integers(spec.n_range[0], spec.n_range[1] + 1))
    # the grid only has d + 1 distinct points
    size = min(int(rng.integers(spec.c_range[0], spec.c_range[1] + 1)), d + 1)

    ticks = rng.choice(d + 1, size=size, replace=False)
    candidates = tuple(Fraction(int(t), d) for t in ticks)
    agents = tuple(
        Agent(Fraction(int(rng.integers(0, d + 1)), d), _draw_approvals(rng, k, spec.approval_model))
        for _ in range(n)
    )
    inst = Instance(k=k, agents=agents, candidates=candidates)
    validate_instance(inst)
    return inst


def gen_random(spec: RandomSpec, count: int, start: int = 0) -> Iterator[Instance]:
    if count < 0:
        raise ValueError(f"count must be non-negative, got {count}")
    for index in range(start, start + count):
        yield random_instance(spec, index)


def gen_grid_family(
    n_max: int = 3,
    k: int = 2,
    denominator: int = 4,
    c_max: int = 2,
    nonempty: bool = True,
) -> Iterator[Instance]:
    """
    Every instance with at most ``n_max`` agents and ``c_max`` candidates on the
    1/denominator grid.

    Agents are enumerated as multisets: every mechanism here is anonymous, so
    reordering agents never changes an outcome or a ratio.
    """
    if n_max < 1 or c_max < 1 or denominator < 1:
        raise EmptyRange(
            f"grid family needs n_max, c_max, denominator >= 1, got {n_max}, {c_max}, {denominator}"
        )
    grid = [Fraction(t, denominator) for t in range(denominator + 1)]
    vectors = [v for v in itertools.product((False, True), repeat=k) if any(v) or not nonempty]
    types = [Agent(x, v) for x in grid for v in vectors]

    for size in range(1, min(c_max, len(grid)) + 1):
        for candidates in itertools.combinations(grid, size):
            for n in range(1, n_max + 1):
                for agents in itertools.combinations_with_replacement(types, n):
                    yield Instance(k=k, agents=agents, candidates=candidates)


# ---------------------------------------------------------------------------
# Lower-bound families
# ---------------------------------------------------------------------------


def _only(k: int, facility: int) -> tuple[bool, ...]:
    return tuple(j == facility for j in range(1, k + 1))


def _all_but(k: int, facility: int) -> tuple[bool, ...]:
    return tuple(j != facility for j in range(1, k + 1))


def _check_eps(eps: Fraction, upper: Fraction) -> Fraction:
    eps = as_rational(eps)
    if not 0 < eps < upper:
        raise EpsOutOfRange(f"eps must lie in (0, {upper}), got {eps}")
    return eps


def gen_deterministic_gap(k: int, eps: Fraction, step: int = 0) -> Instance:
    """
    Two agents at eps approving F1 only and F2 only, C = {1}.

    ``step=1`` moves the F2 agent to 1: SW(F2 at 1) = 1 while SW(F1 at 1) = eps.
    """
    eps = _check_eps(eps, Fraction(1))
    if step not in (0, 1):
        raise StepOutOfRange(f"deterministic-gap step must be 0 or 1, got {step}")
    second = Fraction(1) if step == 1 else eps
    return Instance.build(k, [(eps, _only(k, 1)), (second, _only(k, 2))], [1])


def gen_randomized_gap(k: int, eps: Fraction, variant: str = "I") -> Instance:
    """k agents at eps, agent i approving F_i only, C = {1}; "J" moves agent 1 to 1."""
    eps = _check_eps(eps, Fraction(1))
    if variant not in ("I", "J"):
        raise ValueError(f"variant must be 'I' or 'J', got {variant!r}")
    agents = [(eps, _only(k, i)) for i in range(1, k + 1)]
    if variant == "J":
        agents[0] = (Fraction(1), _only(k, 1))
    return Instance.build(k, agents, [1])


def gen_flip_sequence(k: int, eps: Fraction, step: int = 0) -> Instance:
    """
    C = {0, 1}; one agent at 0 approving F1 only, two at 1/2-eps and two at
    1/2+eps approving everything, one at 1 approving F2 only. At step s the
    first s agents at 1/2-eps stop approving F2.
    """
    eps = _check_eps(eps, HALF)
    if step not in (0, 1, 2):
        raise StepOutOfRange(f"flip-sequence step must be 0, 1 or 2, got {step}")
    everything = (True,) * k
    left = [_all_but(k, 2) if i < step else everything for i in range(2)]
    agents = [
        (Fraction(0), _only(k, 1)),
        (HALF - eps, left[0]),
        (HALF - eps, left[1]),
        (HALF + eps, everything),
        (HALF + eps, everything),
        (Fraction(1), _only(k, 2)),
    ]
    return Instance.build(k, agents, [0, 1])


def flip_sequence_lottery_welfare(p_prime: Fraction) -> Fraction:
    """
    Best expected welfare on the final flip instance of a lottery keeping mass
    ``p_prime`` at location 1: 3(1 - p') + 2p'.
    """
    p_prime = as_rational(p_prime)
    if not 0 <= p_prime <= 1:
        raise ValueError(f"probability must lie in [0, 1], got {p_prime}")
    return 3 * (1 - p_prime) + 2 * p_prime

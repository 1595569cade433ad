from fractions import Fraction

import pytest

from src.generators import gen_flip_sequence, gen_randomized_gap
from src.model import Instance

EPS = Fraction(1, 100)


@pytest.fixture
def flip_instance():
    """C = {0, 1}, six agents, eps = 1/100 (welfare 3 at (1,0) and (2,1))."""
    return gen_flip_sequence(2, EPS, 0)


@pytest.fixture
def randomized_gap_i():
    return gen_randomized_gap(3, Fraction(1, 1000), "I")


@pytest.fixture
def randomized_gap_j():
    return gen_randomized_gap(3, Fraction(1, 1000), "J")


@pytest.fixture
def tied_one_sided():
    """k = 3, every candidate right of 2/3; F2 and F3 tie for most approved."""
    agents = [
        (Fraction(11, 12), [0, 0, 1]),
        (Fraction(11, 12), [1, 0, 0]),
        (1, [0, 0, 1]),
        (Fraction(3, 4), [0, 1, 0]),
        (Fraction(2, 3), [0, 1, 0]),
    ]
    return Instance.build(3, agents, ["3/4", "11/12", "1"])

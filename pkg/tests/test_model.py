"""Tests for the instance model and exact welfare arithmetic."""

from fractions import Fraction

import pytest

from src.model import (
    Agent,
    ApprovalLengthMismatch,
    CandidateOutOfRange,
    DuplicateCandidate,
    EmptyCandidates,
    InfeasibleSolution,
    Instance,
    InstanceError,
    InvalidLottery,
    KTooSmall,
    Lottery,
    PositionOutOfRange,
    Solution,
    approval_counts,
    parse_rational,
    expected_social_welfare,
    expected_utility,
    social_welfare,
    utility,
)

F = Fraction


# ---------------------------------------------------------------------------
# validate_instance
# ---------------------------------------------------------------------------


class TestValidation:
    def test_minimal_instance_is_valid(self):
        inst = Instance.build(2, [(0, [1, 0])], [0, 1])
        assert inst.n == 1
        assert inst.L == 0 and inst.R == 1

    def test_position_out_of_range(self):
        with pytest.raises(PositionOutOfRange):
            Instance.build(2, [(F(3, 2), [1, 0])], [F(1, 2)])

    def test_k_too_small(self):
        with pytest.raises(KTooSmall):
            Instance.build(1, [(0, [1])], [F(1, 2)])

    def test_k_is_checked_before_candidates(self):
        with pytest.raises(KTooSmall):
            Instance.build(1, [(0, [1])], [])

    def test_empty_candidates(self):
        with pytest.raises(EmptyCandidates):
            Instance.build(2, [(0, [1, 0])], [])

    def test_candidate_out_of_range(self):
        with pytest.raises(CandidateOutOfRange):
            Instance.build(2, [(0, [1, 0])], ["-1/4"])

    def test_duplicate_candidate(self):
        with pytest.raises(DuplicateCandidate):
            Instance.build(2, [(0, [1, 0])], ["1/3", "1/3"])

    def test_approval_length_mismatch(self):
        with pytest.raises(ApprovalLengthMismatch):
            Instance.build(3, [(0, [1, 0])], [1])

    def test_first_violated_agent_is_reported(self):
        with pytest.raises(PositionOutOfRange, match="agent 0"):
            Instance.build(2, [(2, [1]), (0, [1, 0])], [1])

    def test_errors_are_value_errors(self):
        assert issubclass(PositionOutOfRange, InstanceError)
        assert issubclass(InstanceError, ValueError)

    def test_floats_are_refused(self):
        with pytest.raises(TypeError):
            Agent(0.5, (True, False))

    def test_rational_text(self):
        assert parse_rational(" 43/100 ") == F(43, 100)
        assert parse_rational("1.5E1") == 15
        assert Agent("1e-64", (True,)).position == F(1, 10**64)
        with pytest.raises(ValueError, match="exponent"):
            parse_rational("1e-65")

    def test_candidates_are_sorted(self):
        inst = Instance.build(2, [(0, [1, 0])], ["9/10", "1/5"])
        assert inst.candidates == (F(1, 5), F(9, 10))


# ---------------------------------------------------------------------------
# Utilities and welfare
# ---------------------------------------------------------------------------


class TestUtility:
    def test_distance_one_gives_zero(self):
        inst = Instance.build(2, [(0, [1, 0])], [0, 1])
        assert utility(inst, 0, Solution(1, 1)) == 0

    def test_near_half_agent_approving_all(self, flip_instance):
        # agent 1 sits at 1/2 - 1/100
        assert utility(flip_instance, 1, Solution(1, 0)) == F(1, 2) + F(1, 100)

    def test_unapproved_facility(self):
        inst = Instance.build(2, [(F(3, 5), [0, 1])], [0])
        assert utility(inst, 0, Solution(1, 0)) == 0

    def test_index_out_of_range(self):
        inst = Instance.build(2, [(0, [1, 0])], [0])
        with pytest.raises(IndexError):
            utility(inst, 1, Solution(1, 0))

    def test_infeasible_location(self):
        inst = Instance.build(2, [(0, [1, 0])], [0])
        with pytest.raises(InfeasibleSolution):
            utility(inst, 0, Solution(1, F(1, 2)))

    def test_infeasible_facility(self):
        inst = Instance.build(2, [(0, [1, 0])], [0])
        with pytest.raises(InfeasibleSolution):
            social_welfare(inst, Solution(3, 0))


class TestExpectedUtility:
    def test_uniform_over_far_location(self):
        inst = Instance.build(2, [(0, [1, 0])], [1])
        lot = Lottery.uniform([Solution(1, 1), Solution(2, 1)])
        assert expected_utility(inst, 0, lot) == 0

    def test_point_mass_at_eps(self, randomized_gap_i):
        lot = Lottery.point(Solution(1, 1))
        assert expected_utility(randomized_gap_i, 0, lot) == F(1, 1000)

    def test_straddle_lottery(self):
        inst = Instance.build(2, [(0, [1, 0])], ["1/5", "9/10"])
        lot = Lottery(((Solution(1, F(1, 5)), F(4, 7)), (Solution(1, F(9, 10)), F(3, 7))))
        assert expected_utility(inst, 0, lot) == F(1, 2)


class TestSocialWelfare:
    def test_flip_instance_epsilon_terms_cancel(self, flip_instance):
        assert social_welfare(flip_instance, Solution(1, 0)) == 3
        assert social_welfare(flip_instance, Solution(1, 1)) == 2

    def test_empty_approvals_give_zero(self):
        inst = Instance.build(2, [(0, [0, 0]), (1, [0, 0])], [0, 1])
        assert social_welfare(inst, Solution(2, 1)) == 0

    def test_point_mass_matches_deterministic(self, flip_instance):
        sol = Solution(2, 1)
        assert expected_social_welfare(flip_instance, Lottery.point(sol)) == social_welfare(flip_instance, sol)

    def test_uniform_on_randomized_gap_j(self, randomized_gap_j):
        lot = Lottery.uniform([Solution(j, 1) for j in (1, 2, 3)])
        assert expected_social_welfare(randomized_gap_j, lot) == F(1, 3) + F(2, 3000)

    def test_half_half_on_flip_instance(self, flip_instance):
        lot = Lottery(((Solution(1, 0), F(1, 2)), (Solution(2, 1), F(1, 2))))
        assert expected_social_welfare(flip_instance, lot) == 3


class TestApprovalCounts:
    def test_one_each(self, randomized_gap_i):
        assert approval_counts(randomized_gap_i) == (1, 1, 1)

    def test_flip_instance(self, flip_instance):
        assert approval_counts(flip_instance) == (5, 5)

    def test_all_zero(self):
        inst = Instance.build(2, [(0, [0, 0])] * 3, [0])
        assert approval_counts(inst) == (0, 0)


# ---------------------------------------------------------------------------
# Lottery
# ---------------------------------------------------------------------------


class TestLottery:
    def test_must_sum_to_one(self):
        with pytest.raises(InvalidLottery):
            Lottery(((Solution(1, 0), F(1, 3)), (Solution(2, 0), F(1, 3))))

    def test_negative_probability(self):
        with pytest.raises(InvalidLottery):
            Lottery(((Solution(1, 0), F(3, 2)), (Solution(2, 0), F(-1, 2))))

    def test_repeated_solution(self):
        with pytest.raises(InvalidLottery):
            Lottery(((Solution(1, 0), F(1, 2)), (Solution(1, 0), F(1, 2))))

    def test_empty(self):
        with pytest.raises(InvalidLottery):
            Lottery(())

    def test_order_does_not_matter(self):
        a = Lottery(((Solution(2, 0), F(1, 4)), (Solution(1, 1), F(3, 4))))
        b = Lottery(((Solution(1, 1), F(3, 4)), (Solution(2, 0), F(1, 4))))
        assert a == b
        assert a.atoms[0][0] == Solution(1, 1)

    def test_point_is_deterministic(self):
        lot = Lottery.point(Solution(1, 0))
        assert lot.is_deterministic
        assert lot.probability(Solution(1, 0)) == 1
        assert lot.probability(Solution(2, 0)) == 0


class TestInstanceHelpers:
    def test_with_agent_leaves_original_untouched(self, flip_instance):
        changed = flip_instance.with_agent(0, Agent(1, (False, True)))
        assert changed.agents[0].position == 1
        assert flip_instance.agents[0].position == 0

    def test_closest_to_half_ties_left(self):
        inst = Instance.build(2, [(0, [1, 0])], ["1/4", "3/4"])
        assert inst.closest_to_half() == F(1, 4)

    def test_approvers(self, flip_instance):
        assert flip_instance.approvers(1) == [0, 1, 2, 3, 4]
        assert flip_instance.approvers(2) == [1, 2, 3, 4, 5]

"""Oracle tests: exact optima, pruning soundness, estimates, property checks."""

from fractions import Fraction as F

import pytest

from qlab.core import (
    Coeffs,
    ExplicitNet,
    LatticeNet,
    NetFamily,
    SearchBudgetExceeded,
    lattice_family,
)
from qlab.norms import (
    C0Space,
    HaarCantorSpace,
    MultiSignSummingSpace,
    SchauderSpace,
    SummingSpace,
    TreeSpace,
)
from qlab.oracle import (
    SectionProblem,
    best_quantization,
    check_property_p,
    eps_ball_estimate,
    eps_space_estimate,
    haar_witness_distance,
    quasi_greedy_constants,
)
from qlab.quantize import quantize_summing
from qlab.sampling import random_coeffs, seeded

UNIT = lattice_family(1)


def section(space, **kw):
    return SectionProblem(space, tuple(range(space.dim)), UNIT, **kw)


class TestBestQuantization:
    def test_c0_separable(self):
        result = best_quantization(section(C0Space(2)), Coeffs.from_values([F(2, 5), F(-13, 10)]))
        assert result.optimum == F(2, 5)
        assert result.choice.as_dict() == {0: 0, 1: -1}

    def test_lattice_vector_is_free(self):
        result = best_quantization(section(SummingSpace(3)), Coeffs.from_values([1, -2, 3]))
        assert result.optimum == 0

    def test_summing_optimum_below_greedy(self):
        x = Coeffs.from_values([F(3, 5)] * 3)
        greedy = quantize_summing(x, UNIT)
        result = best_quantization(section(SummingSpace(3)), x)
        assert result.optimum <= greedy.error <= F(2, 5)

    def test_zero_vector(self):
        result = best_quantization(section(C0Space(3)), Coeffs())
        assert result.optimum == 0 and result.nodes == 0

    def test_support_outside_section_rejected(self):
        with pytest.raises(IndexError):
            best_quantization(
                SectionProblem(C0Space(3), (0, 1), UNIT), Coeffs({2: F(1, 2)})
            )

    def test_budget_exceeded(self):
        problem = SectionProblem(
            SummingSpace(4), (0, 1, 2, 3), UNIT, support_restricted=False, budget=3
        )
        with pytest.raises(SearchBudgetExceeded):
            best_quantization(problem, Coeffs.from_values([F(1, 2)] * 4))

    def test_pruning_soundness(self):
        rng = seeded(31)
        spaces = [
            C0Space(4),
            SummingSpace(4),
            MultiSignSummingSpace(((1, -1, 1, -1), (1, 1, -1, -1))),
            SchauderSpace(3),
            TreeSpace((None, 0, 1, 0)),
        ]
        for _ in range(30):
            x = random_coeffs(rng, range(4), density=0.8)
            for space in spaces:
                fast = best_quantization(section(space), x)
                slow = best_quantization(section(space), x, prune=False)
                assert fast.optimum == slow.optimum
                assert fast.nodes <= slow.nodes

    def test_nqp_mode_no_worse_than_cqp(self):
        rng = seeded(32)
        for _ in range(30):
            x = random_coeffs(rng, range(4), density=0.5)
            for space in (SummingSpace(4), HaarCantorSpace(2)):
                cqp = best_quantization(section(space), x)
                nqp = best_quantization(section(space, support_restricted=False), x)
                assert nqp.optimum <= cqp.optimum

    def test_homogeneity(self):
        rng = seeded(33)
        for _ in range(20):
            x = random_coeffs(rng, range(3), density=0.9)
            base = best_quantization(section(SummingSpace(3)), x)
            for lam in (F(2), F(1, 2), F(3)):
                scaled_problem = SectionProblem(
                    SummingSpace(3), (0, 1, 2), NetFamily(default=LatticeNet(lam))
                )
                scaled = best_quantization(scaled_problem, x.scale(lam))
                assert scaled.optimum == lam * base.optimum


class TestEpsEstimates:
    def test_c0_ball_half(self):
        estimate = eps_ball_estimate(section(C0Space(2)), count=16, seed=1)
        assert estimate.lower_bound == F(1, 2)
        assert estimate.witness is not None and not estimate.certified

    def test_scale_rides_along_exactly(self):
        base = eps_ball_estimate(section(SummingSpace(3)), count=12, seed=2)
        doubled_problem = SectionProblem(
            SummingSpace(3), (0, 1, 2), NetFamily(default=LatticeNet(F(2)))
        )
        doubled = eps_ball_estimate(doubled_problem, count=12, seed=2, scale=F(2))
        assert doubled.lower_bound == 2 * base.lower_bound

    def test_space_estimate_examples(self):
        estimate = eps_space_estimate(section(C0Space(2)), F(3), count=16, seed=3)
        assert estimate.lower_bound == F(1, 2)  # integer translation invariance
        zero = eps_space_estimate(section(C0Space(2)), 0, count=16, seed=3)
        assert zero.lower_bound == 0 and zero.sample_count == 0

    def test_haar_ball_hits_flat_witness(self):
        space = HaarCantorSpace(2)
        problem = SectionProblem(
            space, tuple(range(4)), UNIT, support_restricted=False
        )
        estimate = eps_ball_estimate(problem, count=8, seed=4)
        assert estimate.lower_bound >= 1


class TestHaarWitness:
    def test_guaranteed_levels(self):
        for level in (2, 3):
            distance, result = haar_witness_distance(level, 1)
            assert distance >= 1

    def test_small_level_large_delta(self):
        distance, _ = haar_witness_distance(1, 2)
        assert distance >= 1

    def test_huge_mesh_leaves_norm(self):
        distance, _ = haar_witness_distance(2, 10)
        assert distance == 1  # only the zero choice is nearby


class TestPropertyP:
    def test_c0_small_letters(self):
        nets = lattice_family(F(1, 2))
        result = check_property_p(C0Space(3), nets, (0, 1, 2))
        assert result.found and result.witness_norm <= 1
        assert all(d != 0 for _, d in result.witness.values)

    def test_summing_alternating(self):
        nets = NetFamily(default=ExplicitNet((F(-1), F(0), F(1)), F(1), F(1)))
        result = check_property_p(SummingSpace(2), nets, (0, 1))
        assert result.found and result.witness_norm == 1
        assert result.witness.as_dict() in ({0: 1, 1: -1}, {0: -1, 1: 1})

    def test_certified_failure(self):
        nets = NetFamily(default=ExplicitNet((F(-3), F(0), F(3)), F(3), F(3)))
        result = check_property_p(C0Space(1), nets, (0,))
        assert not result.found and result.certified


class TestQuasiGreedy:
    def test_c0_always_one(self):
        report = quasi_greedy_constants(C0Space(3), (0, 1, 2), F(1, 4), 50, 5)
        assert report.threshold_lower == 1 and report.subset_lower == 1

    def test_summing_subset_blowup(self):
        witness = Coeffs.from_values([F(1, 2), F(-1, 2), F(1, 2)])
        report = quasi_greedy_constants(
            SummingSpace(3), (0, 1, 2), F(1, 4), 50, 5, extra_points=[witness]
        )
        assert report.subset_lower > 1
        assert report.subset_witness is not None

    def test_huge_threshold_vacuous(self):
        report = quasi_greedy_constants(SummingSpace(3), (0, 1, 2), F(50), 20, 6)
        assert report.threshold_lower == 1 and report.subset_lower == 1

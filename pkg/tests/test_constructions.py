"""Tests for the direct-sum build, the basis-constant lemma, and the staged build."""

import json
from fractions import Fraction as F

import pytest

from qlab.core import Coeffs, MeshTooCoarse, SearchBudgetExceeded, lattice_family
from qlab.norms import C0Space, SummingSpace, basis_vector_norms
from qlab.constructions import (
    build_u_space,
    build_y_space,
    lemma_basis_constant,
    quantize_u,
    subsequence_equivalence_check,
    u_norm,
)
from qlab.quantize import quantize_y
from qlab.sampling import random_coeffs, seeded
from qlab.serialize import u_build_from_json, u_build_to_json


class TestLemmaBasisConstant:
    def test_small_cases_within_three(self):
        values = {n: lemma_basis_constant(n) for n in (1, 2, 3)}
        assert values[1] == 1
        assert all(1 <= v <= 3 for v in values.values())

    def test_monotone_evidence(self):
        # the bound is uniform; the exact constants stay below it as n grows
        assert lemma_basis_constant(4) <= 3

    def test_budget_guard(self):
        with pytest.raises(SearchBudgetExceeded):
            lemma_basis_constant(9)


class TestYBuild:
    def test_normalized_system(self):
        space = build_y_space(C0Space(4), 4)
        assert basis_vector_norms(space) == tuple([F(1)] * space.dim)

    def test_single_block_norm(self):
        space = build_y_space(C0Space(1), 1)
        assert space.dim == 2
        assert space.norm(Coeffs({0: 1})) == 1
        assert space.norm(Coeffs({1: 1})) == 1

    def test_inner_space_can_differ(self):
        space = build_y_space(SummingSpace(2), 2)
        assert basis_vector_norms(space) == tuple([F(1)] * space.dim)

    def test_quantizer_bound_holds(self):
        space = build_y_space(C0Space(4), 4)
        rng = seeded(17)
        for _ in range(100):
            x = random_coeffs(rng, range(space.dim), density=0.5)
            report = quantize_y(x, lattice_family(1), space)
            assert report.error <= report.guarantee


class TestUBuild:
    def setup_method(self):
        self.build = build_u_space(C0Space(2), F(1, 2), 2)

    def test_shape(self):
        assert self.build.markers == (0, 74)
        assert self.build.dim == 75
        assert self.build.meshes == (F(1, 4), F(1, 8))
        assert len(self.build.extensions[0]) == 73

    def test_stage_one_only(self):
        small = build_u_space(C0Space(1), F(1, 2), 1)
        assert small.markers == (0,)
        assert small.dim == 1
        assert u_norm(small, Coeffs({0: F(2, 3)})) == F(2, 3)

    def test_invalid_inputs(self):
        with pytest.raises(ValueError):
            build_u_space(C0Space(2), F(1, 2), 0)
        with pytest.raises(ValueError):
            build_u_space(C0Space(1), F(1, 2), 2)
        with pytest.raises(TypeError):
            build_u_space(SummingSpace(2), F(1, 2), 1)
        with pytest.raises(ValueError):
            build_u_space(C0Space(2), F(3, 2), 1)

    def test_functionals_in_sup_ball_and_prefix_closed(self):
        family = set(self.build.functionals)
        for f in self.build.functionals:
            assert all(abs(v) <= 1 for v in f)
            for n in range(len(f)):
                stripped = f[:n]
                while stripped and stripped[-1] == 0:
                    stripped = stripped[:-1]
                assert tuple(stripped) in family

    def test_unit_vectors(self):
        for i in range(self.build.dim):
            assert u_norm(self.build, Coeffs({i: 1})) == 1

    def test_monotone_prefix_truncation(self):
        rng = seeded(18)
        for _ in range(60):
            x = random_coeffs(rng, range(self.build.dim), density=0.1)
            full = u_norm(self.build, x)
            for cut in (1, 10, 40, 74):
                assert u_norm(self.build, x.restrict(range(cut))) <= full

    def test_quantizer_stage_one_case(self):
        nets = lattice_family(F(1, 3))
        report = quantize_u(self.build, Coeffs({0: F(1, 5)}), nets)
        assert abs(F(1, 5) - report.choice.as_dict()[0]) <= F(1, 6)
        assert report.error <= F(1, 3)

    def test_quantizer_bound_and_support_extension(self):
        nets = lattice_family(F(1, 3))
        rng = seeded(19)
        links = {ext.link for stage in self.build.extensions for ext in stage}
        markers = set(self.build.markers)
        for _ in range(60):
            x = random_coeffs(rng, range(self.build.dim), density=0.15)
            report = quantize_u(self.build, x, nets)
            assert report.error <= report.guarantee == F(2, 3)
            extra = set(report.choice.support()) - set(x.support())
            assert extra <= links | markers | {0}

    def test_marker_subsequence_ratios(self):
        report = subsequence_equivalence_check(self.build, 100, 20)
        assert report.min_ratio >= 1 - self.build.eta
        assert report.max_ratio <= 1

    def test_serialization_roundtrip(self):
        data = json.loads(json.dumps(u_build_to_json(self.build)))
        clone = u_build_from_json(data)
        assert clone.markers == self.build.markers
        assert clone.functionals == self.build.functionals
        rng = seeded(21)
        for _ in range(20):
            x = random_coeffs(rng, range(clone.dim), density=0.1)
            assert u_norm(clone, x) == u_norm(self.build, x)
        report = quantize_u(clone, Coeffs({0: F(1, 3), 50: F(1, 7)}), lattice_family(F(1, 3)))
        assert report.error <= F(2, 3)

    def test_mesh_plan_validation(self):
        with pytest.raises(ValueError):
            build_u_space(C0Space(2), F(1, 2), 2, mesh_plan=[F(2, 3), F(1, 3)])
        custom = build_u_space(C0Space(2), F(1, 2), 2, mesh_plan=[F(1, 2), F(1, 4)])
        assert custom.meshes == (F(1, 2), F(1, 4))

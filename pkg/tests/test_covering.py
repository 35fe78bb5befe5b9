"""Covering geometry tests: gauges, the three covering properties, amplification."""

from fractions import Fraction as F

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qlab.core import CoverageError, ExplicitNet, LatticeNet
from qlab.covering import (
    PARALLELOGRAM_VERTICES,
    Body,
    LatticeSpec,
    amplification_check,
    check_p1,
    check_p2,
    check_p3,
    default_eps1,
    gauge,
    grid_points,
    parallelogram_example,
)

SQUARE = Body.from_vertices([(1, 1), (1, -1), (-1, 1), (-1, -1)])
Z2 = LatticeSpec.integers(2)
coords = st.fractions(min_value=-3, max_value=3, max_denominator=16)


class TestBody:
    def test_gauge_values(self):
        assert gauge(SQUARE, (0, 0)) == 0
        assert gauge(SQUARE, (2, 1)) == 2
        assert gauge(SQUARE, (F(1, 2), F(-1, 2))) == F(1, 2)

    def test_parallelogram_membership(self):
        body = Body.from_vertices(PARALLELOGRAM_VERTICES)
        assert body.symmetric
        assert gauge(body, (F(1, 2), F(1, 2))) <= 1

    def test_interval_body(self):
        segment = Body.from_vertices([(F(-1),), (F(2),)])
        assert gauge(segment, (F(1),)) == F(1, 2)
        assert gauge(segment, (F(-1, 2),)) == F(1, 2)

    def test_simplex_3d(self):
        body = Body.from_vertices(
            [(1, 1, 1), (1, -1, -1), (-1, 1, -1), (-1, -1, 1), (-1, -1, -1), (1, 1, -1), (1, -1, 1), (-1, 1, 1)]
        )
        assert gauge(body, (0, 0, 2)) == 2
        assert body.symmetric

    def test_zero_must_be_interior(self):
        with pytest.raises(ValueError):
            Body.from_vertices([(1, 0), (2, 0), (1, 1), (2, 1)])

    def test_degenerate_vertices_rejected(self):
        with pytest.raises(ValueError):
            Body.from_vertices([(0, 1), (0, -1), (0, 2)])

    @given(p=st.tuples(coords, coords), lam=st.fractions(min_value=0, max_value=4, max_denominator=8))
    @settings(max_examples=150)
    def test_gauge_homogeneous(self, p, lam):
        body = Body.from_vertices(PARALLELOGRAM_VERTICES)
        assert gauge(body, (lam * p[0], lam * p[1])) == lam * gauge(body, p)

    @given(p=st.tuples(coords, coords))
    @settings(max_examples=150)
    def test_symmetric_gauge_even(self, p):
        assert gauge(SQUARE, p) == gauge(SQUARE, (-p[0], -p[1]))

    def test_vertices_satisfy_facets(self):
        for v in SQUARE.vertices:
            assert SQUARE.gauge(v) == 1


class TestLatticeSpec:
    def test_det_and_membership(self):
        skew = LatticeSpec.from_rows([[1, 0], [F(1, 2), F(1, 2)]])
        assert skew.det() == F(1, 2)
        points = skew.points_in_box(F(1))
        assert (F(1, 2), F(1, 2)) in points and (0, 1) in points

    def test_singular_rejected(self):
        with pytest.raises(ValueError):
            LatticeSpec.from_rows([[1, 1], [2, 2]])


class TestP1:
    def test_unit_square_tiles(self):
        body = Body.from_vertices(
            [(F(1, 2), F(1, 2)), (F(1, 2), F(-1, 2)), (F(-1, 2), F(1, 2)), (F(-1, 2), F(-1, 2))]
        )
        assert check_p1(body, Z2, F(1, 16)).covered

    def test_shrunken_square_has_hole(self):
        body = Body.from_vertices(
            [(F(1, 4), F(1, 4)), (F(1, 4), F(-1, 4)), (F(-1, 4), F(1, 4)), (F(-1, 4), F(-1, 4))]
        )
        verdict = check_p1(body, Z2, F(1, 16))
        assert not verdict.covered
        assert verdict.witness == (0, F(5, 16))  # first hole in scan order
        assert verdict.uncovered_count > 1

    def test_sublattice_never_repairs_a_hole(self):
        body = Body.from_vertices(
            [(F(1, 4), F(1, 4)), (F(1, 4), F(-1, 4)), (F(-1, 4), F(1, 4)), (F(-1, 4), F(-1, 4))]
        )
        sub = LatticeSpec.from_rows([[2, 0], [0, 2]])
        assert not check_p1(body, sub, F(1, 8)).covered


class TestP2:
    def test_cube_with_half_nets(self):
        nets = [LatticeNet(F(1, 2)), ExplicitNet((F(-2), F(-1), F(0), F(1), F(2)), F(1, 2), F(2))]
        verdict = check_p2(SQUARE, nets, F(1, 8))
        assert verdict.covered

    def test_single_point_net_with_huge_body(self):
        big = Body.from_vertices([(3, 3), (3, -3), (-3, 3), (-3, -3)])
        nets = [ExplicitNet((F(0),), F(3), F(3)), ExplicitNet((F(0),), F(3), F(3))]
        assert check_p2(big, nets, F(1, 4)).covered

    def test_underreaching_net_fails_loudly(self):
        nets = [ExplicitNet((F(-1, 2), F(0), F(1, 2)), F(1, 2), F(1, 2))] * 2
        with pytest.raises(CoverageError):
            check_p2(SQUARE, nets, F(1, 4))


class TestP3:
    def test_big_cube_covers(self):
        assert check_p3(SQUARE, F(1, 8)).covered

    def test_small_cube_misses_center(self):
        body = Body.from_vertices(
            [(F(1, 4), F(1, 4)), (F(1, 4), F(-1, 4)), (F(-1, 4), F(1, 4)), (F(-1, 4), F(-1, 4))]
        )
        verdict = check_p3(body, F(1, 4))
        assert not verdict.covered
        assert verdict.witness == (0, F(1, 2))  # lex-first hole; the center is another
        center = (F(1, 2), F(1, 2))
        assert all(
            body.gauge((center[0] - a, center[1] - b)) > 1 for a in (0, 1) for b in (0, 1)
        )

    def test_parallelogram_recorded(self):
        # exploratory: the tilted parallelogram does satisfy the corner covering
        body = Body.from_vertices(PARALLELOGRAM_VERTICES)
        verdict = check_p3(body, F(1, 16))
        assert verdict.covered


class TestAmplification:
    def test_half_then_one(self):
        report = amplification_check(SQUARE, Z2, F(1, 2), mesh=F(1, 16), box_radius=F(2))
        assert report.eps1 == 1
        assert report.phase1.holds and report.phase2.holds
        assert report.phase1.worst_slack == F(1, 2)

    def test_eps1_formula(self):
        assert default_eps1(F(1, 2)) == 1
        assert default_eps1(F(2, 5)) == F(2, 5)
        assert default_eps1(F(3, 4)) == 3  # floor(3) + 1 = 4 copies of 3/4
        with pytest.raises(ValueError):
            default_eps1(F(1))

    def test_failing_phase_one_reports_witness(self):
        report = amplification_check(SQUARE, Z2, F(1, 4), mesh=F(1, 8), box_radius=F(1))
        assert not report.phase1.holds
        assert report.phase1.witness is not None
        assert report.phase1.worst_slack == F(1, 2)


class TestParallelogram:
    def test_full_example(self):
        report = parallelogram_example(F(1, 8), mesh=F(1, 32))
        assert report.tiling.covered
        assert report.interior_disjoint and report.interior_points_checked > 0
        assert report.q_point == (F(1, 2), F(1, 2))
        assert report.q_in_base and report.q_in_shifted
        verdict = report.stretched_net_verdict
        assert not verdict.covered and verdict.witness is not None

    def test_witness_is_exactly_uncovered(self):
        report = parallelogram_example(F(1, 8), mesh=F(1, 32))
        body = Body.from_vertices(PARALLELOGRAM_VERTICES)
        witness = report.stretched_net_verdict.witness
        eta = F(1, 8)
        for i in range(-4, 5):
            for j in range(-4, 5):
                shifted = (witness[0] - i, witness[1] - j * (1 - eta))
                assert body.gauge(shifted) > 1

    def test_eta_range_checked(self):
        with pytest.raises(ValueError):
            parallelogram_example(F(3, 4))


def test_grid_points_exact():
    grid = grid_points([(0, 1)], F(1, 3))
    assert grid == [(0,), (F(1, 3),), (F(2, 3),), (1,)]
    grid = grid_points([(0, 1), (0, 1)], F(1, 2))
    assert len(grid) == 9

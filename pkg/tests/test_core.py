"""Tests for exact scalars, coefficient vectors, and alphabets."""

from fractions import Fraction as F

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qlab.core import (
    Coeffs,
    CoverageError,
    ExplicitNet,
    LatticeNet,
    NetFamily,
    net_nearest,
    net_points_within,
    scalar_str,
)

fractions = st.fractions(min_value=-4, max_value=4, max_denominator=64)
positive_fractions = st.fractions(min_value=F(1, 16), max_value=2, max_denominator=32)


def test_scalar_canonical_text():
    assert scalar_str(F(3, 2)) == "3/2"
    assert scalar_str(F(4, 2)) == "2"
    assert scalar_str(F(-1, 3)) == "-1/3"


class TestLatticeNet:
    def test_nearest_examples(self):
        net = LatticeNet(F(1))
        assert net_nearest(net, F(2, 5)) == [0]
        assert net_nearest(net, F(1, 2)) == [0, 1]
        assert net_nearest(net, F(-3, 2)) == [-2, -1]
        assert net_nearest(net, F(3)) == [3]

    def test_points_within_examples(self):
        net = LatticeNet(F(1))
        assert net_points_within(net, 0, F(5, 2)) == [-2, -1, 0, 1, 2]
        half = LatticeNet(F(1, 2))
        assert net_points_within(half, F(3, 10), F(3, 10)) == [0, F(1, 2)]
        assert net_points_within(net, 2, 0) == [2]

    @given(x=fractions, delta=positive_fractions)
    @settings(max_examples=200)
    def test_nearest_within_half_mesh(self, x, delta):
        net = LatticeNet(delta)
        candidates = net.nearest(x)
        assert all(abs(d - x) <= delta / 2 for d in candidates)
        assert candidates == sorted(candidates)

    @given(x=fractions, delta=positive_fractions, radius=positive_fractions)
    @settings(max_examples=200)
    def test_points_within_contains_nearest(self, x, delta, radius):
        net = LatticeNet(delta)
        if radius >= delta:
            points = net.points_within(x, radius)
            for d in net.nearest(x):
                assert d in points


class TestExplicitNet:
    def test_nearest_example(self):
        net = ExplicitNet(points=(F(-1), F(0), F(2)), delta=F(2), reach=F(3))
        assert net_nearest(net, F(1)) == [0, 2]

    def test_requires_zero(self):
        with pytest.raises(ValueError):
            ExplicitNet(points=(F(1), F(-1)), delta=F(1), reach=F(1))

    def test_rejects_wide_gap(self):
        with pytest.raises(CoverageError):
            ExplicitNet(points=(F(-4), F(0), F(4)), delta=F(1), reach=F(4))

    def test_out_of_window_queries_fail(self):
        net = ExplicitNet(points=(F(-1), F(-1, 2), F(0), F(1, 2), F(1)), delta=F(1, 2), reach=F(1))
        with pytest.raises(CoverageError):
            net.nearest(F(3))
        with pytest.raises(CoverageError):
            net.points_within(F(1, 2), F(1))
        # members_within reads the truncated alphabet without complaint
        assert net.members_within(F(1, 2), F(1)) == [F(-1, 2), F(0), F(1, 2), F(1)]

    @given(x=st.fractions(min_value=-2, max_value=2, max_denominator=32))
    @settings(max_examples=150)
    def test_coverage_at_declared_mesh(self, x):
        net = ExplicitNet(
            points=(F(-2), F(-5, 4), F(-1, 2), F(0), F(3, 4), F(3, 2), F(2)),
            delta=F(3, 4),
            reach=F(2),
        )
        best = net.nearest(x)[0]
        assert abs(best - x) <= net.delta


class TestCoeffs:
    def test_zero_and_cancellation(self):
        a = Coeffs({1: F(3, 2)})
        b = Coeffs({1: F(1, 2), 2: 1})
        assert a.sub(b) == Coeffs({1: 1, 2: -1})
        assert a.sub(a) == Coeffs()
        assert a.scale(0) == Coeffs()
        assert not Coeffs()

    def test_support_and_equality(self):
        x = Coeffs({3: F(1, 2), 0: F(-1)})
        assert x.support() == (0, 3)
        assert x == Coeffs({0: -1, 3: F(1, 2)})
        assert x[1] == 0

    def test_rejects_negative_indices(self):
        with pytest.raises(ValueError):
            Coeffs({-1: 1})

    @given(
        a=st.dictionaries(st.integers(0, 6), fractions, max_size=5),
        b=st.dictionaries(st.integers(0, 6), fractions, max_size=5),
        lam=fractions,
    )
    @settings(max_examples=200)
    def test_algebra(self, a, b, lam):
        xa, xb = Coeffs(a), Coeffs(b)
        assert xa.add(xb) == xb.add(xa)
        assert xa.sub(xb).add(xb) == xa
        assert xa.add(xb).scale(lam) == xa.scale(lam).add(xb.scale(lam))


def test_net_family_lookup():
    family = NetFamily(default=LatticeNet(F(1)), overrides={2: LatticeNet(F(1, 4))})
    assert family.mesh(0) == 1
    assert family.mesh(2) == F(1, 4)
    assert family.max_mesh([0, 2]) == 1
    assert family.max_mesh([]) == 1

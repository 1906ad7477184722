"""Tests for the topology induced by a soft metric."""
import numpy as np
import pytest

from backends.analytic import MetricDescriptor
from core.exceptions import DegenerateGeometryError, PreconditionError
from softspace.metric import SoftMetricSpace, ball
from softspace.soft_reals import ParamSet, SoftReal
from softspace.soft_sets import SoftPoint, SoftSet, Universe
from softspace.topology import (
    RegionKind,
    boundary,
    closure,
    interior,
    is_closed,
    is_open,
    is_open_sectionwise,
    region_membership,
    separate_closed_sets,
)
from tests.factories import random_repaired_space


def line_space(d_ab: float) -> SoftMetricSpace:
    """Two elements under one label at distance d_ab."""
    table = np.array([[[0.0], [d_ab]], [[d_ab], [0.0]]])
    return SoftMetricSpace.tabulated(Universe.finite(["a", "b"]), ParamSet.of(["e1"]), table)


def random_soft_set(rng, space, p=0.5) -> SoftSet:
    keep = [q for q in space.points() if rng.random() < p]
    return SoftSet.from_points(space.universe, space.params, keep)


def random_disjoint_pair(rng, space):
    """Two disjoint non-null soft sets drawn by assigning each point to F1, F2 or neither."""
    while True:
        owner = rng.integers(0, 3, size=len(space.points()))
        f1 = [q for q, o in zip(space.points(), owner) if o == 1]
        f2 = [q for q, o in zip(space.points(), owner) if o == 2]
        if f1 and f2:
            return (
                SoftSet.from_points(space.universe, space.params, f1),
                SoftSet.from_points(space.universe, space.params, f2),
            )


@pytest.fixture
def sum_line() -> SoftMetricSpace:
    params = ParamSet.numeric({"l0": 0.0, "l1": 1.0})
    return SoftMetricSpace.analytic(params, 1, MetricDescriptor())


class TestIsOpen:
    """Test openness on tabulated spaces."""

    def test_absolute_and_null(self, square):
        """Test the absolute and null sets are open."""
        space = square.space
        assert is_open(space, space.absolute())
        assert is_open(space, space.null())

    def test_proper_subset_in_metric_space(self, square):
        """Test every subset of a finite soft metric space is open."""
        space = square.space
        s = SoftSet.from_sections(space.universe, space.params, {"e1": ["a"], "e2": ["a", "b"]})
        verdict = is_open(space, s)
        assert verdict.is_open
        assert [str(p) for p, _ in verdict.radii] == ["a_e1", "a_e2", "b_e2"]
        assert is_closed(space, s)

    def test_zero_distance_breaks_openness(self):
        """Test a point at distance zero from a non-member has no interior ball."""
        space = line_space(0.0)
        s = SoftSet.from_sections(space.universe, space.params, {"e1": ["a"]})
        verdict = is_open(space, s)
        assert not verdict
        assert verdict.witness == SoftPoint("a", "e1")
        assert not is_open_sectionwise(space, s)

    def test_open_iff_sections_open(self):
        """Test openness agrees with sectionwise openness on random repaired spaces."""
        rng = np.random.default_rng(8)
        for _ in range(20):
            space = random_repaired_space(rng)
            s = random_soft_set(rng, space)
            assert is_open(space, s).is_open == is_open_sectionwise(space, s)


class TestRegionMembership:
    """Test closure, interior and boundary membership."""

    def test_discrete_regions(self):
        """Test closure and interior equal the set and the boundary is empty."""
        rng = np.random.default_rng(21)
        for _ in range(10):
            space = random_repaired_space(rng)
            s = random_soft_set(rng, space)
            if s.is_null() or s.is_absolute():
                continue
            assert closure(space, s) == s
            assert interior(space, s) == s
            assert boundary(space, s).is_null()

    def test_consistency(self, square):
        """Test interior implies closure and boundary excludes interior."""
        space = square.space
        s = SoftSet.from_sections(space.universe, space.params, {"e1": ["a"]})
        for p in space.points():
            inside = region_membership(space, s, p, RegionKind.INTERIOR)
            near = region_membership(space, s, p, RegionKind.CLOSURE)
            edge = region_membership(space, s, p, RegionKind.BOUNDARY)
            assert not inside or near
            assert not edge or (near and not inside)
            assert not edge

    def test_absolute_set_interior(self, square):
        """Test every point is interior to the absolute set."""
        space = square.space
        assert all(region_membership(space, space.absolute(), p, "interior") for p in space.points())

    def test_sphere_point_is_boundary(self, sum_line):
        """Test a point at distance r from the center is on the boundary of B(c, r)."""
        target = ball(sum_line, SoftPoint((0.0,), "l0"), SoftReal.constant(sum_line.params, 1.0))
        on_sphere = SoftPoint((1.0,), "l0")
        assert region_membership(sum_line, target, on_sphere, RegionKind.BOUNDARY)
        assert region_membership(sum_line, target, on_sphere, RegionKind.CLOSURE)
        assert not region_membership(sum_line, target, on_sphere, RegionKind.INTERIOR)

    def test_center_is_interior(self, sum_line):
        """Test the center of a ball with positive radius is interior."""
        target = ball(sum_line, SoftPoint((0.0,), "l0"), SoftReal.constant(sum_line.params, 1.0))
        center = SoftPoint((0.0,), "l0")
        assert region_membership(sum_line, target, center, RegionKind.INTERIOR)
        assert not region_membership(sum_line, target, center, RegionKind.BOUNDARY)

    def test_far_point_outside_closure(self, sum_line):
        """Test a point at distance 3 from a unit ball is outside its closure."""
        target = ball(sum_line, SoftPoint((0.0,), "l0"), SoftReal.constant(sum_line.params, 1.0))
        assert not region_membership(sum_line, target, SoftPoint((4.0,), "l0"), RegionKind.CLOSURE)

    def test_member_at_raw_label_is_in_closure(self, sum_line):
        """Test a member labelled 0.5, between the seeds, is interior and in the closure of B(0_l0, 2)."""
        target = ball(sum_line, SoftPoint((0.0,), "l0"), SoftReal.constant(sum_line.params, 2.0))
        member = SoftPoint((0.0,), 0.5)

        assert target.contains(sum_line.point(member.element, member.label))
        assert region_membership(sum_line, target, member, RegionKind.INTERIOR)
        assert region_membership(sum_line, target, member, RegionKind.CLOSURE)
        assert not region_membership(sum_line, target, member, RegionKind.BOUNDARY)

    def test_center_at_raw_label(self, sum_line):
        """Test a ball centered at label 0.5 with radius 0.2 holds its center although no seed label reaches it."""
        center = SoftPoint((0.0,), 0.5)
        target = ball(sum_line, center, SoftReal.constant(sum_line.params, 0.2))

        assert region_membership(sum_line, target, center, RegionKind.CLOSURE)
        assert region_membership(sum_line, target, center, RegionKind.INTERIOR)
        assert not region_membership(sum_line, target, SoftPoint((3.0,), "l1"), RegionKind.CLOSURE)


class TestSeparation:
    """Test separation of disjoint closed soft sets."""

    def test_two_points(self):
        """Test {a} and {b} at distance 1 are separated by balls of radius 1/3."""
        space = line_space(1.0)
        f1 = SoftSet.from_sections(space.universe, space.params, {"e1": ["a"]})
        f2 = SoftSet.from_sections(space.universe, space.params, {"e1": ["b"]})
        separation = separate_closed_sets(space, f1, f2)
        assert separation.u == f1
        assert separation.v == f2
        assert separation.summary()["radii_U"]["a_e1"] == pytest.approx([1.0 / 3.0])
        assert separation.u.intersect(separation.v).is_null()

    def test_null_input(self, square):
        """Test a null input is a precondition error."""
        space = square.space
        with pytest.raises(PreconditionError):
            separate_closed_sets(space, space.null(), space.absolute())

    def test_overlap(self, square):
        """Test overlapping inputs are a precondition error."""
        space = square.space
        s = SoftSet.from_sections(space.universe, space.params, {"e1": ["a"]})
        with pytest.raises(PreconditionError):
            separate_closed_sets(space, s, space.absolute())

    def test_degenerate_radius(self):
        """Test a zero separation radius names the point."""
        space = line_space(0.0)
        f1 = SoftSet.from_sections(space.universe, space.params, {"e1": ["a"]})
        f2 = SoftSet.from_sections(space.universe, space.params, {"e1": ["b"]})
        with pytest.raises(DegenerateGeometryError, match="a_e1"):
            separate_closed_sets(space, f1, f2)

    def test_seeded_battery(self):
        """Test 50 repaired spaces with random disjoint closed sets."""
        rng = np.random.default_rng(77)
        for _ in range(50):
            space = random_repaired_space(rng)
            f1, f2 = random_disjoint_pair(rng, space)
            separation = separate_closed_sets(space, f1, f2)
            assert f1.issubset(separation.u)
            assert f2.issubset(separation.v)
            assert separation.u.intersect(separation.v).is_null()
            assert is_open(space, separation.u)
            assert is_open(space, separation.v)

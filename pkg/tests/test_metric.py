"""Tests for soft metric spaces."""
import math

import numpy as np
import pytest

from backends.analytic import MetricDescriptor, MetricFamily, ParamKind
from core.exceptions import SoftDomainError
from softspace.metric import (
    SoftMetricSpace,
    ball,
    cauchy_tail,
    check_axioms,
    check_scalar_axioms,
    converges_to,
    dist_to_set,
    distance,
    limit_is_unique,
    project,
    project_at_value,
    repair_to_metric,
)
from softspace.sampling import SamplePlan
from softspace.soft_reals import ParamSet, SoftReal
from softspace.soft_sets import SoftPoint, SoftSet, Universe
from tests.factories import random_repaired_space


def sum_space(values, dim=1, weight=1.0):
    params = ParamSet.numeric({f"l{i}": v for i, v in enumerate(values)})
    return SoftMetricSpace.analytic(params, dim, MetricDescriptor(weight=weight))


def nearest_member_distance(space, query, target, coarse=2001, zooms=8):
    """
    Smallest d(query, q) over members q of a ball on the line, by scanning real labels.

    At each label the member nearest the query is placed just inside the section; the
    scan is refined around the best label, which is exact for the convex abs_diff gap.
    """
    descriptor = space.backend.descriptor
    w = descriptor.weight
    query = space.point(query.element, query.label)
    c = target.center
    r = target.radius.inf()

    def nearest(mu):
        slack = r - w * descriptor.param_distance(c.label, mu) - 1e-12
        if slack <= 0:
            return math.inf
        x = c.element[0] + float(np.clip(query.element[0] - c.element[0], -slack, slack))
        member = SoftPoint((x,), float(mu))
        assert target.contains(space.point(member.element, member.label))
        return distance(space, query, member).sup()

    mus = np.linspace(c.label - r / w, c.label + r / w, coarse)
    step = mus[1] - mus[0]
    best = min(mus, key=nearest)
    for _ in range(zooms):
        mus = np.linspace(best - step, best + step, 41)
        step = mus[1] - mus[0]
        best = min(mus, key=nearest)
    return nearest(best)


def incomparable_space():
    """a, b, c under e1, e2 with d(a_e1, b_e1) = (1, 2) and d(a_e1, c_e1) = (2, 1)."""
    universe = Universe.finite(["a", "b", "c"])
    params = ParamSet.of(["e1", "e2"])
    table = np.full((6, 6, 2), 5.0)
    table[np.arange(6), np.arange(6)] = 0.0
    table[0, 1] = table[1, 0] = (1.0, 2.0)
    table[0, 2] = table[2, 0] = (2.0, 1.0)
    return SoftMetricSpace.tabulated(universe, params, table)


class TestDistance:
    """Test soft distance evaluation."""

    def test_example_pair(self, load_fixture):
        """Test d((0,1)_2, (1,0)_1) = 1 + sqrt(2) in the sum space."""
        space = load_fixture("example_4_12.json").space
        d = distance(space, SoftPoint((0.0, 1.0), 2.0), SoftPoint((1.0, 0.0), 1.0))
        assert d.is_constant()
        assert d.sup() == pytest.approx(1 + math.sqrt(2), abs=1e-12)

    def test_example_image_pair(self, load_fixture):
        """Test d((0,1/2)_6, (1/2,0)_3) = 3 + sqrt(2)/2."""
        space = load_fixture("example_4_12.json").space
        d = distance(space, SoftPoint((0.0, 0.5), 6.0), SoftPoint((0.5, 0.0), 3.0))
        assert d.sup() == pytest.approx(3 + math.sqrt(2) / 2, abs=1e-12)

    def test_self_distance_is_zero(self, square):
        """Test d(p, p) = 0 on both backends."""
        p = SoftPoint("a", "e2")
        assert distance(square.space, p, p).is_zero()
        space = sum_space([0.0, 1.0])
        assert distance(space, SoftPoint((3.0,), "l1"), SoftPoint((3.0,), 1.0)).is_zero()

    def test_unknown_point(self, square):
        """Test unknown elements and labels are domain errors."""
        with pytest.raises(SoftDomainError):
            distance(square.space, SoftPoint("z", "e1"), SoftPoint("a", "e1"))
        with pytest.raises(SoftDomainError):
            distance(sum_space([0.0]), SoftPoint((1.0,), "nope"), SoftPoint((1.0,), 0.0))

    def test_symmetric_bit_exact(self):
        """Test d(p, q) = d(q, p) on a repaired table."""
        space = random_repaired_space(np.random.default_rng(3))
        for p in space.points():
            for q in space.points():
                assert distance(space, p, q) == distance(space, q, p)


class TestCheckAxioms:
    """Test axiom verification."""

    def test_power_family_fails_m2(self, load_fixture, plan):
        """Test the power family has distinct soft points at distance zero."""
        report = check_axioms(load_fixture("example_3_2.json").space, plan)
        witness = report.first("M2")
        assert witness is not None
        p, q = witness.witness
        assert p.element == q.element
        assert p.label != q.label
        assert not report.exhaustive

    def test_sum_family_not_falsified(self, load_fixture):
        """Test 10^4 sampled triples find no violation in the sum space."""
        report = check_axioms(load_fixture("example_4_12.json").space, SamplePlan.default(samples=10_000, seed=42))
        assert report.holds
        assert report.verdict.startswith("not falsified")

    def test_triangle_violation(self, triangle):
        """Test d(a, c) = 3 > 1 + 1 is an M4 violation witnessed by (a, b, c)."""
        report = check_axioms(triangle.space)
        assert report.violated_axioms == ["M4"]
        witness = report.first("M4").witness
        assert [str(p) for p in witness] == ["a_e1", "b_e1", "c_e1"]
        assert report.first("M4").excess == pytest.approx(1.0)

    def test_zero_below_diagonal(self):
        """Test d(b, a) = 0 with d(a, b) = 1 is an M2 witness in the vanishing direction, reported once."""
        table = np.array([[[0.0], [1.0]], [[0.0], [0.0]]])
        space = SoftMetricSpace.tabulated(Universe.finite(["a", "b"]), ParamSet.of(["e1"]), table)

        report = check_axioms(space)

        assert report.counts["M2"] == 1
        assert [str(p) for p in report.first("M2").witness] == ["b_e1", "a_e1"]
        assert "M3" in report.violated_axioms

    def test_zero_both_directions_reported_once(self):
        """Test a pair at distance zero both ways gives a single M2 witness."""
        table = np.zeros((2, 2, 1))
        space = SoftMetricSpace.tabulated(Universe.finite(["a", "b"]), ParamSet.of(["e1"]), table)

        report = check_axioms(space)

        assert report.counts["M2"] == 1
        assert [str(p) for p in report.first("M2").witness] == ["a_e1", "b_e1"]

    def test_exhaustive_verified(self, square):
        """Test a genuine table is reported as verified."""
        report = check_axioms(square.space)
        assert report.holds
        assert report.exhaustive
        assert report.verdict == "verified"


class TestRepair:
    """Test metric repair."""

    def test_triangle_repaired(self, triangle):
        """Test d(a, c) = 3 is closed down to 2."""
        raw = triangle.space.backend.table
        space = repair_to_metric(raw, triangle.space.universe, triangle.space.params)
        assert distance(space, SoftPoint("a", "e1"), SoftPoint("c", "e1")).to_list() == [2.0]
        assert check_axioms(space).holds

    def test_asymmetric_input(self):
        """Test d(a, b) = 1 and d(b, a) = 3 both become 1."""
        universe = Universe.finite(["a", "b"])
        params = ParamSet.of(["e1"])
        raw = np.array([[[0.0], [1.0]], [[3.0], [0.0]]])
        space = repair_to_metric(raw, universe, params)
        assert space.backend.table[0, 1, 0] == space.backend.table[1, 0, 0] == 1.0

    def test_metric_unchanged(self, square):
        """Test a metric table comes back unchanged."""
        table = square.space.backend.table
        space = repair_to_metric(table, square.space.universe, square.space.params)
        assert np.array_equal(space.backend.table, table)

    def test_zero_bumped(self):
        """Test a zero between distinct points is bumped to a positive value."""
        universe = Universe.finite(["a", "b", "c"])
        params = ParamSet.of(["e1"])
        raw = np.array([[[0.0], [0.0], [2.0]], [[0.0], [0.0], [2.0]], [[2.0], [2.0], [0.0]]])
        space = repair_to_metric(raw, universe, params)
        assert space.backend.table[0, 1, 0] == pytest.approx(2e-3)
        assert check_axioms(space).holds

    def test_rejects_negative(self):
        """Test negative input entries are a domain error."""
        universe = Universe.finite(["a"])
        with pytest.raises(SoftDomainError):
            repair_to_metric(np.array([[[-1.0]]]), universe, ParamSet.of(["e1"]))

    def test_seeded_battery(self):
        """Test 100 repaired 4 x 2 tables: axioms, idempotence and projections."""
        rng = np.random.default_rng(2024)
        for _ in range(100):
            space = random_repaired_space(rng)
            report = check_axioms(space)
            assert report.holds and report.exhaustive
            again = repair_to_metric(space.backend.table, space.universe, space.params)
            np.testing.assert_allclose(again.backend.table, space.backend.table, rtol=0, atol=1e-12)
            for label in space.params.labels:
                assert check_scalar_axioms(project(space, label)) == []


class TestProject:
    """Test the per-parameter decomposition."""

    def test_sum_family_projection(self, load_fixture):
        """Test d_l(x, y) is the euclidean distance for every label."""
        space = load_fixture("example_4_12.json").space
        for value in space.params.values:
            d = project_at_value(space, value)
            assert d((0.0, 0.0), (3.0, 4.0)) == pytest.approx(5.0)

    def test_power_family_projection_is_metric(self, load_fixture, plan):
        """Test each projection of the power family is an ordinary metric."""
        space = load_fixture("example_3_2.json").space
        for value in space.params.values:
            projection = project_at_value(space, value)
            assert projection((0.0,), (2.0,)) == pytest.approx(2.0)
            assert check_scalar_axioms(projection, plan) == []

    def test_tabulated_matrix(self, square):
        """Test the projection matrix reads component l of the table."""
        matrix = project(square.space, "e2").matrix()
        np.testing.assert_array_equal(matrix, [[0.0, 2.0], [2.0, 0.0]])

    def test_unknown_label(self, square):
        """Test an unknown label is rejected."""
        with pytest.raises(SoftDomainError):
            project(square.space, "e9")


class TestBall:
    """Test soft balls."""

    def test_zero_component_open_ball_is_empty(self, square):
        """Test an open ball with a zero radius component contains nothing."""
        space = square.space
        radius = SoftReal(space.params, [0.0, 5.0])
        assert ball(space, SoftPoint("a", "e1"), radius).to_soft_set().is_null()

    def test_open_and_closed(self, load_fixture):
        """Test (1,0)_1 sits on the sphere of radius 2 around (0,0)_0."""
        space = load_fixture("example_4_12.json").space
        radius = SoftReal.constant(space.params, 2.0)
        center = SoftPoint((0.0, 0.0), 0.0)
        on_sphere = SoftPoint((1.0, 0.0), 1.0)
        assert on_sphere not in ball(space, center, radius)
        assert on_sphere in ball(space, center, radius, closed=True)

    def test_closed_zero_ball(self, square):
        """Test the closed ball of radius zero is the center alone."""
        space = square.space
        center = SoftPoint("b", "e2")
        members = ball(space, center, SoftReal.zero(space.params), closed=True).to_soft_set()
        assert members.points() == [center]

    def test_negative_radius(self, square):
        """Test negative radii are rejected."""
        with pytest.raises(SoftDomainError):
            ball(square.space, SoftPoint("a", "e1"), SoftReal(square.space.params, [-1.0, 1.0]))


class TestDistToSet:
    """Test point-to-set distances."""

    def test_member_is_zero(self, square):
        """Test the distance from a member is zero."""
        space = square.space
        s = SoftSet.from_sections(space.universe, space.params, {"e1": ["a"], "e2": ["b"]})
        assert dist_to_set(space, SoftPoint("b", "e2"), s).is_zero()

    def test_componentwise_minimum(self):
        """Test minimizers may differ per component."""
        space = incomparable_space()
        s = SoftSet.from_sections(space.universe, space.params, {"e1": ["b", "c"]})
        assert dist_to_set(space, SoftPoint("a", "e1"), s).to_list() == [1.0, 1.0]

    def test_null_target(self, square):
        """Test the null set has no distance."""
        with pytest.raises(SoftDomainError):
            dist_to_set(square.space, SoftPoint("a", "e1"), square.space.null())

    def test_analytic_ball_closed_form(self):
        """Test the closed form against the worked value 1 and a label scan."""
        space = sum_space([0.0, 1.0])
        target = ball(space, SoftPoint((0.0,), 0.0), SoftReal.constant(space.params, 1.0))
        query = SoftPoint((2.0,), 0.0)

        assert dist_to_set(space, query, target).sup() == pytest.approx(1.0, abs=1e-12)
        assert dist_to_set(space, query, target).sup() == pytest.approx(nearest_member_distance(space, query, target), abs=1e-6)

    def test_randomized_closed_form(self):
        """Test the closed form against a label scan on random balls with centers and queries off the seed labels."""
        rng = np.random.default_rng(5)
        for _ in range(10):
            values = sorted(rng.uniform(0.0, 2.0, size=3).tolist())
            space = sum_space(values, weight=float(rng.uniform(0.5, 2.0)))
            center = SoftPoint((float(rng.uniform(-1, 1)),), float(rng.uniform(-1.0, 3.0)))
            radius = SoftReal.constant(space.params, float(rng.uniform(0.5, 2.5)))
            target = ball(space, center, radius)
            query = SoftPoint((float(rng.uniform(-4, 4)),), float(rng.uniform(-1.0, 3.0)))

            brute = nearest_member_distance(space, query, target)

            assert dist_to_set(space, query, target).sup() == pytest.approx(brute, abs=1e-6)

    def test_members_off_the_seeds(self):
        """Test members and the center at labels between the seeds are at distance zero."""
        space = sum_space([0.0, 1.0])
        target = ball(space, SoftPoint((0.0,), "l0"), SoftReal.constant(space.params, 2.0))
        assert dist_to_set(space, SoftPoint((0.0,), 0.5), target).is_zero()

        center = SoftPoint((0.0,), 0.5)
        narrow = ball(space, center, SoftReal.constant(space.params, 0.2))
        assert dist_to_set(space, center, narrow).is_zero()
        assert dist_to_set(space, SoftPoint((1.0,), 0.5), narrow).sup() == pytest.approx(0.8, abs=1e-12)

    def test_singleton_and_monotone(self):
        """Test d(p, {q}) = d(p, q) and larger sets are nearer."""
        rng = np.random.default_rng(11)
        space = random_repaired_space(rng)
        points = space.points()
        for p in points:
            for q in points:
                single = SoftSet.from_points(space.universe, space.params, [q])
                assert dist_to_set(space, p, single) == distance(space, p, q)
            small = SoftSet.from_points(space.universe, space.params, points[:2])
            large = SoftSet.from_points(space.universe, space.params, points[:5])
            assert np.all(dist_to_set(space, p, large).entries <= dist_to_set(space, p, small).entries)


class TestSequences:
    """Test Cauchy tails and limits."""

    def halving(self, n=40):
        return [SoftPoint((0.5 ** k,), "e1") for k in range(n)]

    def test_cauchy_tail_shrinks(self, load_fixture):
        """Test the tail width of x/2^k shrinks."""
        space = load_fixture("banach_half.json").space
        seq = self.halving()
        assert cauchy_tail(space, seq, 10).sup() < cauchy_tail(space, seq, 0).sup()
        assert cauchy_tail(space, seq[:1]).is_zero()

    def test_converges_to_zero(self, load_fixture):
        """Test x/2^k converges to 0 and not to 1."""
        space = load_fixture("banach_half.json").space
        seq = self.halving()
        assert converges_to(space, seq, SoftPoint((0.0,), "e1"), 1e-9)
        assert not converges_to(space, seq, SoftPoint((1.0,), "e1"), 1e-9)

    def test_limit_unique(self, load_fixture):
        """Test two accepted limits coincide within 2 tol."""
        space = load_fixture("banach_half.json").space
        seq = self.halving()
        assert limit_is_unique(space, seq, SoftPoint((0.0,), "e1"), SoftPoint((1e-13,), "e1"), 1e-9)

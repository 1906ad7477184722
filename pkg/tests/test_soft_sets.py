"""Tests for soft sets, soft points and the point decomposition."""
import functools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from core.exceptions import SoftDomainError
from softspace.soft_reals import ParamSet
from softspace.soft_sets import SetOp, SoftPoint, SoftSet, Universe, ss_algebra, ss_decompose, ss_membership

UNIVERSE = Universe.finite(["a", "b", "c", "d", "e"])
PARAMS = ParamSet.of(["e1", "e2", "e3"])


@st.composite
def soft_sets(draw):
    """Random soft set over 5 elements x 3 labels."""
    sections = {
        label: draw(st.sets(st.sampled_from(UNIVERSE.elements)))
        for label in PARAMS.labels
    }
    return SoftSet.from_sections(UNIVERSE, PARAMS, sections)


def union_all(points):
    return functools.reduce(
        lambda acc, p: acc.union(SoftSet.from_points(UNIVERSE, PARAMS, [p])),
        points,
        SoftSet.null(UNIVERSE, PARAMS),
    )


class TestSoftPoint:
    """Test soft point identity."""

    def test_equal_iff_element_and_label_agree(self):
        """Test points differ when either element or label differs."""
        assert SoftPoint("a", "e1") == SoftPoint("a", "e1")
        assert SoftPoint("a", "e1") != SoftPoint("a", "e2")
        assert SoftPoint("a", "e1") != SoftPoint("b", "e1")

    def test_str(self):
        """Test printable forms for symbolic and vector points."""
        assert str(SoftPoint("a", "e1")) == "a_e1"
        assert str(SoftPoint((0.5, 1.0), 2.0)) == "(0.5,1)_2"


class TestAlgebra:
    """Test sectionwise algebra."""

    def test_union_with_null(self):
        """Test null is the identity of union."""
        s = SoftSet.from_sections(UNIVERSE, PARAMS, {"e1": ["a"], "e3": ["b", "c"]})
        assert ss_algebra(SetOp.UNION, SoftSet.null(UNIVERSE, PARAMS), s) == s

    def test_complement_of_absolute(self):
        """Test the complement of the absolute set is null."""
        assert ss_algebra(SetOp.COMPLEMENT, SoftSet.absolute(UNIVERSE, PARAMS)).is_null()

    def test_intersect_sectionwise(self):
        """Test {e1:{a,b}, e2:{a}} intersect {e1:{b}, e2:{c}} = {e1:{b}, e2:{}}."""
        params = ParamSet.of(["e1", "e2"])
        left = SoftSet.from_sections(UNIVERSE, params, {"e1": ["a", "b"], "e2": ["a"]})
        right = SoftSet.from_sections(UNIVERSE, params, {"e1": ["b"], "e2": ["c"]})
        result = ss_algebra(SetOp.INTERSECT, left, right)
        assert result.section("e1") == frozenset({"b"})
        assert result.section("e2") == frozenset()

    def test_mismatched_frames(self):
        """Test operands over different parameter sets are rejected."""
        other = SoftSet.null(UNIVERSE, ParamSet.of(["e1"]))
        with pytest.raises(SoftDomainError):
            ss_algebra(SetOp.UNION, SoftSet.null(UNIVERSE, PARAMS), other)

    def test_complement_takes_one_operand(self):
        """Test complement with a second operand is an error."""
        s = SoftSet.null(UNIVERSE, PARAMS)
        with pytest.raises(SoftDomainError):
            ss_algebra(SetOp.COMPLEMENT, s, s)

    def test_stray_elements_rejected(self):
        """Test sections must stay inside the universe."""
        with pytest.raises(SoftDomainError):
            SoftSet.from_sections(UNIVERSE, PARAMS, {"e1": ["z"]})

    @settings(max_examples=100, deadline=None)
    @given(soft_sets(), soft_sets())
    def test_de_morgan(self, a, b):
        """Test both De Morgan identities."""
        assert a.union(b).complement() == a.complement().intersect(b.complement())
        assert a.intersect(b).complement() == a.complement().union(b.complement())

    @settings(max_examples=100, deadline=None)
    @given(soft_sets(), soft_sets())
    def test_double_complement_and_difference(self, a, b):
        """Test A^cc = A and A \\ B = A intersect B^c."""
        assert a.complement().complement() == a
        assert a.difference(b) == a.intersect(b.complement())


class TestDecompose:
    """Test the point decomposition."""

    def test_single_section(self):
        """Test {e1:{a,b}} decomposes into a_e1 and b_e1."""
        s = SoftSet.from_sections(UNIVERSE, PARAMS, {"e1": ["b", "a"]})
        assert ss_decompose(s) == [SoftPoint("a", "e1"), SoftPoint("b", "e1")]

    def test_null(self):
        """Test the null set has no points."""
        assert ss_decompose(SoftSet.null(UNIVERSE, PARAMS)) == []

    def test_absolute_count(self):
        """Test the absolute set over 2 x 2 has 4 points, label-major."""
        universe = Universe.finite(["x", "y"])
        params = ParamSet.of(["e1", "e2"])
        points = ss_decompose(SoftSet.absolute(universe, params))
        assert points == [SoftPoint("x", "e1"), SoftPoint("y", "e1"), SoftPoint("x", "e2"), SoftPoint("y", "e2")]

    @settings(max_examples=100, deadline=None)
    @given(soft_sets())
    def test_round_trip(self, s):
        """Test the union of the decomposition reproduces the set."""
        assert union_all(ss_decompose(s)) == s

    def test_seeded_battery(self):
        """Test 100 seeded soft sets: laws and round trip hold exactly."""
        rng = np.random.default_rng(42)
        for _ in range(100):
            masks = rng.random((2, len(PARAMS), len(UNIVERSE))) < 0.5
            a, b = (
                SoftSet(UNIVERSE, PARAMS, tuple(
                    frozenset(e for e, keep in zip(UNIVERSE.elements, row) if keep) for row in mask
                ))
                for mask in masks
            )
            assert a.union(b).complement() == a.complement().intersect(b.complement())
            assert a.intersect(b).complement() == a.complement().union(b.complement())
            assert a.complement().complement() == a
            assert union_all(a.points()) == a


class TestMembership:
    """Test point membership."""

    def test_member(self):
        """Test a_e1 is in {e1:{a}}."""
        assert ss_membership(SoftSet.from_sections(UNIVERSE, PARAMS, {"e1": ["a"]}), SoftPoint("a", "e1"))

    def test_label_mismatch(self):
        """Test a_e2 is not in {e1:{a}}."""
        assert not ss_membership(SoftSet.from_sections(UNIVERSE, PARAMS, {"e1": ["a"]}), SoftPoint("a", "e2"))

    def test_absolute(self):
        """Test every point is in the absolute set."""
        absolute = SoftSet.absolute(UNIVERSE, PARAMS)
        assert all(SoftPoint(e, l) in absolute for e in UNIVERSE.elements for l in PARAMS.labels)

    @given(soft_sets())
    def test_membership_matches_decomposition(self, s):
        """Test membership agrees with the decomposition."""
        points = set(ss_decompose(s))
        for label in PARAMS.labels:
            for element in UNIVERSE.elements:
                p = SoftPoint(element, label)
                assert ss_membership(s, p) == (p in points)

"""Soft sets over a finite universe, soft points and the point decomposition."""
from dataclasses import dataclass
from enum import Enum
from typing import Dict, FrozenSet, Hashable, Iterable, List, Mapping, Optional, Tuple

from core.exceptions import SoftDomainError
from softspace.soft_reals import Label, ParamSet

Element = Hashable


@dataclass(frozen=True)
class Universe:
    """
    The initial universe X.

    Finite universes list their elements; analytic universes are R^dim and list nothing.
    """

    elements: Tuple[Element, ...] = ()
    dim: Optional[int] = None

    def __post_init__(self) -> None:
        if self.dim is None:
            if not self.elements:
                raise SoftDomainError("finite universe must not be empty")
            if len(set(self.elements)) != len(self.elements):
                raise SoftDomainError("universe elements must be unique")
        elif self.dim < 1:
            raise SoftDomainError("analytic universe needs dim >= 1")

    @classmethod
    def finite(cls, elements: Iterable[Element]) -> "Universe":
        return cls(elements=tuple(elements))

    @classmethod
    def euclidean(cls, dim: int) -> "Universe":
        return cls(dim=dim)

    @property
    def is_finite(self) -> bool:
        return self.dim is None

    def __len__(self) -> int:
        if not self.is_finite:
            raise SoftDomainError("analytic universe has no finite size")
        return len(self.elements)

    def __contains__(self, element: object) -> bool:
        if self.is_finite:
            return element in self.elements
        return isinstance(element, tuple) and len(element) == self.dim

    def index(self, element: Element) -> int:
        try:
            return self.elements.index(element)
        except ValueError:
            raise SoftDomainError(f"unknown universe element {element!r}") from None


@dataclass(frozen=True)
class SoftPoint:
    """
    A soft point: one element tagged with one parameter label.

    Two soft points are equal iff both the element and the label agree.
    """

    element: Element
    label: Label

    def __str__(self) -> str:
        element = self.element
        if isinstance(element, tuple):
            element = "(" + ",".join(f"{c:g}" for c in element) + ")"
        label = f"{self.label:g}" if isinstance(self.label, float) else self.label
        return f"{element}_{label}"


class SetOp(str, Enum):
    """Soft set algebra operations."""

    UNION = "union"
    INTERSECT = "intersect"
    DIFF = "diff"
    COMPLEMENT = "complement"


@dataclass(frozen=True)
class SoftSet:
    """
    A soft set (F, E): one section of the universe per parameter label.

    Sections are stored in parameter order; absent labels are empty sections.
    """

    universe: Universe
    params: ParamSet
    sections: Tuple[FrozenSet[Element], ...]

    def __post_init__(self) -> None:
        if not self.universe.is_finite:
            raise SoftDomainError("soft sets live on finite universes only")
        if len(self.sections) != len(self.params):
            raise SoftDomainError("one section per parameter label is required")
        members = set(self.universe.elements)
        for label, section in zip(self.params.labels, self.sections):
            stray = set(section) - members
            if stray:
                raise SoftDomainError(f"section {label!r} has elements outside the universe: {sorted(map(str, stray))}")

    @classmethod
    def from_sections(cls, universe: Universe, params: ParamSet, sections: Mapping[Label, Iterable[Element]]) -> "SoftSet":
        """Build from a label -> elements mapping; missing labels get empty sections."""
        for label in sections:
            params.index(label)
        return cls(universe, params, tuple(frozenset(sections.get(label, ())) for label in params.labels))

    @classmethod
    def null(cls, universe: Universe, params: ParamSet) -> "SoftSet":
        return cls(universe, params, tuple(frozenset() for _ in params.labels))

    @classmethod
    def absolute(cls, universe: Universe, params: ParamSet) -> "SoftSet":
        everything = frozenset(universe.elements)
        return cls(universe, params, tuple(everything for _ in params.labels))

    @classmethod
    def from_points(cls, universe: Universe, params: ParamSet, points: Iterable[SoftPoint]) -> "SoftSet":
        """Union of soft points."""
        buckets: Dict[Label, set] = {label: set() for label in params.labels}
        for point in points:
            if point.label not in buckets:
                raise SoftDomainError(f"unknown parameter label {point.label!r}")
            buckets[point.label].add(point.element)
        return cls.from_sections(universe, params, buckets)

    def section(self, label: Label) -> FrozenSet[Element]:
        return self.sections[self.params.index(label)]

    def is_null(self) -> bool:
        return not any(self.sections)

    def is_absolute(self) -> bool:
        return all(len(s) == len(self.universe.elements) for s in self.sections)

    def issubset(self, other: "SoftSet") -> bool:
        _require_same_frame(self, other)
        return all(a <= b for a, b in zip(self.sections, other.sections))

    def points(self) -> List[SoftPoint]:
        return ss_decompose(self)

    def __contains__(self, point: object) -> bool:
        return isinstance(point, SoftPoint) and ss_membership(self, point)

    def __len__(self) -> int:
        return sum(len(s) for s in self.sections)

    def union(self, other: "SoftSet") -> "SoftSet":
        return ss_algebra(SetOp.UNION, self, other)

    def intersect(self, other: "SoftSet") -> "SoftSet":
        return ss_algebra(SetOp.INTERSECT, self, other)

    def difference(self, other: "SoftSet") -> "SoftSet":
        return ss_algebra(SetOp.DIFF, self, other)

    def complement(self) -> "SoftSet":
        return ss_algebra(SetOp.COMPLEMENT, self)

    def describe(self) -> Dict[str, List[str]]:
        """Sections as sorted string lists, keyed by label."""
        return {str(label): sorted(str(e) for e in section) for label, section in zip(self.params.labels, self.sections)}


def _require_same_frame(a: SoftSet, b: SoftSet) -> None:
    if a.universe != b.universe or a.params != b.params:
        raise SoftDomainError("soft sets are over different universes or parameter sets")


def ss_algebra(mode: SetOp, a: SoftSet, b: Optional[SoftSet] = None) -> SoftSet:
    """
    Sectionwise soft set algebra.

    With one shared parameter set the three-case union rule is plain sectionwise union.

    Args:
        mode: union, intersect, diff or complement
        a: First operand
        b: Second operand; must be omitted for complement
    """
    mode = SetOp(mode)
    if mode is SetOp.COMPLEMENT:
        if b is not None:
            raise SoftDomainError("complement takes a single operand")
        everything = frozenset(a.universe.elements)
        return SoftSet(a.universe, a.params, tuple(everything - s for s in a.sections))

    if b is None:
        raise SoftDomainError(f"{mode.value} needs two operands")
    _require_same_frame(a, b)
    if mode is SetOp.UNION:
        sections = tuple(x | y for x, y in zip(a.sections, b.sections))
    elif mode is SetOp.INTERSECT:
        sections = tuple(x & y for x, y in zip(a.sections, b.sections))
    else:
        sections = tuple(x - y for x, y in zip(a.sections, b.sections))
    return SoftSet(a.universe, a.params, sections)


def ss_decompose(s: SoftSet) -> List[SoftPoint]:
    """Soft points of s, label-major in parameter order, elements in universe order."""
    points = []
    for label, section in zip(s.params.labels, s.sections):
        for element in s.universe.elements:
            if element in section:
                points.append(SoftPoint(element, label))
    return points


def ss_membership(s: SoftSet, p: SoftPoint) -> bool:
    """True iff p.element lies in the section of p.label."""
    if p.label not in s.params:
        return False
    return p.element in s.section(p.label)

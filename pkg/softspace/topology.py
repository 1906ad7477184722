"""Topology induced by a soft metric: openness, closure/interior/boundary, normal separation."""
from dataclasses import dataclass
from enum import Enum
from typing import Any, Dict, List, Optional, Tuple

import numpy as np

from core.config import get_settings
from core.exceptions import DegenerateGeometryError, PreconditionError, SoftDomainError
from core.logging import logger
from softspace.metric import (
    BallComplement,
    Region,
    SoftBall,
    SoftMetricSpace,
    ball,
    dist_to_set,
    project,
)
from softspace.soft_reals import SoftReal
from softspace.soft_sets import SoftPoint, SoftSet

settings = get_settings()


class RegionKind(str, Enum):
    CLOSURE = "closure"
    INTERIOR = "interior"
    BOUNDARY = "boundary"


@dataclass(frozen=True)
class OpenVerdict:
    """Whether a soft set is open, with the radius used per point or the failing point."""

    is_open: bool
    witness: Optional[SoftPoint] = None
    radii: Tuple[Tuple[SoftPoint, SoftReal], ...] = ()

    def __bool__(self) -> bool:
        return self.is_open


def _interior_radius(space: SoftMetricSpace, p: SoftPoint, outside: SoftSet) -> Optional[SoftReal]:
    """A radius whose open ball around p misses every point outside the set, if one exists."""
    if outside.is_null():
        return SoftReal.one(space.params)
    half_gap = dist_to_set(space, p, outside) * 0.5
    if half_gap.is_positive():
        return half_gap
    # Componentwise minimum can vanish; fall back to a constant radius from the sup-components.
    sups = [space.distance(p, q).sup() for q in outside.points()]
    nearest = min(sups)
    if nearest <= 0:
        return None
    return SoftReal.constant(space.params, nearest / 2)


def is_open(space: SoftMetricSpace, s: SoftSet) -> OpenVerdict:
    """
    Check that every soft point of s has an open ball around it inside s.

    The null set is open. On a failure the offending point is returned as witness.
    """
    space._table_backend()
    outside = s.complement()
    radii = []
    for p in s.points():
        radius = _interior_radius(space, p, outside)
        if radius is None or not ball(space, p, radius).to_soft_set().issubset(s):
            return OpenVerdict(False, witness=p)
        radii.append((p, radius))
    return OpenVerdict(True, radii=tuple(radii))


def is_closed(space: SoftMetricSpace, s: SoftSet) -> bool:
    """A soft set is closed when its complement is open."""
    return is_open(space, s.complement()).is_open


def _complement_of(target: Region) -> Region:
    if isinstance(target, SoftSet):
        return target.complement()
    if isinstance(target, SoftBall):
        return target.complement()
    return target.ball


def _is_null(space: SoftMetricSpace, target: Region) -> bool:
    if isinstance(target, SoftSet):
        return target.is_null()
    if space.is_tabulated:
        return target.to_soft_set().is_null()
    return False


def region_membership(
    space: SoftMetricSpace,
    s: Region,
    p: SoftPoint,
    region: RegionKind,
    margin: Optional[float] = None,
) -> bool:
    """
    Closure, interior or boundary membership via point-to-set distances.

    closure:  d(p, S) = 0
    interior: d(p, S^c) > 0 in every component
    boundary: d(p, S) = 0 and d(p, S^c) = 0

    Args:
        space: Ambient space
        s: Soft set (tabulated) or ball descriptor (analytic)
        p: Query point
        region: Which region to test
        margin: Zero tolerance; exact on tabulated spaces, eta on analytic ones by default
    """
    region = RegionKind(region)
    if margin is None:
        margin = 0.0 if space.is_tabulated else settings.comparison_margin
    outside = _complement_of(s)

    in_closure = not _is_null(space, s) and dist_to_set(space, p, s).is_zero(margin)
    if _is_null(space, outside):
        in_interior = True
        touches_outside = False
    else:
        to_outside = dist_to_set(space, p, outside)
        in_interior = to_outside.is_positive(margin)
        touches_outside = to_outside.is_zero(margin)

    if region is RegionKind.CLOSURE:
        return in_closure
    if region is RegionKind.INTERIOR:
        return in_interior
    return in_closure and touches_outside


def _region_set(space: SoftMetricSpace, s: SoftSet, region: RegionKind) -> SoftSet:
    members = [p for p in space.points() if region_membership(space, s, p, region)]
    return SoftSet.from_points(space.universe, space.params, members)


def closure(space: SoftMetricSpace, s: SoftSet) -> SoftSet:
    return _region_set(space, s, RegionKind.CLOSURE)


def interior(space: SoftMetricSpace, s: SoftSet) -> SoftSet:
    return _region_set(space, s, RegionKind.INTERIOR)


def boundary(space: SoftMetricSpace, s: SoftSet) -> SoftSet:
    return _region_set(space, s, RegionKind.BOUNDARY)


def is_open_sectionwise(space: SoftMetricSpace, s: SoftSet) -> bool:
    """
    Openness computed parameter by parameter from the projected metrics.

    Each section must be open in (X, d_l): every element keeps a positive gap to the
    elements outside the section.
    """
    elements = space.universe.elements
    for label in space.params.labels:
        matrix = project(space, label).matrix()
        section = s.section(label)
        inside = np.array([e in section for e in elements])
        if not inside.any() or inside.all():
            continue
        gaps = matrix[np.ix_(inside, ~inside)]
        if np.any(gaps.min(axis=1) <= 0):
            return False
    return True


@dataclass(frozen=True)
class Separation:
    """Disjoint open sets U, V around two disjoint closed sets."""

    u: SoftSet
    v: SoftSet
    radii_u: Tuple[Tuple[SoftPoint, SoftReal], ...]
    radii_v: Tuple[Tuple[SoftPoint, SoftReal], ...]

    def summary(self) -> Dict[str, Any]:
        return {
            "U": self.u.describe(),
            "V": self.v.describe(),
            "radii_U": {str(p): r.to_list() for p, r in self.radii_u},
            "radii_V": {str(p): r.to_list() for p, r in self.radii_v},
        }


def _ball_union(space: SoftMetricSpace, centers: SoftSet, other: SoftSet) -> Tuple[SoftSet, List[Tuple[SoftPoint, SoftReal]]]:
    union = space.null()
    radii = []
    for p in centers.points():
        eps = dist_to_set(space, p, other)
        if not eps.is_positive():
            raise DegenerateGeometryError(f"separation radius at {p} has a zero component: {eps.to_list()}")
        radius = eps / 3.0
        union = union.union(ball(space, p, radius).to_soft_set())
        radii.append((p, radius))
    return union, radii


def separate_closed_sets(space: SoftMetricSpace, f1: SoftSet, f2: SoftSet) -> Separation:
    """
    Separate two disjoint closed soft sets by unions of open balls.

    Each point of F1 gets the ball of radius d(p, F2) / 3, each point of F2 the ball
    of radius d(q, F1) / 3.

    Raises:
        PreconditionError: Null or overlapping inputs
        DegenerateGeometryError: A radius with a zero component
    """
    space._table_backend()
    if f1.is_null() or f2.is_null():
        raise PreconditionError("both closed sets must be non-null")
    try:
        overlap = f1.intersect(f2)
    except SoftDomainError as exc:
        raise PreconditionError(str(exc)) from exc
    if not overlap.is_null():
        raise PreconditionError(f"closed sets overlap at {[str(p) for p in overlap.points()]}")

    u, radii_u = _ball_union(space, f1, f2)
    v, radii_v = _ball_union(space, f2, f1)
    logger.info("Closed sets separated", extra={"u_points": len(u), "v_points": len(v)})
    return Separation(u, v, tuple(radii_u), tuple(radii_v))


__all__ = [
    "BallComplement",
    "OpenVerdict",
    "RegionKind",
    "Separation",
    "boundary",
    "closure",
    "interior",
    "is_closed",
    "is_open",
    "is_open_sectionwise",
    "region_membership",
    "separate_closed_sets",
]

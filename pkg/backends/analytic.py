"""Analytic backend: soft distances evaluated from a formula family on R^n."""
import math
from dataclasses import dataclass
from enum import Enum
from numbers import Real
from typing import Any, Dict, Optional, Sequence

import numpy as np

from backends.base import DistanceBackend
from core.exceptions import SoftDomainError
from softspace.soft_reals import ParamSet, SoftReal
from softspace.soft_sets import SoftPoint, Universe


class MetricFamily(str, Enum):
    SUM = "sum"
    POWER = "power"


class ParamKind(str, Enum):
    ABS_DIFF = "abs_diff"
    CAPPED_ABS_DIFF = "capped_abs_diff"


class PointKind(str, Enum):
    EUCLIDEAN = "euclidean"
    DISCRETE = "discrete"


@dataclass(frozen=True)
class MetricDescriptor:
    """
    Formula family for an analytic soft metric.

    sum:   w * rho_E(v(l), v(m)) + rho_X(x, y)
    power: rho_X(x, y) ** (1 + w * rho_E(v(l), v(m)))

    The power family is not a soft metric; it exists so the axiom checker can reject it.
    """

    family: MetricFamily = MetricFamily.SUM
    param_kind: ParamKind = ParamKind.ABS_DIFF
    weight: float = 1.0
    cap: Optional[float] = None
    point_kind: PointKind = PointKind.EUCLIDEAN

    def __post_init__(self) -> None:
        if not (math.isfinite(self.weight) and self.weight > 0):
            raise SoftDomainError("metric weight must be a positive finite number")
        if self.param_kind is ParamKind.CAPPED_ABS_DIFF:
            if self.cap is None or not (math.isfinite(self.cap) and self.cap > 0):
                raise SoftDomainError("capped_abs_diff needs a positive cap")

    def param_distance(self, u: float, v: float) -> float:
        gap = abs(u - v)
        if self.param_kind is ParamKind.CAPPED_ABS_DIFF:
            return min(gap, self.cap)
        return gap

    def point_distance(self, x: Sequence[float], y: Sequence[float]) -> float:
        if self.point_kind is PointKind.DISCRETE:
            return 0.0 if tuple(x) == tuple(y) else 1.0
        return float(np.linalg.norm(np.subtract(x, y)))

    def evaluate(self, x: Sequence[float], u: float, y: Sequence[float], v: float) -> float:
        """Scalar value of the soft distance between x_u and y_v."""
        rho = self.point_distance(x, y)
        if self.family is MetricFamily.POWER:
            return rho ** (1.0 + self.weight * self.param_distance(u, v))
        return self.weight * self.param_distance(u, v) + rho


class AnalyticBackend(DistanceBackend):
    """
    Soft metric on R^n evaluated on demand.

    Soft points carry raw numeric label values; the parameter set only seeds the
    labels and fixes the index of the (constant) soft reals returned.
    """

    name = "analytic"
    exhaustive = False

    def __init__(self, params: ParamSet, universe: Universe, descriptor: MetricDescriptor):
        """
        Initialize analytic backend.

        Args:
            params: Numeric parameter set
            universe: Analytic universe R^dim
            descriptor: Formula family
        """
        super().__init__(params, universe)
        if universe.is_finite:
            raise SoftDomainError("analytic spaces need a dimension, not an element list")
        if not params.is_numeric:
            raise SoftDomainError("analytic metrics reference numeric parameter values")
        self.descriptor = descriptor
        self.dim: int = universe.dim

    def label_value(self, label: Any) -> float:
        """Resolve a seed label or a raw number to a numeric label value."""
        if label in self.params.labels:
            return self.params.value_of(label)
        if isinstance(label, Real) and not isinstance(label, bool) and math.isfinite(label):
            return float(label)
        raise SoftDomainError(f"unknown parameter label {label!r}")

    def normalize(self, point: SoftPoint) -> SoftPoint:
        element = point.element
        if isinstance(element, Real) and not isinstance(element, bool):
            element = (element,)
        try:
            coords = tuple(float(c) for c in element)
        except TypeError:
            raise SoftDomainError(f"soft point element {element!r} is not a vector") from None
        if len(coords) != self.dim or not all(math.isfinite(c) for c in coords):
            raise SoftDomainError(f"soft point element {element!r} is not a finite {self.dim}-vector")
        return SoftPoint(coords, self.label_value(point.label))

    def scalar_distance(self, p: SoftPoint, q: SoftPoint) -> float:
        return self.descriptor.evaluate(p.element, p.label, q.element, q.label)

    def distance(self, p: SoftPoint, q: SoftPoint) -> SoftReal:
        return SoftReal.constant(self.params, self.scalar_distance(p, q))

    def describe(self) -> Dict[str, Any]:
        d = self.descriptor
        return {
            "backend": self.name,
            "dim": self.dim,
            "family": d.family.value,
            "param": {"kind": d.param_kind.value, "weight": d.weight, "cap": d.cap},
            "point": {"kind": d.point_kind.value},
        }

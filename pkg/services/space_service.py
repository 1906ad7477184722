"""Descriptor to runtime objects: spaces, mappings, soft points and soft sets."""
import itertools
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Union

import numpy as np

from backends.analytic import MetricDescriptor, MetricFamily, ParamKind, PointKind
from core.exceptions import SoftDomainError
from core.logging import logger
from schemas.descriptor import (
    AffineParamRecord,
    AffinePointRecord,
    DistanceEntry,
    RecipSumParamRecord,
    SpaceDescriptor,
    TabulatedSpace,
    parse_descriptor,
)
from softspace.mappings import (
    AffineParamMap,
    AffinePointMap,
    ReciprocalSumParamMap,
    SoftMapping,
    TableParamMap,
    TablePointMap,
)
from softspace.metric import Region, SoftMetricSpace, ball
from softspace.soft_reals import ParamSet, SoftReal
from softspace.soft_sets import SoftPoint, SoftSet, Universe


@dataclass(frozen=True)
class SpaceBundle:
    """A parsed descriptor with the space and mapping built from it."""

    descriptor: SpaceDescriptor
    space: SoftMetricSpace
    mapping: Optional[SoftMapping]

    def require_mapping(self) -> SoftMapping:
        if self.mapping is None:
            raise SoftDomainError("descriptor has no mapping section")
        return self.mapping


class SpaceService:
    """Builds spaces and mappings from descriptors and parses point/set specs."""

    @staticmethod
    def load(path: Union[str, Path]) -> SpaceBundle:
        """
        Read, validate and build a descriptor file.

        Args:
            path: JSON descriptor path

        Returns:
            Descriptor with its space and mapping
        """
        descriptor = parse_descriptor(Path(path).read_bytes())
        bundle = SpaceService.from_descriptor(descriptor)
        logger.info("Descriptor loaded", extra={"path": str(path), "backend": bundle.space.backend.name})
        return bundle

    @staticmethod
    def from_descriptor(descriptor: SpaceDescriptor) -> SpaceBundle:
        return SpaceBundle(descriptor, SpaceService.build_space(descriptor), SpaceService.build_mapping(descriptor))

    @staticmethod
    def params_of(descriptor: SpaceDescriptor) -> ParamSet:
        values = [p.value for p in descriptor.parameters]
        return ParamSet.of(descriptor.labels, None if any(v is None for v in values) else values)

    @staticmethod
    def raw_table(descriptor: SpaceDescriptor) -> np.ndarray:
        """
        Distance tensor in label-major soft point order.

        Missing reverse directions are mirrored; the diagonal is always zero.
        """
        space = descriptor.space
        if not isinstance(space, TabulatedSpace):
            raise SoftDomainError("only tabulated descriptors carry a distance table")
        points = [(e, l) for l in descriptor.labels for e in space.universe]
        index = {p: i for i, p in enumerate(points)}
        table = np.zeros((len(points), len(points), len(descriptor.labels)))
        given = np.zeros((len(points), len(points)), dtype=bool)
        for entry in space.distances:
            i, j = index[tuple(entry.p)], index[tuple(entry.q)]
            table[i, j] = entry.value
            given[i, j] = True
        table[np.arange(len(points)), np.arange(len(points))] = 0.0
        for i, j in zip(*np.nonzero(given & ~given.T)):
            table[j, i] = table[i, j]
        return table

    @staticmethod
    def build_space(descriptor: SpaceDescriptor) -> SoftMetricSpace:
        params = SpaceService.params_of(descriptor)
        space = descriptor.space
        if isinstance(space, TabulatedSpace):
            return SoftMetricSpace.tabulated(Universe.finite(space.universe), params, SpaceService.raw_table(descriptor))
        metric = space.metric
        return SoftMetricSpace.analytic(
            params,
            space.dim,
            MetricDescriptor(
                family=MetricFamily(metric.family),
                param_kind=ParamKind(metric.param.kind),
                weight=metric.param.weight,
                cap=metric.param.cap,
                point_kind=PointKind(metric.point.kind),
            ),
        )

    @staticmethod
    def build_mapping(descriptor: SpaceDescriptor) -> Optional[SoftMapping]:
        record = descriptor.mapping
        if record is None:
            return None
        if isinstance(record.f, AffinePointRecord):
            f = AffinePointMap(record.f.A, record.f.b)
        else:
            f = TablePointMap(record.f.map)
        if isinstance(record.phi, AffineParamRecord):
            phi = AffineParamMap(record.phi.a, record.phi.c)
        elif isinstance(record.phi, RecipSumParamRecord):
            phi = ReciprocalSumParamMap()
        else:
            phi = TableParamMap(record.phi.map)
        return SoftMapping(f, phi)

    @staticmethod
    def to_descriptor(space: SoftMetricSpace, template: SpaceDescriptor) -> SpaceDescriptor:
        """Descriptor for a tabulated space, keeping the template's parameters and mapping."""
        backend = space._table_backend()
        entries = []
        for i, j in itertools.combinations(range(len(backend.points)), 2):
            p, q = backend.points[i], backend.points[j]
            entries.append(
                DistanceEntry(p=(str(p.element), str(p.label)), q=(str(q.element), str(q.label)), value=backend.table[i, j].tolist())
            )
        tabulated = TabulatedSpace(backend="tabulated", universe=[str(e) for e in space.universe.elements], distances=entries)
        return SpaceDescriptor(parameters=template.parameters, space=tabulated, mapping=template.mapping)

    @staticmethod
    def parse_point(space: SoftMetricSpace, spec: str) -> SoftPoint:
        """
        Parse "x1,x2,...@label" (analytic) or "element@label" (tabulated).

        Analytic labels may be parameter labels or raw numbers.
        """
        element_text, sep, label_text = spec.strip().rpartition("@")
        if not sep or not element_text or not label_text:
            raise SoftDomainError(f"point spec {spec!r} must look like element@label")
        if space.is_tabulated:
            return space.point(element_text, label_text)
        try:
            coords = tuple(float(c) for c in element_text.strip("()").split(","))
        except ValueError:
            raise SoftDomainError(f"point spec {spec!r} has non-numeric coordinates") from None
        label: Union[str, float] = label_text
        if label_text not in space.params:
            try:
                label = float(label_text)
            except ValueError:
                raise SoftDomainError(f"unknown parameter label {label_text!r}") from None
        return space.point(coords, label)

    @staticmethod
    def parse_radius(space: SoftMetricSpace, text: str) -> SoftReal:
        try:
            values = [float(v) for v in text.split(",")]
        except ValueError:
            raise SoftDomainError(f"radius {text!r} is not numeric") from None
        if len(values) == 1:
            return SoftReal.constant(space.params, values[0])
        return SoftReal(space.params, values)

    @staticmethod
    def parse_set(space: SoftMetricSpace, spec: str) -> Region:
        """
        Parse "label:e1,e2;label2:e3" or "ball(center;radius)" / "cball(center;radius)".

        Section lists are only available on tabulated spaces.
        """
        text = spec.strip()
        for prefix, closed in (("ball(", False), ("cball(", True)):
            if text.startswith(prefix) and text.endswith(")"):
                center_text, sep, radius_text = text[len(prefix):-1].rpartition(";")
                if not sep:
                    raise SoftDomainError(f"ball spec {spec!r} must look like ball(center;radius)")
                center = SpaceService.parse_point(space, center_text)
                return ball(space, center, SpaceService.parse_radius(space, radius_text), closed=closed)

        if not space.is_tabulated:
            raise SoftDomainError("analytic spaces only accept ball(...) set specs")
        sections: dict = {}
        for part in filter(None, (p.strip() for p in text.split(";"))):
            label, sep, members = part.partition(":")
            if not sep:
                raise SoftDomainError(f"set section {part!r} must look like label:e1,e2")
            label = label.strip()
            space.params.index(label)
            elements = [e.strip() for e in members.split(",") if e.strip()]
            for element in elements:
                space.universe.index(element)
            sections.setdefault(label, []).extend(elements)
        return SoftSet.from_sections(space.universe, space.params, sections)

    @staticmethod
    def parse_soft_set(space: SoftMetricSpace, spec: str) -> SoftSet:
        """Like parse_set, but balls are materialized; tabulated spaces only."""
        region = SpaceService.parse_set(space, spec)
        if isinstance(region, SoftSet):
            return region
        return region.to_soft_set()


__all__ = ["SpaceBundle", "SpaceService"]

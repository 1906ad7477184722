"""Seeded sampling of soft points on analytic spaces."""
from dataclasses import dataclass
from typing import TYPE_CHECKING, List, Optional, Tuple

import numpy as np

from backends.analytic import AnalyticBackend, MetricFamily, PointKind
from core.config import get_settings
from core.exceptions import SoftDomainError
from softspace.soft_sets import SoftPoint

if TYPE_CHECKING:
    from softspace.metric import SoftMetricSpace

settings = get_settings()


@dataclass(frozen=True)
class SamplePlan:
    """How many random soft points to draw, from which seed, inside which box."""

    samples: int
    seed: int
    box: float

    @classmethod
    def default(cls, samples: Optional[int] = None, seed: Optional[int] = None, box: Optional[float] = None) -> "SamplePlan":
        return cls(
            samples=settings.default_samples if samples is None else samples,
            seed=settings.default_seed if seed is None else seed,
            box=settings.sample_box if box is None else box,
        )

    def rng(self, offset: int = 0) -> np.random.Generator:
        return np.random.default_rng(self.seed + offset)


def _analytic(space: "SoftMetricSpace") -> AnalyticBackend:
    backend = space.backend
    if not isinstance(backend, AnalyticBackend):
        raise SoftDomainError("sampling is only defined on analytic spaces")
    return backend


def draw_points(space: "SoftMetricSpace", rng: np.random.Generator, n: int, box: float) -> List[SoftPoint]:
    """
    Draw n soft points with elements in [-box, box]^dim and seed labels.

    Half of the elements are rounded to integers so coincident elements occur.
    """
    backend = _analytic(space)
    coords = rng.uniform(-box, box, size=(n, backend.dim))
    rounded = rng.random(n) < 0.5
    coords[rounded] = np.round(coords[rounded])
    labels = rng.choice(np.asarray(space.params.values), size=n)
    return [SoftPoint(tuple(float(c) for c in row), float(v)) for row, v in zip(coords, labels)]


def draw_pairs(space: "SoftMetricSpace", plan: SamplePlan, offset: int = 0) -> List[Tuple[SoftPoint, SoftPoint]]:
    """Pairs where a third share the element, a third share the label and a third are free."""
    rng = plan.rng(offset)
    first = draw_points(space, rng, plan.samples, plan.box)
    second = draw_points(space, rng, plan.samples, plan.box)
    modes = rng.integers(0, 3, size=plan.samples)
    pairs = []
    for p, q, mode in zip(first, second, modes):
        if mode == 0:
            q = SoftPoint(p.element, q.label)
        elif mode == 1:
            q = SoftPoint(q.element, p.label)
        pairs.append((p, q))
    return pairs


def draw_triples(space: "SoftMetricSpace", plan: SamplePlan, offset: int = 1) -> List[Tuple[SoftPoint, SoftPoint, SoftPoint]]:
    """Triples whose later points copy the first point's element or label a third of the time each."""
    rng = plan.rng(offset)
    columns = [draw_points(space, rng, plan.samples, plan.box) for _ in range(3)]
    modes = rng.integers(0, 3, size=(plan.samples, 2))
    triples = []
    for a, b, c, (mb, mc) in zip(*columns, modes):
        if mb == 0:
            b = SoftPoint(a.element, b.label)
        elif mb == 1:
            b = SoftPoint(b.element, a.label)
        if mc == 0:
            c = SoftPoint(b.element, c.label)
        elif mc == 1:
            c = SoftPoint(c.element, a.label)
        triples.append((a, b, c))
    return triples


def _unit_vectors(rng: np.random.Generator, n: int, dim: int) -> np.ndarray:
    raw = rng.normal(size=(n, dim))
    norms = np.linalg.norm(raw, axis=1, keepdims=True)
    norms[norms == 0] = 1.0
    return raw / norms


def sample_near(
    space: "SoftMetricSpace",
    center: SoftPoint,
    radius: float,
    rng: np.random.Generator,
    n: int,
) -> List[SoftPoint]:
    """
    Sample soft points q with d(center, q) <= radius.

    The center itself is always the first sample. Candidates are built by splitting
    the radius between a label offset and an element offset, then filtered by the
    actual distance.
    """
    backend = _analytic(space)
    center = backend.normalize(center)
    descriptor = backend.descriptor
    if radius < 0:
        raise SoftDomainError("sampling radius must be non-negative")

    dirs = _unit_vectors(rng, n, backend.dim)
    split = rng.random(n)
    signs = rng.choice([-1.0, 1.0], size=n)
    scale = rng.random(n)

    samples = [center]
    for k in range(n):
        if descriptor.family is MetricFamily.POWER:
            label_offset = 0.0
            point_share = radius
        else:
            param_share = split[k] * radius
            label_offset = signs[k] * param_share / descriptor.weight
            point_share = radius - param_share
        if descriptor.point_kind is PointKind.DISCRETE:
            element = center.element
        else:
            element = tuple(float(c) for c in np.asarray(center.element) + dirs[k] * point_share * scale[k])
        candidate = SoftPoint(element, center.label + label_offset)
        if backend.scalar_distance(center, candidate) <= radius:
            samples.append(candidate)
    return samples

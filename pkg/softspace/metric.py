"""Soft metric spaces: distances, axiom verification, repair, projections, balls and set distances."""
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Any, Dict, Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np

from backends.analytic import AnalyticBackend, MetricDescriptor, MetricFamily, ParamKind, PointKind
from backends.base import DistanceBackend
from backends.tabulated import TabulatedBackend
from core.config import get_settings
from core.exceptions import SoftDomainError
from core.logging import logger
from softspace.sampling import SamplePlan, draw_pairs, draw_points, draw_triples
from softspace.soft_reals import Label, ParamSet, SoftReal, sr_compare
from softspace.soft_sets import Element, SoftPoint, SoftSet, Universe

settings = get_settings()

AXIOMS = ("M1", "M2", "M3", "M4")


@dataclass(frozen=True)
class SoftMetricSpace:
    """A parameter set and a universe together with a distance backend."""

    backend: DistanceBackend

    @classmethod
    def tabulated(cls, universe: Universe, params: ParamSet, table: np.ndarray) -> "SoftMetricSpace":
        return cls(TabulatedBackend(params, universe, table))

    @classmethod
    def analytic(cls, params: ParamSet, dim: int, descriptor: MetricDescriptor) -> "SoftMetricSpace":
        return cls(AnalyticBackend(params, Universe.euclidean(dim), descriptor))

    @property
    def params(self) -> ParamSet:
        return self.backend.params

    @property
    def universe(self) -> Universe:
        return self.backend.universe

    @property
    def is_tabulated(self) -> bool:
        return isinstance(self.backend, TabulatedBackend)

    def point(self, element: Any, label: Label) -> SoftPoint:
        """Build a canonical soft point of this space."""
        return self.backend.normalize(SoftPoint(element, label))

    def points(self) -> Tuple[SoftPoint, ...]:
        """All soft points of a tabulated space, label-major."""
        return self._table_backend().points

    def absolute(self) -> SoftSet:
        return SoftSet.absolute(self.universe, self.params)

    def null(self) -> SoftSet:
        return SoftSet.null(self.universe, self.params)

    def distance(self, p: SoftPoint, q: SoftPoint) -> SoftReal:
        return distance(self, p, q)

    def _table_backend(self) -> TabulatedBackend:
        if not isinstance(self.backend, TabulatedBackend):
            raise SoftDomainError("operation needs a tabulated space")
        return self.backend

    def _analytic_backend(self) -> AnalyticBackend:
        if not isinstance(self.backend, AnalyticBackend):
            raise SoftDomainError("operation needs an analytic space")
        return self.backend


def distance(space: SoftMetricSpace, p: SoftPoint, q: SoftPoint) -> SoftReal:
    """
    Soft distance between two soft points of a space.

    Raises:
        SoftDomainError: Unknown element or label
    """
    backend = space.backend
    return backend.distance(backend.normalize(p), backend.normalize(q))


# --------------------------------------------------------------------------- axioms


@dataclass(frozen=True)
class AxiomViolation:
    """One failed soft metric axiom with its witness."""

    axiom: str
    witness: Tuple[SoftPoint, ...]
    label: Label
    excess: float
    detail: str

    def summary(self) -> Dict[str, Any]:
        return {
            "axiom": self.axiom,
            "witness": [str(p) for p in self.witness],
            "label": str(self.label),
            "excess": self.excess,
            "detail": self.detail,
        }


@dataclass(frozen=True)
class AxiomReport:
    """Outcome of an axiom check; an empty violation list means verified or not falsified."""

    violations: Tuple[AxiomViolation, ...]
    counts: Dict[str, int]
    exhaustive: bool
    pairs_checked: int
    triples_checked: int
    margin: float

    @property
    def holds(self) -> bool:
        return not any(self.counts.values())

    @property
    def violated_axioms(self) -> List[str]:
        return [axiom for axiom in AXIOMS if self.counts.get(axiom)]

    @property
    def verdict(self) -> str:
        if not self.holds:
            return "violated"
        if self.exhaustive:
            return "verified"
        return f"not falsified at {self.pairs_checked} pair and {self.triples_checked} triple samples"

    def first(self, axiom: str) -> Optional[AxiomViolation]:
        return next((v for v in self.violations if v.axiom == axiom), None)

    def summary(self) -> Dict[str, Any]:
        return {
            "verdict": self.verdict,
            "exhaustive": self.exhaustive,
            "pairs_checked": self.pairs_checked,
            "triples_checked": self.triples_checked,
            "margin": self.margin,
            "violation_counts": dict(self.counts),
            "violations": [v.summary() for v in self.violations],
        }


def _collect(found: Iterable[AxiomViolation], limit: int) -> Tuple[Tuple[AxiomViolation, ...], Dict[str, int]]:
    counts = {axiom: 0 for axiom in AXIOMS}
    kept: Dict[str, List[AxiomViolation]] = {axiom: [] for axiom in AXIOMS}
    for violation in found:
        counts[violation.axiom] += 1
        if len(kept[violation.axiom]) < limit:
            kept[violation.axiom].append(violation)
    ordered = tuple(v for axiom in AXIOMS for v in kept[axiom])
    return ordered, counts


def _triangle_slice(table: np.ndarray, j: int, margin: float) -> np.ndarray:
    via = table[:, j, None, :] + table[None, j, :, :]
    hits = np.argwhere(table > via + margin)
    return np.column_stack([hits[:, 0], np.full(len(hits), j), hits[:, 1], hits[:, 2]]) if len(hits) else np.empty((0, 4), dtype=int)


def _check_table(backend: TabulatedBackend, margin: float, limit: int) -> AxiomReport:
    table = backend.table
    points = backend.points
    labels = backend.params.labels
    size = len(points)
    found: List[AxiomViolation] = []

    for i, j, k in np.argwhere(table < -margin):
        found.append(AxiomViolation("M1", (points[i], points[j]), labels[k], float(-table[i, j, k]),
                                    f"d({points[i]}, {points[j]}) is negative"))

    for i, k in np.argwhere(np.abs(table[np.arange(size), np.arange(size)]) > margin):
        found.append(AxiomViolation("M2", (points[i], points[i]), labels[k], float(abs(table[i, i, k])),
                                    f"d({points[i]}, {points[i]}) is not zero"))
    zero = np.all(np.abs(table) <= margin, axis=2)
    # one witness per unordered pair, in whichever direction vanishes
    for i, j in np.argwhere(np.triu(zero | zero.T, k=1)):
        a, b = (i, j) if zero[i, j] else (j, i)
        found.append(AxiomViolation("M2", (points[a], points[b]), labels[0], 0.0,
                                    f"d({points[a]}, {points[b]}) = 0 for distinct soft points"))

    gap = np.abs(table - table.transpose(1, 0, 2))
    for i, j, k in np.argwhere(gap > margin):
        if i < j:
            found.append(AxiomViolation("M3", (points[i], points[j]), labels[k], float(gap[i, j, k]),
                                        f"d({points[i]}, {points[j]}) != d({points[j]}, {points[i]})"))

    with ThreadPoolExecutor(max_workers=settings.max_workers) as executor:
        slices = list(executor.map(lambda j: _triangle_slice(table, j, margin), range(size)))
    hits = np.concatenate(slices) if slices else np.empty((0, 4), dtype=int)
    if len(hits):
        hits = hits[np.lexsort((hits[:, 3], hits[:, 2], hits[:, 1], hits[:, 0]))]
    for a, b, c, k in hits:
        excess = float(table[a, c, k] - table[a, b, k] - table[b, c, k])
        found.append(AxiomViolation("M4", (points[a], points[b], points[c]), labels[k], excess,
                                    f"d({points[a]}, {points[c]}) > d({points[a]}, {points[b]}) + d({points[b]}, {points[c]})"))

    violations, counts = _collect(found, limit)
    return AxiomReport(violations, counts, True, size * size, size ** 3, margin)


def _check_sampled(space: SoftMetricSpace, plan: SamplePlan, margin: float, limit: int) -> AxiomReport:
    backend = space._analytic_backend()
    label = space.params.labels[0]
    found: List[AxiomViolation] = []

    pairs = draw_pairs(space, plan)
    for p, q in pairs:
        d_pq = backend.scalar_distance(p, q)
        d_qp = backend.scalar_distance(q, p)
        if d_pq < -margin:
            found.append(AxiomViolation("M1", (p, q), label, -d_pq, f"d({p}, {q}) is negative"))
        if p == q and abs(d_pq) > margin:
            found.append(AxiomViolation("M2", (p, q), label, abs(d_pq), f"d({p}, {p}) is not zero"))
        if p != q and abs(d_pq) <= margin:
            found.append(AxiomViolation("M2", (p, q), label, 0.0, f"d({p}, {q}) = 0 for distinct soft points"))
        if abs(d_pq - d_qp) > margin:
            found.append(AxiomViolation("M3", (p, q), label, abs(d_pq - d_qp), f"d({p}, {q}) != d({q}, {p})"))

    triples = draw_triples(space, plan)
    for a, b, c in triples:
        for x, y, z in ((a, b, c), (b, c, a), (c, a, b)):
            excess = backend.scalar_distance(x, z) - backend.scalar_distance(x, y) - backend.scalar_distance(y, z)
            if excess > margin:
                found.append(AxiomViolation("M4", (x, y, z), label, excess,
                                            f"d({x}, {z}) > d({x}, {y}) + d({y}, {z})"))

    violations, counts = _collect(found, limit)
    return AxiomReport(violations, counts, False, len(pairs), len(triples), margin)


def check_axioms(
    space: SoftMetricSpace,
    plan: Optional[SamplePlan] = None,
    margin: Optional[float] = None,
) -> AxiomReport:
    """
    Check the soft metric axioms M1-M4.

    Tabulated spaces are checked exhaustively over all pairs and triples; analytic
    spaces over seeded samples. Violations must exceed the margin to be reported.

    Args:
        space: Space to check
        plan: Sampling plan for analytic spaces
        margin: eta; defaults to the configured comparison margin

    Returns:
        Axiom report with witnesses
    """
    margin = settings.comparison_margin if margin is None else margin
    limit = settings.max_reported_witnesses
    if space.is_tabulated:
        report = _check_table(space._table_backend(), margin, limit)
    else:
        report = _check_sampled(space, plan or SamplePlan.default(), margin, limit)

    logger.info(
        "Axiom check finished",
        extra={"backend": space.backend.name, "verdict": report.verdict, "counts": report.counts},
    )
    return report


# --------------------------------------------------------------------------- repair


def _min_plus_closure(table: np.ndarray) -> np.ndarray:
    closed = table.copy()
    for k in range(closed.shape[0]):
        closed = np.minimum(closed, closed[:, k, None, :] + closed[None, k, :, :])
    return closed


def repair_to_metric(
    table: np.ndarray,
    universe: Universe,
    params: ParamSet,
    bump_factor: Optional[float] = None,
) -> SoftMetricSpace:
    """
    Turn a raw non-negative distance table into a tabulated soft metric space.

    Zeroes the diagonal, symmetrizes by componentwise minimum, closes under the
    triangle inequality by min-plus closure, and bumps zero off-diagonal components
    to a small positive value before closing again.

    Args:
        table: Raw table of shape (|SP|, |SP|, |E|), label-major soft point order
        universe: Finite universe
        params: Parameter set
        bump_factor: Fraction of the smallest positive entry used for bumped zeros

    Raises:
        SoftDomainError: Negative, non-finite or misshaped input
    """
    bump_factor = settings.repair_bump_factor if bump_factor is None else bump_factor
    raw = np.array(table, dtype=float)
    size = len(universe) * len(params)
    if raw.shape != (size, size, len(params)):
        raise SoftDomainError(f"raw table has shape {raw.shape}, expected {(size, size, len(params))}")
    if not np.all(np.isfinite(raw)):
        raise SoftDomainError("raw table entries must be finite")
    if np.any(raw < 0):
        raise SoftDomainError("raw table entries must be non-negative")

    repaired = raw.copy()
    diagonal = np.arange(size)
    repaired[diagonal, diagonal] = 0.0
    repaired = np.minimum(repaired, repaired.transpose(1, 0, 2))
    repaired = _min_plus_closure(repaired)

    off_diagonal = ~np.eye(size, dtype=bool)[:, :, None]
    bumps = 0
    while True:
        zeros = (repaired == 0.0) & off_diagonal
        if not zeros.any():
            break
        positive = repaired[repaired > 0]
        smallest = float(positive.min()) if positive.size else 1.0
        repaired[zeros] = smallest * bump_factor
        repaired = _min_plus_closure(repaired)
        bumps += 1

    repaired = np.minimum(repaired, repaired.transpose(1, 0, 2))
    logger.info("Distance table repaired", extra={"soft_points": size, "bump_rounds": bumps})
    return SoftMetricSpace.tabulated(universe, params, repaired)


# --------------------------------------------------------------------------- projections


@dataclass(frozen=True)
class ParameterMetric:
    """The ordinary metric d_l(x, y) = d(x_l, y_l) evaluated at component l."""

    space: SoftMetricSpace
    label: Label
    value: Optional[float] = None

    def _label_for_points(self) -> Any:
        return self.label if self.value is None else self.value

    def __call__(self, x: Element, y: Element) -> float:
        at = self._label_for_points()
        d = distance(self.space, SoftPoint(x, at), SoftPoint(y, at))
        return float(d.entries[self.space.params.index(self.label)]) if self.value is None else d.inf()

    def matrix(self) -> np.ndarray:
        """Scalar distance matrix over a finite universe, rows in universe order."""
        backend = self.space._table_backend()
        elements = self.space.universe.elements
        k = self.space.params.index(self.label)
        idx = [backend.index_of(SoftPoint(e, self.label)) for e in elements]
        return backend.table[np.ix_(idx, idx, [k])][:, :, 0]


def project(space: SoftMetricSpace, label: Label) -> ParameterMetric:
    """
    Decompose a soft metric at one parameter.

    Raises:
        SoftDomainError: Unknown label
    """
    space.params.index(label)
    return ParameterMetric(space, label)


def project_at_value(space: SoftMetricSpace, value: float) -> ParameterMetric:
    """Projection of an analytic space at a raw numeric label value."""
    space._analytic_backend()
    return ParameterMetric(space, space.params.labels[0], float(value))


@dataclass(frozen=True)
class ScalarViolation:
    axiom: str
    witness: Tuple[Element, ...]
    excess: float


def _scalar_matrix_violations(matrix: np.ndarray, elements: Sequence[Element], margin: float) -> List[ScalarViolation]:
    found = []
    n = len(elements)
    for i in range(n):
        for j in range(n):
            d = matrix[i, j]
            if d < -margin:
                found.append(ScalarViolation("M1", (elements[i], elements[j]), float(-d)))
            if i == j and abs(d) > margin:
                found.append(ScalarViolation("M2", (elements[i],), float(abs(d))))
            if i != j and abs(d) <= margin:
                found.append(ScalarViolation("M2", (elements[i], elements[j]), 0.0))
            if i < j and abs(d - matrix[j, i]) > margin:
                found.append(ScalarViolation("M3", (elements[i], elements[j]), float(abs(d - matrix[j, i]))))
    via = matrix[:, :, None] + matrix[None, :, :]
    for a, b, c in np.argwhere(matrix[:, None, :] > via + margin):
        found.append(ScalarViolation("M4", (elements[a], elements[b], elements[c]),
                                     float(matrix[a, c] - via[a, b, c])))
    return found


def check_scalar_axioms(
    projection: ParameterMetric,
    plan: Optional[SamplePlan] = None,
    margin: Optional[float] = None,
) -> List[ScalarViolation]:
    """Ordinary metric axioms for a projection: exhaustive on tabulated spaces, sampled otherwise."""
    margin = settings.comparison_margin if margin is None else margin
    space = projection.space
    if space.is_tabulated:
        return _scalar_matrix_violations(projection.matrix(), space.universe.elements, margin)

    plan = plan or SamplePlan.default()
    rng = plan.rng(7)
    found = []
    columns = [draw_points(space, rng, plan.samples, plan.box) for _ in range(3)]
    for a, b, c in zip(*columns):
        x, y, z = a.element, b.element, c.element
        if rng.random() < 0.3:
            y = x
        d_xy, d_yx = projection(x, y), projection(y, x)
        if d_xy < -margin:
            found.append(ScalarViolation("M1", (x, y), -d_xy))
        if x != y and abs(d_xy) <= margin:
            found.append(ScalarViolation("M2", (x, y), 0.0))
        if x == y and abs(d_xy) > margin:
            found.append(ScalarViolation("M2", (x,), abs(d_xy)))
        if abs(d_xy - d_yx) > margin:
            found.append(ScalarViolation("M3", (x, y), abs(d_xy - d_yx)))
        excess = projection(x, z) - d_xy - projection(y, z)
        if excess > margin:
            found.append(ScalarViolation("M4", (x, y, z), excess))
    return found


# --------------------------------------------------------------------------- balls and set distances


@dataclass(frozen=True)
class SoftBall:
    """Open (strict in every component) or closed soft ball."""

    space: SoftMetricSpace
    center: SoftPoint
    radius: SoftReal
    closed: bool = False

    def contains(self, point: SoftPoint) -> bool:
        verdict = sr_compare(distance(self.space, self.center, point), self.radius)
        return verdict.le if self.closed else verdict.lt

    def __contains__(self, point: object) -> bool:
        return isinstance(point, SoftPoint) and self.contains(point)

    def to_soft_set(self) -> SoftSet:
        """Members of the ball on a tabulated space."""
        backend = self.space._table_backend()
        row = backend.distances_from(self.center)
        inside = np.all(row <= self.radius.entries if self.closed else row < self.radius.entries, axis=1)
        members = [p for p, keep in zip(backend.points, inside) if keep]
        return SoftSet.from_points(self.space.universe, self.space.params, members)

    def complement(self) -> "BallComplement":
        return BallComplement(self)

    def describe(self) -> str:
        kind = "closed" if self.closed else "open"
        return f"{kind} ball({self.center}; {self.radius.to_list()})"


@dataclass(frozen=True)
class BallComplement:
    """Soft points outside a ball."""

    ball: SoftBall

    def contains(self, point: SoftPoint) -> bool:
        return not self.ball.contains(point)

    def __contains__(self, point: object) -> bool:
        return isinstance(point, SoftPoint) and self.contains(point)

    def to_soft_set(self) -> SoftSet:
        return self.ball.to_soft_set().complement()


Region = Union[SoftSet, SoftBall, BallComplement]


def ball(space: SoftMetricSpace, center: SoftPoint, radius: SoftReal, closed: bool = False) -> SoftBall:
    """
    Soft ball around a center.

    An open ball with any zero radius component is empty.
    """
    if radius.params != space.params:
        raise SoftDomainError("ball radius is indexed by a different parameter set")
    if np.any(radius.entries < 0):
        raise SoftDomainError("ball radius must be non-negative")
    return SoftBall(space, space.point(center.element, center.label), radius, closed)


def _dist_to_members(space: SoftMetricSpace, p: SoftPoint, target: SoftSet) -> SoftReal:
    if target.is_null():
        raise SoftDomainError("distance to the null soft set is undefined")
    backend = space._table_backend()
    row = backend.distances_from(p)
    idx = [backend.index_of(q) for q in target.points()]
    return SoftReal(space.params, row[idx].min(axis=0))


def _sum_euclidean(space: SoftMetricSpace) -> AnalyticBackend:
    backend = space._analytic_backend()
    descriptor = backend.descriptor
    if descriptor.family is not MetricFamily.SUM or descriptor.point_kind is not PointKind.EUCLIDEAN:
        raise SoftDomainError("closed-form set distances need a sum-family space with a euclidean point part")
    return backend


def _label_candidates(descriptor: MetricDescriptor, seeds: Sequence[float], lam: float, kappa: float, r: float, rho: float) -> List[float]:
    """Kinks of the label term and of the section radius, together with the seed values."""
    w = descriptor.weight
    offsets = [0.0, r / w]
    if r > rho:
        offsets.append((r - rho) / w)
    candidates = list(seeds) + [lam]
    if descriptor.param_kind is ParamKind.CAPPED_ABS_DIFF:
        offsets.append(descriptor.cap)
        candidates += [lam - descriptor.cap, lam + descriptor.cap]
    candidates += [kappa + s for s in offsets] + [kappa - s for s in offsets]
    return candidates


def _dist_to_ball(space: SoftMetricSpace, p: SoftPoint, target: SoftBall) -> SoftReal:
    backend = _sum_euclidean(space)
    descriptor = backend.descriptor
    p = backend.normalize(p)
    c = target.center
    r = target.radius.inf()
    if r < 0 or (r == 0 and not target.closed):
        raise SoftDomainError(f"{target.describe()} has no members")
    rho = descriptor.point_distance(p.element, c.element)
    w = descriptor.weight

    # Labels range over the reals; the gap is piecewise linear in mu, so its infimum
    # over the sections with members sits on one of the candidates.
    best = math.inf
    for mu in _label_candidates(descriptor, space.params.values, p.label, c.label, r, rho):
        slack = r - w * descriptor.param_distance(c.label, mu)
        if slack < -1e-12 * max(1.0, r):
            continue
        gap = w * descriptor.param_distance(p.label, mu) + max(0.0, rho - max(slack, 0.0))
        best = min(best, gap)
    return SoftReal.constant(space.params, best)


def _dist_to_ball_complement(space: SoftMetricSpace, p: SoftPoint, target: BallComplement) -> SoftReal:
    _sum_euclidean(space)
    ball_ = target.ball
    p = space.point(p.element, p.label)
    if not ball_.contains(p):
        return SoftReal.zero(space.params)
    inside = distance(space, ball_.center, p).inf()
    return SoftReal.constant(space.params, max(0.0, ball_.radius.inf() - inside))


def dist_to_set(space: SoftMetricSpace, p: SoftPoint, target: Region) -> SoftReal:
    """
    Componentwise infimum of d(p, q) over the soft points q of a target.

    Tabulated targets are minimized directly. Analytic targets must be balls (or
    ball complements) in a sum-family euclidean space and use the closed form:
    the section of a ball B(c_k, r) at label m is a euclidean ball of radius
    r - w * rho_E(k, m), and m ranges over every real label value, not only the seeds.

    Raises:
        SoftDomainError: Null target or unsupported geometry
    """
    if space.is_tabulated:
        if isinstance(target, (SoftBall, BallComplement)):
            target = target.to_soft_set()
        return _dist_to_members(space, p, target)
    if isinstance(target, SoftBall):
        return _dist_to_ball(space, p, target)
    if isinstance(target, BallComplement):
        return _dist_to_ball_complement(space, p, target)
    raise SoftDomainError("analytic spaces only support ball-shaped targets")


# --------------------------------------------------------------------------- sequences


def cauchy_tail(space: SoftMetricSpace, seq: Sequence[SoftPoint], start: int = 0) -> SoftReal:
    """Componentwise maximum of d(x_i, x_j) over i, j >= start."""
    tail = list(seq[start:])
    widest = np.zeros(len(space.params))
    for i in range(len(tail)):
        for j in range(i + 1, len(tail)):
            widest = np.maximum(widest, distance(space, tail[i], tail[j]).entries)
    return SoftReal(space.params, widest)


def converges_to(
    space: SoftMetricSpace,
    seq: Sequence[SoftPoint],
    candidate: SoftPoint,
    tol: float,
    margin: Optional[float] = None,
) -> bool:
    """
    Finite-prefix convergence test.

    The last term must be within tol of the candidate (sup-component) and the
    distances to the candidate must not grow over the final quarter of the sequence.
    """
    margin = settings.comparison_margin if margin is None else margin
    if not seq:
        return False
    gaps = [distance(space, x, candidate).sup() for x in seq]
    tail = gaps[-max(2, len(gaps) // 4):]
    settling = all(b <= a + margin for a, b in zip(tail, tail[1:]))
    return gaps[-1] < tol and settling


def limit_is_unique(space: SoftMetricSpace, seq: Sequence[SoftPoint], a: SoftPoint, b: SoftPoint, tol: float) -> bool:
    """If the sequence converges to both candidates they coincide up to 2 * tol."""
    if not (converges_to(space, seq, a, tol) and converges_to(space, seq, b, tol)):
        return True
    return space.point(a.element, a.label) == space.point(b.element, b.label) or distance(space, a, b).sup() <= 2 * tol


"""Contraction coefficients, the certified Picard solver and fixed-point oracles."""
import itertools
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from enum import Enum
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np

from backends.analytic import MetricFamily
from core.config import get_settings
from core.exceptions import PreconditionError, RateViolationError, SoftDomainError
from core.logging import logger
from softspace.mappings import SoftMapping, apply_point
from softspace.metric import SoftMetricSpace, project, project_at_value
from softspace.sampling import SamplePlan, draw_pairs, draw_points
from softspace.soft_reals import Label, SoftReal, geometric_tail_bound, sr_compare
from softspace.soft_sets import SoftPoint

settings = get_settings()

Pair = Tuple[SoftPoint, SoftPoint]


class ContractionKind(str, Enum):
    BANACH = "banach"
    KANNAN = "kannan"
    CHATTERJEA = "chatterjea"

    @property
    def threshold(self) -> float:
        return 1.0 if self is ContractionKind.BANACH else 0.5


@dataclass(frozen=True)
class ContractionReport:
    """
    Estimated contraction coefficient for one class.

    Attributes:
        kind: Contraction class
        alpha_hat: Componentwise supremum of the condition ratio over evaluated pairs
        feasible: Every component below the class threshold minus the margin
        witness: Pair with the largest sup-component ratio, or the pair forcing infeasibility
        witness_ratio: Sup-component ratio of the witness (inf when forced)
        pairs_evaluated: Number of pairs evaluated
        exhaustive: All pairs of a finite space were evaluated
    """

    kind: ContractionKind
    alpha_hat: SoftReal
    feasible: bool
    witness: Optional[Pair]
    witness_ratio: float
    pairs_evaluated: int
    exhaustive: bool
    margin: float
    forced: bool = False

    @property
    def rate(self) -> SoftReal:
        """alpha for banach, alpha / (1 - alpha) for kannan and chatterjea."""
        if self.kind is ContractionKind.BANACH:
            return self.alpha_hat
        alpha = self.alpha_hat.entries
        if np.any(alpha >= 1.0):
            raise PreconditionError(f"{self.kind.value} coefficient reaches 1; no step rate exists")
        return SoftReal(self.alpha_hat.params, alpha / (1.0 - alpha))

    @property
    def verdict(self) -> str:
        if not self.feasible:
            return f"not a soft {self.kind.value} contraction"
        if self.exhaustive:
            return f"soft {self.kind.value} contraction"
        return f"not falsified at {self.pairs_evaluated} sampled pairs"

    def summary(self) -> Dict[str, Any]:
        return {
            "kind": self.kind.value,
            "alpha_hat": self.alpha_hat.to_list(),
            "threshold": self.kind.threshold,
            "feasible": self.feasible,
            "verdict": self.verdict,
            "witness": None if self.witness is None else [str(p) for p in self.witness],
            "witness_ratio": None if self.forced else self.witness_ratio,
            "zero_denominator_witness": self.forced,
            "pairs_evaluated": self.pairs_evaluated,
            "exhaustive": self.exhaustive,
        }


def _condition_terms(space: SoftMetricSpace, m: SoftMapping, kind: ContractionKind, pair: Pair) -> Tuple[np.ndarray, np.ndarray]:
    p, q = pair
    fp, fq = apply_point(m, p, space), apply_point(m, q, space)
    numerator = space.distance(fp, fq).entries
    if kind is ContractionKind.BANACH:
        denominator = space.distance(p, q).entries
    elif kind is ContractionKind.KANNAN:
        denominator = space.distance(fp, p).entries + space.distance(fq, q).entries
    else:
        denominator = space.distance(fp, q).entries + space.distance(fq, p).entries
    return numerator, denominator


def _ratio_chunk(space: SoftMetricSpace, m: SoftMapping, kind: ContractionKind, pairs: Sequence[Pair]) -> List[Tuple[np.ndarray, bool]]:
    rows = []
    for pair in pairs:
        numerator, denominator = _condition_terms(space, m, kind, pair)
        zero = denominator == 0.0
        forced = bool(np.any(zero & (numerator > 0.0)))
        ratio = np.divide(numerator, denominator, out=np.zeros_like(numerator), where=~zero)
        rows.append((ratio, forced))
    return rows


def _all_pairs(space: SoftMetricSpace) -> List[Pair]:
    return list(itertools.combinations(space.points(), 2))


def estimate_coefficient(
    space: SoftMetricSpace,
    m: SoftMapping,
    kind: ContractionKind,
    pairs: Optional[Sequence[Pair]] = None,
    plan: Optional[SamplePlan] = None,
    margin: Optional[float] = None,
) -> ContractionReport:
    """
    Estimate the contraction coefficient of (f, phi) for one class.

    Ratios per pair and component are d(fp, fq) divided by
      banach:     d(p, q)
      kannan:     d(fp, p) + d(fq, q)
      chatterjea: d(fp, q) + d(fq, p)
    0/0 contributes nothing; x/0 with x > 0 makes the report infeasible.

    Args:
        space: Space the mapping acts on
        m: Soft mapping
        kind: Contraction class
        pairs: Explicit pairs; default is every unordered pair (finite) or a seeded sample
        plan: Sampling plan for analytic spaces
        margin: eta subtracted from the threshold

    Raises:
        SoftDomainError: No pairs to evaluate
    """
    kind = ContractionKind(kind)
    margin = settings.comparison_margin if margin is None else margin
    exhaustive = False
    if pairs is None:
        if space.is_tabulated:
            pairs = _all_pairs(space)
            exhaustive = True
        else:
            plan = plan or SamplePlan.default()
            pairs = draw_pairs(space, plan)
    pairs = list(pairs)
    if not pairs:
        raise SoftDomainError("coefficient estimation needs at least one pair")

    workers = max(1, settings.max_workers)
    chunks = [pairs[i::workers] for i in range(workers)]
    with ThreadPoolExecutor(max_workers=workers) as executor:
        results = list(executor.map(lambda chunk: _ratio_chunk(space, m, kind, chunk), chunks))
    # Undo the round-robin split so ties resolve to the lowest pair index.
    rows: List[Tuple[np.ndarray, bool]] = [None] * len(pairs)  # type: ignore[list-item]
    for offset, chunk_rows in enumerate(results):
        rows[offset::workers] = chunk_rows

    alpha = np.zeros(len(space.params))
    witness: Optional[Pair] = None
    best = -1.0
    forced_at: Optional[Pair] = None
    for pair, (ratio, forced) in zip(pairs, rows):
        alpha = np.maximum(alpha, ratio)
        if forced and forced_at is None:
            forced_at = pair
        if ratio.max() > best:
            best = float(ratio.max())
            witness = pair

    feasible = forced_at is None and bool(np.all(alpha < kind.threshold - margin))
    report = ContractionReport(
        kind=kind,
        alpha_hat=SoftReal(space.params, alpha),
        feasible=feasible,
        witness=forced_at or witness,
        witness_ratio=float("inf") if forced_at is not None else best,
        pairs_evaluated=len(pairs),
        exhaustive=exhaustive,
        margin=margin,
        forced=forced_at is not None,
    )
    logger.info(
        "Contraction coefficient estimated",
        extra={"kind": kind.value, "alpha_hat": report.alpha_hat.to_list(), "feasible": feasible, "pairs": len(pairs)},
    )
    if feasible and not exhaustive:
        logger.warning("Feasibility rests on sampled pairs only", extra={"kind": kind.value, "pairs": len(pairs)})
    return report


# --------------------------------------------------------------------------- Picard iteration


@dataclass(frozen=True)
class IterationTrace:
    """
    Picard iterates with their step distances and a priori error bounds.

    apriori_bounds[n] bounds d(x^n, x*) and equals rate^n / (1 - rate) * d(x^1, x^0).
    """

    kind: ContractionKind
    iterates: Tuple[SoftPoint, ...]
    step_dists: Tuple[SoftReal, ...]
    apriori_bounds: Tuple[SoftReal, ...]
    rate: SoftReal
    converged: bool
    fixed_point: Optional[SoftPoint]
    residual: SoftReal
    tol: float

    @property
    def iterations(self) -> int:
        return len(self.iterates) - 1

    @property
    def last(self) -> SoftPoint:
        return self.iterates[-1]

    def error_against(self, space: SoftMetricSpace, exact: SoftPoint) -> List[float]:
        """Sup-component of d(x^n, exact) for every iterate."""
        return [space.distance(x, exact).sup() for x in self.iterates]

    def summary(self, space: Optional[SoftMetricSpace] = None, exact: Optional[SoftPoint] = None) -> Dict[str, Any]:
        details: Dict[str, Any] = {
            "kind": self.kind.value,
            "converged": self.converged,
            "iterations": self.iterations,
            "tol": self.tol,
            "rate": self.rate.to_list(),
            "fixed_point": None if self.fixed_point is None else str(self.fixed_point),
            "last_iterate": str(self.last),
            "residual": self.residual.to_list(),
            "final_bound": self.apriori_bounds[-1].to_list(),
            "step_dists": [d.sup() for d in self.step_dists],
            "apriori_bounds": [b.sup() for b in self.apriori_bounds],
        }
        if space is not None and exact is not None:
            details["true_errors"] = self.error_against(space, exact)
        return details


def picard_solve(
    space: SoftMetricSpace,
    m: SoftMapping,
    kind: ContractionKind,
    x0: SoftPoint,
    tol: float,
    report: ContractionReport,
    max_iter: Optional[int] = None,
    margin: Optional[float] = None,
) -> IterationTrace:
    """
    Iterate x^(n+1) = (f, phi)(x^n) until the a priori bound certifies tol.

    Stops when the sup-component of rate^n / (1 - rate) * d(x^1, x^0) drops below
    tol, or as soon as a step distance is exactly zero. Each observed step must
    satisfy d(x^(n+1), x^n) <= rate * d(x^n, x^(n-1)) + eta.

    Args:
        space: Space the mapping acts on
        m: Soft mapping
        kind: Contraction class matching the report
        x0: Starting soft point
        tol: Target certified distance to the fixed point
        report: Feasible coefficient report for kind
        max_iter: Iteration cap
        margin: eta for the step-ratio monitor

    Raises:
        PreconditionError: Infeasible or mismatched report, rate component >= 1, tol <= 0
        RateViolationError: An observed step ratio exceeded the certified rate
    """
    kind = ContractionKind(kind)
    max_iter = settings.picard_max_iter if max_iter is None else max_iter
    margin = settings.comparison_margin if margin is None else margin
    if report.kind is not kind:
        raise PreconditionError(f"report is for {report.kind.value}, solver asked for {kind.value}")
    if not report.feasible:
        raise PreconditionError(f"{kind.value} report is infeasible: {report.verdict}")
    if not tol > 0:
        raise PreconditionError("tolerance must be positive")
    rate = report.rate
    if np.any(rate.entries >= 1.0):
        raise PreconditionError(f"step rate {rate.to_list()} has a component >= 1")

    current = space.point(x0.element, x0.label)
    iterates = [current]
    nxt = apply_point(m, current)
    step0 = space.distance(nxt, current)
    steps = [step0]
    bounds = [geometric_tail_bound(rate, 0, step0)]
    converged = False
    fixed: Optional[SoftPoint] = None

    if step0.is_zero():
        converged, fixed = True, current
    else:
        current = nxt
        iterates.append(current)
        bounds.append(geometric_tail_bound(rate, 1, step0))
        while True:
            n = len(iterates) - 1
            if bounds[-1].sup() < tol:
                converged, fixed = True, current
                break
            if n >= max_iter:
                break
            nxt = apply_point(m, current)
            step = space.distance(nxt, current)
            if not sr_compare(step, rate * steps[-1] + margin).le:
                raise RateViolationError(
                    f"step {n}: d = {step.to_list()} exceeds rate * previous = {(rate * steps[-1]).to_list()}"
                )
            steps.append(step)
            current = nxt
            iterates.append(current)
            bounds.append(geometric_tail_bound(rate, n + 1, step0))
            if step.is_zero():
                converged, fixed = True, current
                break

    residual = space.distance(apply_point(m, current), current)
    trace = IterationTrace(kind, tuple(iterates), tuple(steps), tuple(bounds), rate, converged, fixed, residual, tol)
    logger.info(
        "Picard iteration finished",
        extra={"kind": kind.value, "iterations": trace.iterations, "converged": converged, "residual": residual.sup()},
    )
    if not converged:
        logger.warning("Picard iteration hit max_iter", extra={"max_iter": max_iter, "bound": bounds[-1].sup()})
    return trace


def brute_force_fixed_points(space: SoftMetricSpace, m: SoftMapping) -> List[SoftPoint]:
    """Every soft point of a finite space with (f, phi)(p) = p."""
    return [p for p in space.points() if apply_point(m, p) == p]


# --------------------------------------------------------------------------- projected maps


@dataclass(frozen=True)
class ProjectionReport:
    """
    Scalar contraction factor of f_l: (X, d_l) -> (X, d_phi(l)) per label.

    A factor is None when some pair has d_l(x, y) = 0 but a positive image distance.
    """

    factors: Dict[Label, Optional[float]]
    consistent: bool
    pairs_per_label: int

    def summary(self) -> Dict[str, Any]:
        return {
            "factors": {str(k): v for k, v in self.factors.items()},
            "consistent": self.consistent,
            "pairs_per_label": self.pairs_per_label,
        }


def _factor(pairs: Sequence[Tuple[Any, Any]], before, after, f) -> Optional[float]:
    best = 0.0
    for x, y in pairs:
        den = before(x, y)
        num = after(f(x), f(y))
        if den == 0:
            if num > 0:
                return None
            continue
        best = max(best, num / den)
    return best


def project_contraction_check(
    space: SoftMetricSpace,
    m: SoftMapping,
    report: Optional[ContractionReport] = None,
    plan: Optional[SamplePlan] = None,
) -> ProjectionReport:
    """
    Contraction factor of each projected map, exhaustive on finite spaces.

    A feasible banach report implies every factor is below 1; the converse does not hold.
    """
    factors: Dict[Label, Optional[float]] = {}
    if space.is_tabulated:
        elements = space.universe.elements
        pairs = [(x, y) for x, y in itertools.permutations(elements, 2)]
        for label in space.params.labels:
            target = m.phi(label)
            factors[label] = _factor(pairs, project(space, label), project(space, target), m.f)
    else:
        plan = plan or SamplePlan.default()
        rng = plan.rng(11)
        xs = draw_points(space, rng, plan.samples, plan.box)
        ys = draw_points(space, rng, plan.samples, plan.box)
        pairs = [(a.element, b.element) for a, b in zip(xs, ys) if a.element != b.element]
        for label, value in zip(space.params.labels, space.params.values):
            factors[label] = _factor(
                pairs, project_at_value(space, value), project_at_value(space, m.phi(value)), m.f
            )

    consistent = True
    if report is not None and report.feasible and report.kind is ContractionKind.BANACH:
        ceiling = report.alpha_hat.sup() + report.margin
        consistent = all(v is not None and v < 1.0 and v <= ceiling for v in factors.values())
        if not consistent:
            logger.warning("Projected factors contradict a feasible banach report", extra={"factors": str(factors)})
    return ProjectionReport(factors, consistent, len(pairs))


@dataclass(frozen=True)
class ComponentFactors:
    """Empirical factors of f under the point part and phi under the parameter part."""

    point_factor: float
    param_factor: float
    samples: int

    def summary(self) -> Dict[str, Any]:
        return {"point_factor": self.point_factor, "param_factor": self.param_factor, "samples": self.samples}


def component_factors(
    space: SoftMetricSpace,
    m: SoftMapping,
    plan: Optional[SamplePlan] = None,
    labels: Optional[Sequence[float]] = None,
) -> ComponentFactors:
    """
    Contraction factors of f alone and phi alone in a sum-family space.

    Args:
        space: Analytic sum-family space
        m: Soft mapping with a numeric parameter map
        plan: Sample count, seed and element box
        labels: Label values to pair up; defaults to the parameter seed values
    """
    backend = space._analytic_backend()
    descriptor = backend.descriptor
    if descriptor.family is not MetricFamily.SUM:
        raise SoftDomainError("component factors are defined for sum-family spaces")
    plan = plan or SamplePlan.default()
    rng = plan.rng(13)

    xs = draw_points(space, rng, plan.samples, plan.box)
    ys = draw_points(space, rng, plan.samples, plan.box)
    point_factor = _factor(
        [(a.element, b.element) for a, b in zip(xs, ys)],
        descriptor.point_distance,
        descriptor.point_distance,
        m.f,
    )

    values = np.asarray(labels if labels is not None else space.params.values, dtype=float)
    us = rng.choice(values, size=plan.samples)
    vs = rng.choice(values, size=plan.samples)
    param_factor = _factor(
        list(zip(us.tolist(), vs.tolist())),
        descriptor.param_distance,
        descriptor.param_distance,
        m.phi,
    )
    return ComponentFactors(
        point_factor=float("inf") if point_factor is None else point_factor,
        param_factor=float("inf") if param_factor is None else param_factor,
        samples=plan.samples,
    )

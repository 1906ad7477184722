"""Replays of the worked examples: a non-metric, a non-contraction and a printed inequality chain."""
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Tuple

import numpy as np

from core.exceptions import SoftDomainError
from core.logging import logger
from services.space_service import SpaceService
from softspace.fixed_point import ContractionKind, component_factors, estimate_coefficient, project_contraction_check
from softspace.mappings import apply_point
from softspace.metric import check_axioms, check_scalar_axioms, project_at_value
from softspace.sampling import SamplePlan, draw_pairs
from softspace.soft_sets import SoftPoint

FIXTURES_DIR = Path(__file__).resolve().parent.parent / "fixtures"

CHAIN_TOLERANCE = 1e-12
CHAIN_SAMPLES = 1000

DISCREPANCY_NOTE = (
    "The last comparator 3/4 (d1(l, m) + d(x, y)) is not 3/4 of the soft distance "
    "1/2 d1(l, m) + d(x, y), so the chain does not certify a soft contraction. The "
    "parameter map v + 1/v alone has factor approaching 1 under d1 as labels grow. "
    "Each printed inequality is verified; the contraction claim is reported, not asserted."
)
GROUPING_NOTE = "The third line is evaluated as |(l + 1/l) - (m + 1/m)|."


@dataclass(frozen=True)
class ExampleReplay:
    example_id: str
    verdict: str
    exit_code: int
    seed: int
    details: Dict[str, Any] = field(default_factory=dict)


def _replay_non_metric(plan: SamplePlan) -> ExampleReplay:
    """Power-family distance: every projection is a metric, the soft distance is not."""
    bundle = SpaceService.load(FIXTURES_DIR / "example_3_2.json")
    space = bundle.space
    report = check_axioms(space, plan)

    witness = report.first("M2")
    witness_form = False
    witness_distance: Optional[float] = None
    if witness is not None:
        p, q = witness.witness
        witness_distance = space.distance(p, q).sup()
        witness_form = p.element == q.element and p.label != q.label and witness_distance == 0.0

    projections = {
        str(label): not check_scalar_axioms(project_at_value(space, value), plan)
        for label, value in zip(space.params.labels, space.params.values)
    }
    holds = report.holds
    return ExampleReplay(
        example_id="3.2",
        verdict="soft metric" if holds else "not a soft metric",
        exit_code=0 if holds else 1,
        seed=plan.seed,
        details={
            "violated_axioms": report.violated_axioms,
            "first_violated_axiom": report.violated_axioms[0] if report.violated_axioms else None,
            "m2_witness": None if witness is None else [str(p) for p in witness.witness],
            "m2_witness_distance": witness_distance,
            "m2_witness_same_element_different_label": witness_form,
            "projections_are_metrics": projections,
            "violation_counts": report.counts,
            "pairs_checked": report.pairs_checked,
            "triples_checked": report.triples_checked,
        },
    )


def _replay_non_contraction(plan: SamplePlan) -> ExampleReplay:
    """x/2 with labels tripled: every projected map contracts, the soft mapping does not."""
    bundle = SpaceService.load(FIXTURES_DIR / "example_4_12.json")
    space, mapping = bundle.space, bundle.require_mapping()

    p = space.point((0.0, 1.0), 2.0)
    q = space.point((1.0, 0.0), 1.0)
    fp, fq = apply_point(mapping, p), apply_point(mapping, q)
    before = space.distance(p, q).sup()
    after = space.distance(fp, fq).sup()

    pairs = [(p, q)] + draw_pairs(space, plan)
    report = estimate_coefficient(space, mapping, ContractionKind.BANACH, pairs=pairs)
    projection = project_contraction_check(space, mapping, report, plan)

    return ExampleReplay(
        example_id="4.12",
        verdict=report.verdict,
        exit_code=0 if report.feasible else 1,
        seed=plan.seed,
        details={
            "pair": [str(p), str(q)],
            "images": [str(fp), str(fq)],
            "distance_before": before,
            "distance_after": after,
            "expected_before": 1.0 + math.sqrt(2.0),
            "expected_after": 3.0 + math.sqrt(2.0) / 2.0,
            "image_farther_apart": after > before,
            "pair_ratio": after / before,
            "banach": report.summary(),
            "projected_factors": projection.summary()["factors"],
            "projection_consistent": projection.consistent,
        },
    )


def _chain_lines(space, mapping, lam: np.ndarray, mu: np.ndarray, x: np.ndarray, y: np.ndarray) -> List[np.ndarray]:
    metric = space.backend.descriptor
    first = np.array([
        space.distance(
            apply_point(mapping, SoftPoint((xi,), li), space), apply_point(mapping, SoftPoint((yi,), mi), space)
        ).sup()
        for li, mi, xi, yi in zip(lam, mu, x, y)
    ])
    d1 = np.minimum(np.abs(lam - mu), 1.0)
    dx = np.abs(x - y)
    phi_l, phi_m = lam + 1.0 / lam, mu + 1.0 / mu
    return [
        first,
        np.array([0.5 * metric.param_distance(a, b) for a, b in zip(phi_l, phi_m)]) + 0.2 * dx,
        0.5 * np.minimum(np.abs(phi_l - phi_m), 1.0) + 0.2 * dx,
        0.5 * np.minimum(np.abs(lam - mu) * np.abs(1.0 - 1.0 / (lam * mu)), 1.0) + 0.2 * dx,
        0.5 * np.minimum(np.abs(lam - mu), 1.0) + 0.2 * dx,
        0.5 * d1 + 0.2 * dx,
        0.75 * (d1 + dx),
    ]


# relation between line i and line i + 1
CHAIN_RELATIONS = ("=", "=", "=", "<=", "<=", "<=")


def _replay_inequality_chain(plan: SamplePlan, samples: int = CHAIN_SAMPLES) -> ExampleReplay:
    """Evaluate each line of the printed chain on seeded (l, m, x, y) tuples."""
    bundle = SpaceService.load(FIXTURES_DIR / "example_4_14.json")
    space, mapping = bundle.space, bundle.require_mapping()

    rng = plan.rng()
    lam = rng.uniform(1.0, 100.0, samples)
    mu = rng.uniform(1.0, 100.0, samples)
    x = rng.uniform(-100.0, 100.0, samples)
    y = rng.uniform(-100.0, 100.0, samples)
    lam[0], mu[0], x[0], y[0] = 1.0, 2.0, 5.0, 0.0

    lines = _chain_lines(space, mapping, lam, mu, x, y)
    checks: Dict[str, Any] = {}
    all_hold = True
    for i, relation in enumerate(CHAIN_RELATIONS):
        left, right = lines[i], lines[i + 1]
        if relation == "=":
            failures = int(np.sum(np.abs(left - right) > CHAIN_TOLERANCE))
            worst = float(np.max(np.abs(left - right)))
        else:
            failures = int(np.sum(left > right + CHAIN_TOLERANCE))
            worst = float(np.max(left - right))
        all_hold = all_hold and failures == 0
        checks[f"line{i + 1} {relation} line{i + 2}"] = {"failures": failures, "worst_gap": worst}

    pairs: List[Tuple[SoftPoint, SoftPoint]] = [
        (SoftPoint((float(xi),), float(li)), SoftPoint((float(yi),), float(mi))) for li, mi, xi, yi in zip(lam, mu, x, y)
    ]
    report = estimate_coefficient(space, mapping, ContractionKind.BANACH, pairs=pairs)
    factors = component_factors(space, mapping, plan, labels=lam)

    return ExampleReplay(
        example_id="4.14",
        verdict="every printed inequality holds" if all_hold else "a printed inequality fails",
        exit_code=0 if all_hold else 1,
        seed=plan.seed,
        details={
            "samples": samples,
            "first_sample": {"l": 1.0, "m": 2.0, "x": 5.0, "y": 0.0},
            "first_sample_lines": [float(line[0]) for line in lines],
            "chain": checks,
            "empirical_coefficient": report.alpha_hat.sup(),
            "banach": report.summary(),
            "point_map_factor": factors.point_factor,
            "parameter_map_factor": factors.param_factor,
            "note": DISCREPANCY_NOTE,
            "grouping": GROUPING_NOTE,
        },
    )


class ExampleService:
    """Registry of example replays."""

    def __init__(self):
        """Initialize example registry."""
        self.replays: Dict[str, Callable[[SamplePlan], ExampleReplay]] = {
            "3.2": _replay_non_metric,
            "4.12": _replay_non_contraction,
            "4.14": _replay_inequality_chain,
        }

    def replay_example(self, example_id: str, plan: Optional[SamplePlan] = None) -> ExampleReplay:
        """
        Replay one worked example.

        Args:
            example_id: "3.2", "4.12" or "4.14"
            plan: Seed and sample count for the sampled steps

        Returns:
            Structured replay outcome
        """
        if example_id not in self.replays:
            raise SoftDomainError(f"unknown example {example_id!r}; choose from {sorted(self.replays)}")
        replay = self.replays[example_id](plan or SamplePlan.default())
        logger.info("Example replayed", extra={"example": example_id, "verdict": replay.verdict, "seed": replay.seed})
        return replay


def replay_example(example_id: str, plan: Optional[SamplePlan] = None) -> ExampleReplay:
    return ExampleService().replay_example(example_id, plan)

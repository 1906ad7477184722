"""Command orchestration: each method turns a loaded descriptor into a CommandReport."""
from pathlib import Path
from typing import Any, Dict, Optional, Union

import numpy as np

from core.exceptions import DegenerateGeometryError, PreconditionError, RateViolationError, SoftDomainError
from core.logging import logger
from schemas.descriptor import serialize_descriptor
from schemas.reports import CommandReport
from services.example_service import ExampleService
from services.space_service import SpaceBundle, SpaceService
from softspace.fixed_point import ContractionKind, estimate_coefficient, picard_solve
from softspace.metric import check_axioms, check_scalar_axioms, project, project_at_value, repair_to_metric
from softspace.sampling import SamplePlan
from softspace.soft_sets import SoftSet
from softspace.topology import RegionKind, is_closed, is_open, region_membership, separate_closed_sets


class AnalysisService:
    """Service behind the softfix sub-commands."""

    @staticmethod
    def check(bundle: SpaceBundle, plan: SamplePlan) -> CommandReport:
        """
        Verify the soft metric axioms and the metric axioms of every projection.

        Args:
            bundle: Loaded descriptor
            plan: Sample count and seed for analytic spaces

        Returns:
            Report with exit code 0 when every axiom holds, 1 otherwise
        """
        space = bundle.space
        report = check_axioms(space, plan)
        if space.is_tabulated:
            projections = {str(label): len(check_scalar_axioms(project(space, label))) for label in space.params.labels}
        else:
            projections = {
                str(label): len(check_scalar_axioms(project_at_value(space, value), plan))
                for label, value in zip(space.params.labels, space.params.values)
            }
        details = report.summary()
        details["backend"] = space.backend.describe()
        details["projection_violations"] = projections
        return CommandReport(
            command="check",
            verdict=report.verdict,
            exit_code=0 if report.holds else 1,
            seed=None if report.exhaustive else plan.seed,
            details=details,
        )

    @staticmethod
    def repair(bundle: SpaceBundle, out: Union[str, Path]) -> CommandReport:
        """Repair a tabulated distance table into a soft metric and write it as a descriptor."""
        descriptor = bundle.descriptor
        raw = SpaceService.raw_table(descriptor)
        space = bundle.space
        repaired = repair_to_metric(raw, space.universe, space.params)
        table = repaired._table_backend().table

        Path(out).write_text(serialize_descriptor(SpaceService.to_descriptor(repaired, descriptor)), encoding="utf-8")
        after = check_axioms(repaired)
        changed = int(np.count_nonzero(raw != table))
        logger.info("Repaired descriptor written", extra={"out": str(out), "changed_entries": changed})
        return CommandReport(
            command="repair",
            verdict=f"repaired table written to {out}",
            exit_code=0,
            details={
                "out": str(out),
                "changed_entries": changed,
                "largest_change": float(np.max(np.abs(raw - table))),
                "axioms_after_repair": after.verdict,
            },
        )

    @staticmethod
    def contract(bundle: SpaceBundle, kind: ContractionKind, plan: SamplePlan) -> CommandReport:
        space = bundle.space
        report = estimate_coefficient(space, bundle.require_mapping(), kind, plan=plan)
        details = report.summary()
        if report.feasible and kind is not ContractionKind.BANACH:
            details["step_rate"] = report.rate.to_list()
        return CommandReport(
            command="contract",
            verdict=report.verdict,
            exit_code=0 if report.feasible else 1,
            seed=None if report.exhaustive else plan.seed,
            details=details,
        )

    @staticmethod
    def solve(
        bundle: SpaceBundle,
        kind: ContractionKind,
        x0: str,
        tol: float,
        plan: SamplePlan,
        max_iter: Optional[int] = None,
    ) -> CommandReport:
        """
        Estimate the coefficient, then run Picard iteration from x0.

        Returns:
            Exit code 0 when the a priori bound certifies tol, 1 when the mapping is
            infeasible, a step ratio breaks the rate or max_iter is reached
        """
        space = bundle.space
        mapping = bundle.require_mapping()
        start = SpaceService.parse_point(space, x0)
        if not tol > 0:
            raise SoftDomainError("--tol must be positive")
        report = estimate_coefficient(space, mapping, kind, plan=plan)
        seed = None if report.exhaustive else plan.seed
        details: Dict[str, Any] = {"x0": str(start), "coefficient": report.summary()}

        if not report.feasible:
            return CommandReport(command="solve", verdict=report.verdict, exit_code=1, seed=seed, details=details)
        try:
            trace = picard_solve(space, mapping, kind, start, tol, report, max_iter=max_iter)
        except (RateViolationError, PreconditionError) as exc:
            details["error"] = str(exc)
            return CommandReport(command="solve", verdict="iteration broke the certified rate", exit_code=1, seed=seed, details=details)

        details["trace"] = trace.summary()
        verdict = f"converged to {trace.fixed_point}" if trace.converged else "not converged within max_iter"
        return CommandReport(command="solve", verdict=verdict, exit_code=0 if trace.converged else 1, seed=seed, details=details)

    @staticmethod
    def topology(bundle: SpaceBundle, set_spec: str, query: RegionKind, point_spec: str) -> CommandReport:
        space = bundle.space
        region = SpaceService.parse_set(space, set_spec)
        point = SpaceService.parse_point(space, point_spec)
        member = region_membership(space, region, point, query)

        details: Dict[str, Any] = {"set": set_spec, "point": str(point), "query": RegionKind(query).value, "member": member}
        if isinstance(region, SoftSet):
            details["set_is_open"] = is_open(space, region).is_open
            details["set_is_closed"] = is_closed(space, region)
        verdict = f"{point} {'is' if member else 'is not'} in the {RegionKind(query).value}"
        return CommandReport(command="topology", verdict=verdict, exit_code=0 if member else 1, details=details)

    @staticmethod
    def separate(bundle: SpaceBundle, f1_spec: str, f2_spec: str) -> CommandReport:
        """
        Separate two disjoint closed soft sets by open sets.

        A zero separation radius is a property failure (exit 1); null or overlapping
        inputs are input errors.
        """
        space = bundle.space
        f1 = SpaceService.parse_soft_set(space, f1_spec)
        f2 = SpaceService.parse_soft_set(space, f2_spec)
        for name, s in (("--f1", f1), ("--f2", f2)):
            if not is_closed(space, s):
                raise PreconditionError(f"{name} is not a closed soft set")
        try:
            separation = separate_closed_sets(space, f1, f2)
        except DegenerateGeometryError as exc:
            return CommandReport(command="separate", verdict="no separation", exit_code=1, details={"error": str(exc)})

        details = separation.summary()
        details["U_open"] = is_open(space, separation.u).is_open
        details["V_open"] = is_open(space, separation.v).is_open
        details["disjoint"] = separation.u.intersect(separation.v).is_null()
        return CommandReport(command="separate", verdict="separated by disjoint open sets", exit_code=0, details=details)

    @staticmethod
    def example(example_id: str, plan: SamplePlan) -> CommandReport:
        replay = ExampleService().replay_example(example_id, plan)
        return CommandReport(
            command=f"example {replay.example_id}",
            verdict=replay.verdict,
            exit_code=replay.exit_code,
            seed=replay.seed,
            details=replay.details,
        )


__all__ = ["AnalysisService"]

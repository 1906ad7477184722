"""Sub-command handlers: load inputs, call the analysis service, return a report."""
import argparse
from typing import Callable, Dict

from schemas.reports import CommandReport
from services.analysis_service import AnalysisService
from services.space_service import SpaceService
from softspace.fixed_point import ContractionKind
from softspace.sampling import SamplePlan
from softspace.topology import RegionKind


def _plan(args: argparse.Namespace) -> SamplePlan:
    return SamplePlan.default(samples=args.samples, seed=args.seed)


def handle_check(args: argparse.Namespace) -> CommandReport:
    return AnalysisService.check(SpaceService.load(args.file), _plan(args))


def handle_repair(args: argparse.Namespace) -> CommandReport:
    return AnalysisService.repair(SpaceService.load(args.file), args.out)


def handle_contract(args: argparse.Namespace) -> CommandReport:
    return AnalysisService.contract(SpaceService.load(args.file), ContractionKind(args.kind), _plan(args))


def handle_solve(args: argparse.Namespace) -> CommandReport:
    return AnalysisService.solve(
        SpaceService.load(args.file),
        ContractionKind(args.kind),
        args.x0,
        args.tol,
        _plan(args),
        max_iter=args.max_iter,
    )


def handle_topology(args: argparse.Namespace) -> CommandReport:
    return AnalysisService.topology(SpaceService.load(args.file), args.set, RegionKind(args.query), args.point)


def handle_separate(args: argparse.Namespace) -> CommandReport:
    return AnalysisService.separate(SpaceService.load(args.file), args.f1, args.f2)


def handle_example(args: argparse.Namespace) -> CommandReport:
    return AnalysisService.example(args.example_id, _plan(args))


COMMANDS: Dict[str, Callable[[argparse.Namespace], CommandReport]] = {
    "check": handle_check,
    "repair": handle_repair,
    "contract": handle_contract,
    "solve": handle_solve,
    "topology": handle_topology,
    "separate": handle_separate,
    "example": handle_example,
}

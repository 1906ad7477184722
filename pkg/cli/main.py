"""Argument parsing and dispatch for the softfix command line."""
import argparse
import sys
from pathlib import Path
from typing import List, Optional, Sequence

from cli.commands import COMMANDS
from core.exceptions import DescriptorError, SoftfixError
from core.logging import logger
from schemas.reports import CommandReport
from softspace.fixed_point import ContractionKind
from softspace.topology import RegionKind

EXAMPLE_IDS = ("3.2", "4.12", "4.14")


def _common_options() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json-out", type=Path, default=None, help="Also write the report as JSON to this path")
    common.add_argument("--seed", type=int, default=None, help="Seed for sampled checks (default 42)")
    common.add_argument("--samples", type=int, default=None, help="Number of sampled points or pairs")
    return common


def build_parser() -> argparse.ArgumentParser:
    """Parser for every sub-command; each sub-parser records its handler name in `command`."""
    parser = argparse.ArgumentParser(prog="softfix", description="Soft metric spaces and fixed points of soft mappings.")
    sub = parser.add_subparsers(dest="command", required=True)
    common = _common_options()
    kinds = [k.value for k in ContractionKind]

    check = sub.add_parser("check", parents=[common], help="Verify the soft metric axioms")
    check.add_argument("file", type=Path)

    repair = sub.add_parser("repair", parents=[common], help="Repair a tabulated table into a soft metric")
    repair.add_argument("file", type=Path)
    repair.add_argument("--out", type=Path, required=True)

    contract = sub.add_parser("contract", parents=[common], help="Estimate a contraction coefficient")
    contract.add_argument("file", type=Path)
    contract.add_argument("--kind", choices=kinds, required=True)

    solve = sub.add_parser("solve", parents=[common], help="Picard iteration to the fixed point")
    solve.add_argument("file", type=Path)
    solve.add_argument("--kind", choices=kinds, required=True)
    solve.add_argument("--x0", required=True, help='Start point, "x1,x2@label" or "element@label"')
    solve.add_argument("--tol", type=float, required=True)
    solve.add_argument("--max-iter", type=int, default=None)

    topology = sub.add_parser("topology", parents=[common], help="Closure, interior or boundary membership")
    topology.add_argument("file", type=Path)
    topology.add_argument("--set", required=True, help='"label:e1,e2;..." or "ball(center;radius)"')
    topology.add_argument("--query", choices=[r.value for r in RegionKind], required=True)
    topology.add_argument("--point", required=True)

    separate = sub.add_parser("separate", parents=[common], help="Separate two disjoint closed soft sets")
    separate.add_argument("file", type=Path)
    separate.add_argument("--f1", required=True)
    separate.add_argument("--f2", required=True)

    example = sub.add_parser("example", parents=[common], help="Replay a worked example")
    example.add_argument("example_id", choices=EXAMPLE_IDS)
    return parser


def _emit(report: CommandReport, json_out: Optional[Path], stream=None) -> None:
    (stream or sys.stdout).write(report.render())
    if json_out is not None:
        json_out.write_text(report.to_json(), encoding="utf-8")


def run_command(argv: Sequence[str]) -> int:
    """
    Parse argv, run one sub-command and print its report.

    Args:
        argv: Arguments without the program name

    Returns:
        0 property holds, 1 property violated, 2 input error
    """
    parser = build_parser()
    try:
        args = parser.parse_args(list(argv))
    except SystemExit as exc:
        return 0 if exc.code in (None, 0) else 2

    try:
        report = COMMANDS[args.command](args)
    except (SoftfixError, OSError) as exc:
        details = {"error": str(exc)}
        if isinstance(exc, DescriptorError):
            details.update(code=exc.code, path=exc.path, line=exc.line)
        logger.error("Command failed on its input", extra={"command": args.command, "error": str(exc)})
        report = CommandReport(command=args.command, verdict="input error", exit_code=2, seed=args.seed, details=details)
        _emit(report, args.json_out, stream=sys.stderr)
        return 2

    _emit(report, args.json_out)
    return report.exit_code


def main(argv: Optional[List[str]] = None) -> None:
    sys.exit(run_command(sys.argv[1:] if argv is None else argv))

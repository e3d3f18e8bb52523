"""
Invariant suite command.
"""

import argparse

from prunedjulia.commands.common import add_output_option, add_threads_option, intervals_option, write_report
from prunedjulia.services import analysis_service


def handle_check(args: argparse.Namespace) -> int:
    """Run every invariant check and print one pass/fail line per check."""
    report = analysis_service.check(args.map, intervals_option(args.J), args.depth, args.threads)
    for check in report.checks:
        status = "PASS" if check.passed else "FAIL"
        print(f"{status} {check.name}: {check.detail}")
    if args.out:
        write_report(report, args.out)
    return 0 if report.passed else 1


def register(subparsers) -> None:
    check = subparsers.add_parser("check", help="Run the invariant suite on a map spec")
    check.add_argument("--map", required=True, help="Interval, circle or boundary map spec")
    check.add_argument("--J", default=None, help='Pruning intervals "lo,hi;lo,hi"')
    check.add_argument("--depth", type=int, default=4, help="Tree depth for the tree checks")
    add_threads_option(check)
    add_output_option(check)
    check.set_defaults(handler=handle_check)

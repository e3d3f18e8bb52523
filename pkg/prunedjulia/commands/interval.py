"""
Interval map commands: classify, psi and dpsi.
"""

import argparse

from prunedjulia.commands.common import add_map_option, add_output_option, add_threads_option, write_report
from prunedjulia.exceptions import ValidationFailure
from prunedjulia.services import analysis_service


def _add_orbit_options(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--max-period", type=int, default=None, help="Largest period searched")
    parser.add_argument("--horizon", type=int, default=None, help="Iterate budget per critical orbit")


def handle_classify(args: argparse.Namespace) -> int:
    """Classify periodic and critical orbits."""
    f, _ = analysis_service.load_map(args.map)
    report = analysis_service.classify(f, args.max_period, args.horizon, args.threads)
    write_report(report, args.out)
    return 0


def handle_psi(args: argparse.Namespace) -> int:
    """Evaluate Psi_H and Psi_T."""
    f, _ = analysis_service.load_map(args.map)
    write_report(analysis_service.psi(f, args.max_period, args.horizon), args.out)
    return 0


def _field(text: str) -> list[float]:
    try:
        return [float(part) for part in text.split(",") if part.strip()]
    except ValueError:
        raise ValidationFailure(f"Field '{text}' is not a comma-separated coefficient list")


def handle_dpsi(args: argparse.Namespace) -> int:
    """Compare analytic and finite-difference derivatives of Psi_H."""
    f, _ = analysis_service.load_map(args.map)
    report = analysis_service.dpsi(f, _field(args.field), args.step, args.max_period, args.horizon)
    write_report(report, args.out)
    return 0


def register(subparsers) -> None:
    classify = subparsers.add_parser("classify", help="Periodic orbits and critical classification")
    add_map_option(classify)
    _add_orbit_options(classify)
    add_threads_option(classify)
    add_output_option(classify)
    classify.set_defaults(handler=handle_classify)

    psi = subparsers.add_parser("psi", help="Evaluate the invariants Psi_H and Psi_T")
    add_map_option(psi)
    _add_orbit_options(psi)
    add_output_option(psi)
    psi.set_defaults(handler=handle_psi)

    dpsi = subparsers.add_parser("dpsi", help="Derivative of Psi_H along a tangent field")
    add_map_option(dpsi)
    dpsi.add_argument("--field", required=True, help="Field coefficients, ascending, comma-separated")
    dpsi.add_argument("--step", type=float, default=None, help="Finite-difference step")
    _add_orbit_options(dpsi)
    add_output_option(dpsi)
    dpsi.set_defaults(handler=handle_dpsi)

"""
Circle map commands: circle, semiconj, markov and barycentric.
"""

import argparse
from pathlib import Path

from prunedjulia.commands.common import (
    add_map_option,
    add_output_option,
    add_threads_option,
    intervals_option,
    write_report,
    write_reports,
)
from prunedjulia.models import BoundaryMapSpec
from prunedjulia.services import analysis_service, load_spec
from prunedjulia.utils import parse_points


def handle_circle(args: argparse.Namespace) -> int:
    """Validate a circle map and report it."""
    g, _ = analysis_service.load_circle(args.map)
    if args.svg:
        Path(args.svg).write_text(analysis_service.render_circle(g))
    write_report(analysis_service.circle(g), args.out)
    return 0


def handle_semiconj(args: argparse.Namespace) -> int:
    """Semi-conjugacy to the linear model and the pruning set Q."""
    g, spec = analysis_service.load_circle(args.map)
    radius = spec.radius if args.radius is None else args.radius
    write_report(analysis_service.semiconj(g, radius), args.out)
    return 0


def handle_markov(args: argparse.Namespace) -> int:
    """Markov structure on Lambda'_N."""
    g, spec = analysis_service.load_circle(args.map)
    Y = intervals_option(args.Y)
    B0 = intervals_option(args.B0)
    report = analysis_service.markov(
        g,
        spec.Y if Y is None else Y,
        spec.B0 if B0 is None else B0,
        spec.N if args.N is None else args.N,
    )
    write_report(report, args.out)
    return 0


def handle_barycentric(args: argparse.Namespace) -> int:
    """Barycentric extension of a circle homeomorphism at points of the disc."""
    spec = load_spec(args.map, BoundaryMapSpec)
    reports = analysis_service.barycentric(spec, parse_points(args.z), args.M, args.threads)
    write_reports(reports, args.out)
    return 0


def register(subparsers) -> None:
    circle = subparsers.add_parser("circle", help="Validate and summarize a circle map")
    add_map_option(circle, "Circle map spec: JSON file or inline JSON")
    circle.add_argument("--svg", default=None, help="Also draw the lift here")
    add_output_option(circle)
    circle.set_defaults(handler=handle_circle)

    semiconj = subparsers.add_parser("semiconj", help="Semi-conjugacy and pruning set")
    add_map_option(semiconj, "Circle map spec: JSON file or inline JSON")
    semiconj.add_argument("--radius", type=float, default=None, help="Jump neighbourhood radius")
    add_output_option(semiconj)
    semiconj.set_defaults(handler=handle_semiconj)

    markov = subparsers.add_parser("markov", help="Lambda sets and Markov structure")
    add_map_option(markov, "Circle map spec: JSON file or inline JSON")
    markov.add_argument("--Y", default=None, help='Open arcs "lo,hi;lo,hi" covering the jumps')
    markov.add_argument("--B0", default=None, help='Open arcs "lo,hi;lo,hi" around attractors')
    markov.add_argument("--N", type=int, default=None, help="Depth of the Lambda sets")
    add_output_option(markov)
    markov.set_defaults(handler=handle_markov)

    barycentric = subparsers.add_parser("barycentric", help="Barycentric extension to the disc")
    add_map_option(barycentric, "Boundary map spec {rotation, sin}: JSON file or inline JSON")
    barycentric.add_argument("--z", required=True, help='Points "re,im;re,im"')
    barycentric.add_argument("--M", type=int, default=None, help="Quadrature size")
    add_threads_option(barycentric)
    add_output_option(barycentric)
    barycentric.set_defaults(handler=handle_barycentric)

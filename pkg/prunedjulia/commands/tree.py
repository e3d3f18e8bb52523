"""
Pruned tree commands: prune and render.
"""

import argparse
from pathlib import Path

from prunedjulia.commands.common import (
    add_map_option,
    add_output_option,
    add_threads_option,
    emit,
    intervals_option,
    write_report,
)
from prunedjulia.services import analysis_service


def _grow(args: argparse.Namespace):
    f, spec = analysis_service.load_map(args.map)
    J = intervals_option(args.J)
    J = spec.J if J is None else J
    depth = spec.depth if args.depth is None else args.depth
    return analysis_service.prune(f, J, depth, args.threads, args.basins, args.horizon)


def handle_prune(args: argparse.Namespace) -> int:
    """Grow the tree, report it and optionally draw it."""
    tree = _grow(args)
    if args.svg:
        Path(args.svg).write_text(analysis_service.render(tree))
    write_report(tree.summary(), args.out)
    return 0


def handle_render(args: argparse.Namespace) -> int:
    """Grow the tree and write only the drawing."""
    tree = _grow(args)
    emit(analysis_service.render(tree), args.svg)
    return 0


def _add_tree_options(parser: argparse.ArgumentParser) -> None:
    add_map_option(parser)
    parser.add_argument("--J", default=None, help='Pruning intervals "lo,hi;lo,hi"')
    parser.add_argument("--depth", type=int, default=None, help="Tree depth N")
    parser.add_argument("--basins", action="store_true", help="Attach basin covers (K_{X,O})")
    parser.add_argument("--horizon", type=int, default=None, help="Iterate budget for the basins")
    add_threads_option(parser)


def register(subparsers) -> None:
    prune = subparsers.add_parser("prune", help="Grow the pruned tree K_0, ..., K_N")
    _add_tree_options(prune)
    prune.add_argument("--svg", default=None, help="Also write the drawing here")
    add_output_option(prune)
    prune.set_defaults(handler=handle_prune)

    render = subparsers.add_parser("render", help="Draw the pruned tree as SVG")
    _add_tree_options(render)
    render.add_argument("--svg", default=None, help="SVG path (default stdout)")
    render.set_defaults(handler=handle_render)

"""
Command-line entry point.

Builds the argument parser from the command groups, applies tolerance
overrides and maps errors to exit codes: 0 on success, 2 on validation
errors, 1 on computation failures.
"""

import argparse
import logging
import sys
from typing import Dict, List, Optional, Sequence

from prunedjulia import __version__
from prunedjulia.commands import check, circle, interval, tree
from prunedjulia.config import override_settings, settings, tolerance_names
from prunedjulia.exceptions import PrunedJuliaError, ValidationFailure
from prunedjulia.models import ErrorResponse

logger = logging.getLogger(__name__)

TOL_PREFIX = "--tol."


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="prunedjulia",
        description="Pruned Julia sets, external circle maps and conjugacy invariants.",
        epilog=f"Tolerances may be overridden with --tol.<name> VALUE, where <name> is one of: "
        f"{', '.join(tolerance_names())}.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("--verbose", action="store_true", help="Log progress at DEBUG level")
    subparsers = parser.add_subparsers(dest="command", metavar="command", required=True)
    for group in (interval, tree, circle, check):
        group.register(subparsers)
    return parser


def parse_tolerances(extras: Sequence[str]) -> Dict[str, float]:
    """
    Turn leftover ``--tol.<name> VALUE`` or ``--tol.<name>=VALUE`` arguments into overrides.

    Raises:
        ValidationFailure: On unknown names, missing values or any other leftover argument
    """
    known = set(tolerance_names())
    overrides: Dict[str, float] = {}
    items = list(extras)
    while items:
        item = items.pop(0)
        if not item.startswith(TOL_PREFIX):
            raise ValidationFailure(f"Unrecognized argument: {item}")
        name, _, value = item[len(TOL_PREFIX):].partition("=")
        if name not in known:
            raise ValidationFailure(f"Unknown tolerance '{name}'")
        if not value:
            if not items:
                raise ValidationFailure(f"Tolerance '{name}' needs a value")
            value = items.pop(0)
        try:
            overrides[f"tol_{name}"] = float(value)
        except ValueError:
            raise ValidationFailure(f"Tolerance '{name}' has non-numeric value '{value}'")
    return overrides


def _fail(error: PrunedJuliaError) -> int:
    print(ErrorResponse(detail=error.detail).model_dump_json(), file=sys.stderr)
    return error.exit_code


def run(argv: Optional[List[str]] = None) -> int:
    """
    Run one subcommand.

    Args:
        argv: Arguments without the program name; defaults to sys.argv[1:]

    Returns:
        The exit code
    """
    parser = build_parser()
    try:
        args, extras = parser.parse_known_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)

    logging.basicConfig(
        level=logging.DEBUG if args.verbose else settings.log_level,
        format="%(asctime)s %(name)s %(levelname)s %(message)s",
        stream=sys.stderr,
    )
    try:
        overrides = parse_tolerances(extras)
        if getattr(args, "threads", None) is not None:
            overrides["threads"] = args.threads
        with override_settings(**overrides):
            return args.handler(args)
    except PrunedJuliaError as error:
        return _fail(error)
    except Exception as error:
        logger.debug("unexpected failure", exc_info=True)
        print(ErrorResponse(detail=f"{type(error).__name__}: {error}").model_dump_json(), file=sys.stderr)
        return 1


def main() -> int:
    return run(sys.argv[1:])


if __name__ == "__main__":
    sys.exit(main())

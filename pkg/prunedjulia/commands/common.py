"""
Options and output helpers shared by the subcommands.
"""

import argparse
import json
from pathlib import Path
from typing import List, Optional

from pydantic import BaseModel

from prunedjulia.utils import parse_intervals


def add_map_option(parser: argparse.ArgumentParser, help_text: str = "Map spec: JSON file or inline JSON") -> None:
    parser.add_argument("--map", required=True, help=help_text)


def add_output_option(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--out", help="Write the JSON report here instead of stdout")


def add_threads_option(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--threads", type=int, default=None, help="Worker threads (default 1)")


def intervals_option(text: Optional[str]) -> Optional[List[tuple[float, float]]]:
    """Parse an optional ``lo,hi;lo,hi`` option."""
    return None if text is None else parse_intervals(text)


def emit(text: str, out: Optional[str]) -> None:
    if out:
        Path(out).write_text(text + "\n")
    else:
        print(text)


def write_report(report: BaseModel, out: Optional[str]) -> None:
    """Write a report as indented JSON."""
    emit(report.model_dump_json(indent=2), out)


def write_reports(reports: List[BaseModel], out: Optional[str]) -> None:
    """Write a list of reports as a JSON array."""
    emit(json.dumps([report.model_dump(mode="json") for report in reports], indent=2), out)

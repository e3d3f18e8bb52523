"""
SVG rendering of pruned trees and circle-map lifts.

Documents are built with ElementTree and are byte-identical for identical
input: attribute order is fixed and coordinates are written with a fixed
number of decimals.
"""

import xml.etree.ElementTree as ET
from dataclasses import dataclass, field
from typing import Iterable, List, Optional, Sequence

import numpy as np

from prunedjulia.external import CircleMapE
from prunedjulia.prunedtree import PrunedTree

SVG_NAMESPACE = "http://www.w3.org/2000/svg"


@dataclass(frozen=True)
class RenderStyle:
    """Canvas size, stroke and colour choices."""

    width: int = 800
    stroke_width: float = 1.0
    interval_colour: str = "#000000"
    basin_colour: str = "#9ecae1"
    palette: tuple[str, ...] = field(
        default=(
            "#d62728",
            "#1f77b4",
            "#2ca02c",
            "#ff7f0e",
            "#9467bd",
            "#8c564b",
            "#e377c2",
            "#17becf",
        )
    )
    decimals: int = 4
    lift_samples: int = 2048

    def colour(self, generation: int) -> str:
        return self.palette[(generation - 1) % len(self.palette)]


def _root(width: float, height: float) -> ET.Element:
    return ET.Element(
        "svg",
        xmlns=SVG_NAMESPACE,
        version="1.1",
        width=f"{width:g}px",
        height=f"{height:g}px",
        viewBox=f"0 0 {width:g} {height:g}",
    )


def _path_data(points: Iterable[Sequence[float]], decimals: int) -> str:
    fmt = f"{{:.{decimals}f}}"
    parts = []
    for k, (x, y) in enumerate(points):
        command = "M" if k == 0 else "L"
        parts.append(f"{command}{fmt.format(x)} {fmt.format(y)}")
    return " ".join(parts)


def _polyline(parent: ET.Element, points, style: RenderStyle, colour: str, **extra) -> ET.Element:
    return ET.SubElement(
        parent,
        "path",
        d=_path_data(points, style.decimals),
        fill="none",
        stroke=colour,
        **{"stroke-width": f"{style.stroke_width:g}"},
        **extra,
    )


def _serialize(root: ET.Element) -> str:
    return ET.tostring(root, encoding="unicode")


def render_tree(tree: PrunedTree, style: Optional[RenderStyle] = None) -> str:
    """
    Draw a pruned tree on the bounding box of the strip Omega_a.

    The document holds one path for [-1, 1] and one path per arc, coloured by
    generation. Basin covers of K_{X,O} are drawn as filled circles.

    Args:
        tree: Tree to draw
        style: Rendering options

    Returns:
        The SVG document as a string
    """
    style = style or RenderStyle()
    a = tree.domain_halfwidth
    span_x, span_y = 2.0 + 2.0 * a, 2.0 * a
    scale = style.width / span_x
    height = span_y * scale

    def to_canvas(z) -> List[tuple[float, float]]:
        z = np.atleast_1d(np.asarray(z, dtype=complex))
        return list(zip(((z.real + 1.0 + a) * scale).tolist(), ((a - z.imag) * scale).tolist()))

    root = _root(style.width, round(height, style.decimals))
    basins = ET.SubElement(root, "g", id="basins")
    fmt = f"{{:.{style.decimals}f}}"
    for cover in tree.basins:
        cx, cy = to_canvas(cover.centre)[0]
        ET.SubElement(
            basins,
            "circle",
            cx=fmt.format(cx),
            cy=fmt.format(cy),
            r=fmt.format(cover.radius * scale),
            fill=style.basin_colour,
            stroke="none",
        )

    _polyline(root, to_canvas([-1.0, 1.0]), style, style.interval_colour, id="interval")
    arcs = ET.SubElement(root, "g", id="arcs")
    for generation in tree.generations[1:]:
        for arc in generation:
            _polyline(
                arcs,
                to_canvas(arc.points),
                style,
                style.colour(arc.generation),
                **{"data-generation": str(arc.generation), "data-arc": str(arc.id)},
            )
    return _serialize(root)


def _lift_pieces(g: CircleMapE, samples: int) -> List[np.ndarray]:
    x = np.linspace(0.0, 1.0, samples + 1)
    y = np.asarray(g(x), dtype=float)
    y[-1] = y[-1] if y[-1] > 0.0 else 1.0
    breaks = set(np.flatnonzero(np.diff(y) < 0).tolist())
    for xj in g.jumps:
        breaks.add(int(np.searchsorted(x, xj, side="right")) - 1)
    pieces, start = [], 0
    for k in sorted(breaks):
        pieces.append(np.column_stack([x[start : k + 1], y[start : k + 1]]))
        start = k + 1
    pieces.append(np.column_stack([x[start:], y[start:]]))
    return [piece for piece in pieces if len(piece) > 1]


def render_lift(g: CircleMapE, style: Optional[RenderStyle] = None) -> str:
    """
    Draw the graph of g mod 1 on the unit square.

    The graph is broken where it wraps past 1 and at every jump. The diagonal
    and the marked set Q_g are drawn for reference.
    """
    style = style or RenderStyle()
    size = style.width

    def to_canvas(points: np.ndarray) -> List[tuple[float, float]]:
        return list(zip((points[:, 0] * size).tolist(), ((1.0 - points[:, 1]) * size).tolist()))

    root = _root(size, size)
    ET.SubElement(
        root,
        "rect",
        x="0",
        y="0",
        width=f"{size:g}",
        height=f"{size:g}",
        fill="none",
        stroke=style.interval_colour,
    )
    _polyline(root, to_canvas(np.array([[0.0, 0.0], [1.0, 1.0]])), style, "#bbbbbb", id="diagonal")
    graph = ET.SubElement(root, "g", id="lift")
    for piece in _lift_pieces(g, style.lift_samples):
        _polyline(graph, to_canvas(piece), style, style.colour(1))
    fmt = f"{{:.{style.decimals}f}}"
    marked = ET.SubElement(root, "g", id="marked")
    for q in g.marked:
        ET.SubElement(
            marked,
            "circle",
            cx=fmt.format(q * size),
            cy=fmt.format((1.0 - q) * size),
            r=fmt.format(3 * style.stroke_width),
            fill=style.colour(2),
        )
    return _serialize(root)

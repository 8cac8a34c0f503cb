"""SVG rendering of point sets, nets and decompositions"""

import logging

from fractions import Fraction
from pathlib import Path
from typing import List, Optional, Tuple, Union

import svgwrite

from ..nets.arrangement import Trapezoid, Trapezoidation
from ..nets.geometry import Point, PointSet
from ..nets.net import Net, Provenance

LOGGER = logging.getLogger(__name__)

CANVAS = 600
MARGIN = Fraction(1, 20)
POINT_RADIUS = 0.004
NET_HALF_SIDE = 0.007
STROKE = 0.002

TAG_COLORS = {
    Provenance.TRIVIAL: "#555555",
    Provenance.QUAD_LINE: "#d62728",
    Provenance.QUAD_RECURSE: "#ff9896",
    Provenance.STAGE0: "#1f77b4",
    Provenance.STAGE1: "#2ca02c",
    Provenance.STAGE2: "#9467bd",
    Provenance.STAGE3_QS0: "#8c564b",
    Provenance.STAGE3_TRIANGLE: "#e377c2",
    Provenance.STAGE3_QLI: "#17becf",
    Provenance.CLAMP: "#7f7f7f",
}

Box = Tuple[Fraction, Fraction, Fraction, Fraction]


def _display(value: Fraction) -> float:
    return round(float(value), 6)


def _bounding_box(points: List[Point]) -> Box:
    if not points:
        return Fraction(0), Fraction(0), Fraction(1), Fraction(1)

    xs, ys = [p.x for p in points], [p.y for p in points]
    width = max(max(xs) - min(xs), Fraction(1, 10**6))
    height = max(max(ys) - min(ys), Fraction(1, 10**6))
    pad = MARGIN * max(width, height)
    return min(xs) - pad, min(ys) - pad, max(xs) + pad, max(ys) + pad


def _clip(cell: Trapezoid, box: Box) -> Optional[List[Tuple[Fraction, Fraction]]]:
    """Corners of ``cell`` clipped to the x-range and y-range of ``box``."""
    x0, y0, x1, y1 = box
    left = x0 if cell.left_x is None else max(cell.left_x, x0)
    right = x1 if cell.right_x is None else min(cell.right_x, x1)
    if left >= right:
        return None

    def clamp(y: Fraction) -> Fraction:
        return min(max(y, y0), y1)

    def lower(x: Fraction) -> Fraction:
        return y0 if cell.floor is None else clamp(cell.floor.y_at(x))

    def upper(x: Fraction) -> Fraction:
        return y1 if cell.ceiling is None else clamp(cell.ceiling.y_at(x))

    corners = [(left, lower(left)), (right, lower(right)), (right, upper(right)), (left, upper(left))]
    if corners[0][1] == corners[3][1] and corners[1][1] == corners[2][1]:
        return None
    return corners


def render_svg(
    ps: PointSet,
    net: Optional[Net],
    decomposition: Optional[Trapezoidation],
    path: Union[str, Path],
) -> Path:
    """
    Write an SVG of P, an optional net and an optional decomposition.

    Parameters
    ----------
    ps : PointSet
        Drawn as one circle per point in the ``points`` group.
    net : Net, optional
        Drawn as squares, one group per provenance tag, colored by tag.
    decomposition : Trapezoidation, optional
        Cell outlines clipped to the drawing box.
    path : str or Path
        Destination file.

    Returns
    -------
    Path
        The written file. Output is a function of the inputs only.
    """
    out_path = Path(path)
    net_points = list(net.points) if net is not None else []
    box = _bounding_box([*ps.points, *net_points])
    x0, y0, x1, y1 = box

    def flip(x: Fraction, y: Fraction) -> Tuple[float, float]:
        return _display(x - x0), _display(y1 - y)

    width, height = _display(x1 - x0), _display(y1 - y0)
    scale = max(width, height)

    dwg = svgwrite.Drawing(str(out_path), profile="full", size=(CANVAS, CANVAS))
    dwg.attribs["viewBox"] = f"0 0 {width} {height}"

    if decomposition is not None:
        cells = dwg.g(id="decomposition", class_="decomposition", fill="none", stroke="#bbbbbb")
        cells["stroke-width"] = STROKE * scale
        for cell in decomposition.cells:
            corners = _clip(cell, box)
            if corners is not None:
                cells.add(dwg.polygon(points=[flip(x, y) for x, y in corners]))
        dwg.add(cells)

    markers = dwg.g(id="points", class_="points", fill="#000000")
    for p in ps:
        markers.add(dwg.circle(center=flip(p.x, p.y), r=POINT_RADIUS * scale))
    dwg.add(markers)

    if net is not None:
        side = NET_HALF_SIDE * scale
        for tag in Provenance:
            members = [p for p, t in zip(net.points, net.provenance) if t is tag]
            if not members:
                continue
            group = dwg.g(id=f"net-{tag.value}", class_=f"net {tag.value}", fill=TAG_COLORS[tag])
            for p in members:
                cx, cy = flip(p.x, p.y)
                group.add(dwg.rect(insert=(round(cx - side, 6), round(cy - side, 6)), size=(2 * side, 2 * side)))
            dwg.add(group)

    dwg.save()
    LOGGER.info("Rendered %s points and %s net points to %s", len(ps), len(net_points), out_path)
    return out_path

"""SVG previews of stitch plans.

One SVG user unit is one millimeter. Plans are y-up while SVG is y-down,
so y is mirrored numerically about the plan's vertical midline; the
viewBox is the plan bounds plus a 5 mm margin on every side. Stitch runs
render as polylines, jump travel as dashed gray segments, and individual
penetrations as dots when the plan is small enough to keep them readable.
"""

from __future__ import annotations

from .geometry import JUMP, StitchPlan

MARGIN_MM = 5.0
DOT_LIMIT = 2000
DOT_RADIUS = 0.25

_THREAD = "#1a4f7a"
_JUMPCOLOR = "#999999"


def _num(v: float) -> str:
    s = f"{v:.6g}"
    return "0" if s == "-0" else s


def write_svg(plan: StitchPlan) -> str:
    """Render a plan to a standalone SVG document string."""
    b = plan.bounds()
    xmin, ymin, xmax, ymax = b if b is not None else (0.0, 0.0, 0.0, 0.0)
    width = (xmax - xmin) + 2 * MARGIN_MM
    height = (ymax - ymin) + 2 * MARGIN_MM

    def fy(y: float) -> float:
        return ymin + ymax - y  # mirror into SVG's y-down frame

    polylines = []
    for run in plan.runs():
        if len(run) < 2:
            continue
        pts = " ".join(f"{_num(p.x)},{_num(fy(p.y))}" for p in run)
        polylines.append(f'    <polyline points="{pts}"/>')

    jumps = []
    prev = None
    for p in plan.points:
        if p.kind == JUMP and prev is not None:
            jumps.append(
                f'    <line x1="{_num(prev.x)}" y1="{_num(fy(prev.y))}" '
                f'x2="{_num(p.x)}" y2="{_num(fy(p.y))}"/>')
        prev = p

    dots = []
    if 0 < len(plan.points) <= DOT_LIMIT:
        for p in plan.points:
            if p.kind != JUMP:
                dots.append(f'    <circle cx="{_num(p.x)}" '
                            f'cy="{_num(fy(p.y))}" r="{DOT_RADIUS}"/>')

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
        f'width="{_num(width)}mm" height="{_num(height)}mm" '
        f'viewBox="{_num(xmin - MARGIN_MM)} {_num(ymin - MARGIN_MM)} '
        f'{_num(width)} {_num(height)}">',
    ]
    if jumps:
        out.append(f'  <g stroke="{_JUMPCOLOR}" stroke-width="0.15" '
                   f'stroke-dasharray="0.8 0.8">')
        out += jumps
        out.append("  </g>")
    if polylines:
        out.append(f'  <g fill="none" stroke="{_THREAD}" stroke-width="0.2" '
                   f'stroke-linejoin="round">')
        out += polylines
        out.append("  </g>")
    if dots:
        out.append(f'  <g fill="{_THREAD}">')
        out += dots
        out.append("  </g>")
    out.append("</svg>")
    return "\n".join(out) + "\n"

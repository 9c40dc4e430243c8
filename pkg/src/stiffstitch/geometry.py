"""Stitch-plan generation for thermoplastic embroidery layouts.

Coordinates are millimeters in a y-up plane. A plan is an ordered sequence
of (x, y, kind) points, where kind is "stitch" (a needle penetration) or
"jump" (needle-up travel to that location). Whenever a new stitch run starts
after a jump, the landing point appears twice: once as the jump target and
once as the first stitch, so penetration positions survive clipping and
machine encoding.

Fill conventions shared by all three primitives:

* line/spoke/ring count over a span E at pitch L is round(E / L), halves
  away from zero, floored at one (a region narrower than a pitch still gets
  a single centered pass);
* along any pass of length len the stitch abscissae are
  {0, S, 2S, ..., floor(len/S)*S} plus the endpoint len.
"""

from __future__ import annotations

import math
from bisect import bisect_left
from dataclasses import dataclass, replace
from functools import lru_cache
from typing import Iterable, NamedTuple

from .errors import ConfigMismatch, InvariantViolation, RegionDegenerate, UnknownConfig
from .materials import FRONT, FabricSpec, ThreadSpec

STITCH = "stitch"
JUMP = "jump"

LINEAR = "linear"
RADIAL = "radial"
CONCENTRIC = "concentric"
PRIMITIVES = (LINEAR, RADIAL, CONCENTRIC)

RECTANGLE = "rectangle"
CIRCLE = "circle"
POLYGON = "polygon"

SANITY_MM = 10_000.0        # no coordinate may leave a 10 m square
CONTAIN_TOL = 1e-6          # containment tolerance, mm
MIN_EXTENT_MM = 1e-6        # below this the region cannot hold a fill
MAX_RECORD_MM = 12.1        # largest move one machine record encodes

# Tested envelope; excursions are legal but validate_design() flags them.
TESTED_MIN_LINE = 0.66
TESTED_MIN_STITCH = 0.5
TEX_JAM_LIMIT = 60.0
TEX_SOFT_LIMIT = 45.0


def round_half_away(v: float) -> int:
    """Round to the nearest integer, halves away from zero."""
    n = math.floor(abs(v) + 0.5)
    return n if v >= 0 else -n


# ---------------------------------------------------------------------------
# basic types


@dataclass(frozen=True)
class Point2:
    x: float
    y: float

    def __post_init__(self):
        for v in (self.x, self.y):
            if not math.isfinite(v) or abs(v) > SANITY_MM:
                raise InvariantViolation(f"coordinate {v!r} out of range")


class PlanPoint(NamedTuple):
    x: float
    y: float
    kind: str


@dataclass(frozen=True)
class Region:
    """Fill boundary: an origin-anchored rectangle, a circle, or a simple
    counterclockwise polygon."""

    kind: str
    width: float = 0.0
    height: float = 0.0
    center: Point2 = Point2(0.0, 0.0)
    radius: float = 0.0
    vertices: tuple[Point2, ...] = ()

    @classmethod
    def rectangle(cls, width: float, height: float) -> "Region":
        if not (width > 0 and height > 0):
            raise InvariantViolation("rectangle sides must be positive")
        if max(width, height) > SANITY_MM:
            raise InvariantViolation("rectangle exceeds sanity bound")
        return cls(RECTANGLE, width=width, height=height)

    @classmethod
    def circle(cls, center: Point2, radius: float) -> "Region":
        if not radius > 0:
            raise InvariantViolation("circle radius must be positive")
        if radius > SANITY_MM:
            raise InvariantViolation("circle exceeds sanity bound")
        return cls(CIRCLE, center=center, radius=radius)

    @classmethod
    def polygon(cls, vertices: Iterable[Point2]) -> "Region":
        verts = tuple(vertices)
        if len(verts) < 3:
            raise InvariantViolation("polygon needs at least 3 vertices")
        area2 = _signed_area2(verts)
        if abs(area2) < 1e-12:
            raise InvariantViolation("polygon area must be positive")
        if area2 < 0:
            verts = tuple(reversed(verts))  # store counterclockwise
        if not _is_simple(verts):
            raise InvariantViolation("polygon must not self-intersect")
        return cls(POLYGON, vertices=verts)

    def bbox(self) -> tuple[float, float, float, float]:
        if self.kind == RECTANGLE:
            return 0.0, 0.0, self.width, self.height
        if self.kind == CIRCLE:
            c, r = self.center, self.radius
            return c.x - r, c.y - r, c.x + r, c.y + r
        xs = [p.x for p in self.vertices]
        ys = [p.y for p in self.vertices]
        return min(xs), min(ys), max(xs), max(ys)

    def contains(self, x: float, y: float, tol: float = CONTAIN_TOL) -> bool:
        if self.kind == RECTANGLE:
            return -tol <= x <= self.width + tol and -tol <= y <= self.height + tol
        if self.kind == CIRCLE:
            return math.hypot(x - self.center.x, y - self.center.y) <= self.radius + tol
        if _polygon_boundary_dist(self.vertices, x, y) <= tol:
            return True
        return _crossing_parity(self.vertices, x, y)

    def scanline(self, y: float) -> list[tuple[float, float]]:
        """Intervals of the horizontal line at height y inside the region."""
        if self.kind == RECTANGLE:
            return [(0.0, self.width)] if 0.0 <= y <= self.height else []
        if self.kind == CIRCLE:
            dy = y - self.center.y
            if abs(dy) > self.radius:
                return []
            half = math.sqrt(max(0.0, self.radius * self.radius - dy * dy))
            return [(self.center.x - half, self.center.x + half)]
        xs: list[float] = []
        verts = self.vertices
        n = len(verts)
        for i in range(n):
            p, q = verts[i], verts[(i + 1) % n]
            if p.y == q.y:
                continue  # horizontal edges contribute no crossing
            if (p.y <= y < q.y) or (q.y <= y < p.y):
                xs.append(p.x + (y - p.y) * (q.x - p.x) / (q.y - p.y))
        xs.sort()
        pairs = []
        for i in range(0, len(xs) - 1, 2):
            pairs.append((xs[i], xs[i + 1]))
        return pairs


def _signed_area2(verts: tuple[Point2, ...]) -> float:
    acc = 0.0
    n = len(verts)
    for i in range(n):
        p, q = verts[i], verts[(i + 1) % n]
        acc += p.x * q.y - q.x * p.y
    return acc


def _crossing_parity(verts: tuple[Point2, ...], x: float, y: float) -> bool:
    inside = False
    n = len(verts)
    for i in range(n):
        p, q = verts[i], verts[(i + 1) % n]
        if (p.y <= y < q.y) or (q.y <= y < p.y):
            cx = p.x + (y - p.y) * (q.x - p.x) / (q.y - p.y)
            if cx > x:
                inside = not inside
    return inside


def _polygon_boundary_dist(verts: tuple[Point2, ...], x: float, y: float) -> float:
    best = math.inf
    n = len(verts)
    for i in range(n):
        p, q = verts[i], verts[(i + 1) % n]
        dx, dy = q.x - p.x, q.y - p.y
        ll = dx * dx + dy * dy
        if ll == 0:
            d = math.hypot(x - p.x, y - p.y)
        else:
            t = max(0.0, min(1.0, ((x - p.x) * dx + (y - p.y) * dy) / ll))
            d = math.hypot(x - (p.x + t * dx), y - (p.y + t * dy))
        if d < best:
            best = d
    return best


def _orient(a: Point2, b: Point2, c: Point2) -> float:
    return (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x)


def _is_simple(verts: tuple[Point2, ...]) -> bool:
    n = len(verts)
    for i in range(n):
        a, b = verts[i], verts[(i + 1) % n]
        for j in range(i + 1, n):
            if j == i or (j + 1) % n == i or (i + 1) % n == j:
                continue  # adjacent edges share a vertex
            c, d = verts[j], verts[(j + 1) % n]
            d1, d2 = _orient(a, b, c), _orient(a, b, d)
            d3, d4 = _orient(c, d, a), _orient(c, d, b)
            if ((d1 > 0) != (d2 > 0)) and ((d3 > 0) != (d4 > 0)):
                return False
    return True


# ---------------------------------------------------------------------------
# configuration


@dataclass(frozen=True)
class EmbroideryConfig:
    """Layout parameters for one design.

    ``line_spacing`` is the pass pitch (between lines, spokes, or rings) and
    ``stitch_spacing`` the target distance between penetrations along a
    pass. ``angle`` orients linear fills (0 means lines parallel to the
    x-axis, i.e. the intended bending direction). The waviness fields apply
    to radial and concentric fills only; amplitude 0 disables the wave.
    """

    primitive: str
    line_spacing: float
    stitch_spacing: float
    angle: float = 0.0
    waviness_amplitude: float = 1.5
    waviness_period: float = 10.0

    def __post_init__(self):
        if self.primitive not in PRIMITIVES:
            raise InvariantViolation(f"unknown primitive {self.primitive!r}")
        for label, v in (("line_spacing", self.line_spacing),
                         ("stitch_spacing", self.stitch_spacing)):
            if not (math.isfinite(v) and 0 < v <= SANITY_MM):
                raise InvariantViolation(f"{label} must be in (0, {SANITY_MM}]")
        if not math.isfinite(self.angle):
            raise InvariantViolation("angle must be finite")
        if self.waviness_amplitude < 0 or not math.isfinite(self.waviness_amplitude):
            raise InvariantViolation("waviness amplitude must be >= 0")
        if self.waviness_amplitude > 0 and not self.waviness_period > 0:
            raise InvariantViolation("waviness period must be positive")


# The characterized design grid: three line pitches by three stitch pitches.
# The "0.66" label is the 150-passes-per-100-mm pitch, stored exactly.
GRID_LINE_SPACINGS: dict[str, float] = {"2": 2.0, "1": 1.0, "0.66": 2.0 / 3.0}
GRID_STITCH_SPACINGS: dict[str, float] = {"1": 1.0, "5": 5.0, "15": 15.0}
GRID_CONFIG_IDS: tuple[str, ...] = tuple(
    f"L{l}_S{s}" for l in ("2", "1", "0.66") for s in ("1", "5", "15")
)

SWATCH_MM = 100.0


def parse_config_id(config_id: str) -> tuple[float, float]:
    """Split an ``L<pitch>_S<pitch>`` id into (line, stitch) spacings."""
    try:
        l_part, s_part = config_id.split("_")
        if not (l_part.startswith("L") and s_part.startswith("S")):
            raise ValueError
        l_label, s_label = l_part[1:], s_part[1:]
        line = GRID_LINE_SPACINGS.get(l_label, None)
        if line is None:
            line = float(l_label)
        stitch = GRID_STITCH_SPACINGS.get(s_label, None)
        if stitch is None:
            stitch = float(s_label)
    except ValueError:
        raise UnknownConfig(f"bad config id {config_id!r}") from None
    if not (line > 0 and stitch > 0):
        raise UnknownConfig(f"bad config id {config_id!r}")
    return line, stitch


def grid_config(config_id: str, primitive: str = LINEAR, **kw) -> EmbroideryConfig:
    line, stitch = parse_config_id(config_id)
    return EmbroideryConfig(primitive, line, stitch, **kw)


def swatch_region() -> Region:
    return Region.rectangle(SWATCH_MM, SWATCH_MM)


@lru_cache(maxsize=None)
def swatch_stitch_count(config_id: str) -> int:
    """Penetrations per layer for a grid config on the bench swatch."""
    plan = linear_fill(swatch_region(), grid_config(config_id))
    return plan.stitch_count


# ---------------------------------------------------------------------------
# plans


@dataclass(frozen=True)
class StitchPlan:
    """An ordered machine path plus the inputs that produced it."""

    points: tuple[PlanPoint, ...]
    config: EmbroideryConfig | None = None
    region: Region | None = None
    layer_count: int = 1
    name: str = ""

    @property
    def stitch_count(self) -> int:
        return sum(1 for p in self.points if p.kind == STITCH)

    def bounds(self) -> tuple[float, float, float, float] | None:
        if not self.points:
            return None
        xs = [p.x for p in self.points]
        ys = [p.y for p in self.points]
        return min(xs), min(ys), max(xs), max(ys)

    def runs(self) -> list[list[PlanPoint]]:
        """Maximal stitch sequences; jumps split them."""
        out: list[list[PlanPoint]] = []
        cur: list[PlanPoint] = []
        for p in self.points:
            if p.kind == STITCH:
                cur.append(p)
            elif cur:
                out.append(cur)
                cur = []
        if cur:
            out.append(cur)
        return out

    def validate(self) -> None:
        if self.layer_count < 1:
            raise InvariantViolation("layer_count must be >= 1")
        for p in self.points:
            if not (math.isfinite(p.x) and math.isfinite(p.y)):
                raise InvariantViolation("non-finite plan point")
            if abs(p.x) > SANITY_MM or abs(p.y) > SANITY_MM:
                raise InvariantViolation("plan point out of sanity range")
            if p.kind not in (STITCH, JUMP):
                raise InvariantViolation(f"bad point kind {p.kind!r}")
        if self.region is not None and self.points:
            xmin, ymin, xmax, ymax = self.region.bbox()
            for p in self.points:
                if not (xmin - CONTAIN_TOL <= p.x <= xmax + CONTAIN_TOL
                        and ymin - CONTAIN_TOL <= p.y <= ymax + CONTAIN_TOL):
                    raise InvariantViolation(
                        f"point ({p.x}, {p.y}) outside region bounding box")
        if self.config is not None:
            limit = max(MAX_RECORD_MM, self.config.stitch_spacing) + CONTAIN_TOL
            prev = None
            for p in self.points:
                if p.kind == STITCH:
                    if prev is not None and math.hypot(p.x - prev.x, p.y - prev.y) > limit:
                        raise InvariantViolation("stitch step exceeds pitch limit")
                    prev = p
                else:
                    prev = None  # jumps break the step chain


class _PlanBuilder:
    """Accumulates runs; inserts jump-plus-landing-stitch transitions."""

    def __init__(self):
        self._pts: list[PlanPoint] = []

    def start_run(self, pts: list[tuple[float, float]]) -> None:
        if not pts:
            return
        if self._pts:
            x0, y0 = pts[0]
            self._pts.append(PlanPoint(x0, y0, JUMP))
        for x, y in pts:
            self._stitch(x, y)

    def continue_run(self, pts: list[tuple[float, float]]) -> None:
        for x, y in pts:
            self._stitch(x, y)

    def _stitch(self, x: float, y: float) -> None:
        if self._pts:
            last = self._pts[-1]
            if last.kind == STITCH and last.x == x and last.y == y:
                return  # collapse exact duplicates inside a run
        self._pts.append(PlanPoint(x, y, STITCH))

    def plan(self, **meta) -> StitchPlan:
        return StitchPlan(points=tuple(self._pts), **meta)


def _abscissae(length: float, spacing: float) -> list[float]:
    """Multiples of ``spacing`` along [0, length], endpoint always included."""
    if length <= 1e-9:
        return [0.0]
    k = int(math.floor(length / spacing + 1e-9))
    vals = [i * spacing for i in range(k + 1)]
    if length - vals[-1] > 1e-9:
        vals.append(length)
    else:
        vals[-1] = length
    return vals


def _rotated_region(region: Region, cos_t: float, sin_t: float) -> Region:
    """Rotate a region about the origin by the matrix [cos -sin; sin cos]."""
    def rot(p: Point2) -> Point2:
        return Point2(p.x * cos_t - p.y * sin_t, p.x * sin_t + p.y * cos_t)

    if region.kind == CIRCLE:
        return Region.circle(rot(region.center), region.radius)
    if region.kind == RECTANGLE:
        w, h = region.width, region.height
        corners = (Point2(0, 0), Point2(w, 0), Point2(w, h), Point2(0, h))
        return Region.polygon(rot(p) for p in corners)
    return Region.polygon(rot(p) for p in region.vertices)


# ---------------------------------------------------------------------------
# fills


def linear_fill(region: Region, config: EmbroideryConfig) -> StitchPlan:
    """Serpentine parallel lines at the config angle.

    Lines are stacked perpendicular to the angle at the line pitch and
    centered within the region's perpendicular extent, so the count over an
    extent E is exactly round(E / line_spacing). Consecutive lines alternate
    direction and are sewn together end to end (a connection stitch of one
    line pitch on convex regions), so the fill carries no jumps there; a
    transition falls back to a jump with a landing stitch only when the
    connecting segment would leave the region or exceed the machine's
    single-record step.
    """
    if config.primitive != LINEAR:
        raise ConfigMismatch(f"linear_fill got primitive {config.primitive!r}")
    theta = math.radians(config.angle)
    cos_t, sin_t = math.cos(theta), math.sin(theta)
    work = _rotated_region(region, cos_t, -sin_t)  # rotate by -angle
    xmin, ymin, xmax, ymax = work.bbox()
    extent = ymax - ymin
    if extent < MIN_EXTENT_MM or (xmax - xmin) < MIN_EXTENT_MM:
        raise RegionDegenerate(f"extent {extent:g} mm is below {MIN_EXTENT_MM} mm")

    n = max(1, round_half_away(extent / config.line_spacing))
    margin = (extent - (n - 1) * config.line_spacing) / 2.0
    step_limit = max(MAX_RECORD_MM, config.stitch_spacing)
    builder = _PlanBuilder()
    prev: tuple[float, float] | None = None
    for k in range(n):
        y = ymin + margin + k * config.line_spacing
        intervals = work.scanline(y)
        if not intervals:
            continue
        reverse = k % 2 == 1
        if reverse:
            intervals = list(reversed(intervals))
        for x0, x1 in intervals:
            pts = [(x0 + a, y) for a in _abscissae(x1 - x0, config.stitch_spacing)]
            if reverse:
                pts.reverse()
            sew = False
            if prev is not None:
                hx, hy = pts[0]
                mid_in = work.contains((prev[0] + hx) / 2.0, (prev[1] + hy) / 2.0)
                sew = (mid_in and
                       math.hypot(hx - prev[0], hy - prev[1]) <= step_limit)
            world = [(x * cos_t - yy * sin_t, x * sin_t + yy * cos_t)
                     for x, yy in pts]
            if sew:
                builder.continue_run(world)
            else:
                builder.start_run(world)
            prev = pts[-1]
    plan = builder.plan(config=config, region=region)
    plan.validate()
    return plan


def _resample_curve(fine: list[tuple[float, float]], spacing: float,
                    close: bool) -> list[tuple[float, float]]:
    """Resample a finely sampled curve at ``spacing`` of accumulated chord
    length, keeping both endpoints. Points are taken on the fine polyline,
    so consecutive output points are never farther apart than the path
    length between them."""
    cum = [0.0]
    for i in range(1, len(fine)):
        cum.append(cum[-1] + math.hypot(fine[i][0] - fine[i - 1][0],
                                        fine[i][1] - fine[i - 1][1]))
    total = cum[-1]
    out: list[tuple[float, float]] = []
    for target in _abscissae(total, spacing):
        if target >= total:
            out.append(fine[-1])
            continue
        i = bisect_left(cum, target)
        if cum[i] == target:
            out.append(fine[i])
            continue
        t = (target - cum[i - 1]) / (cum[i] - cum[i - 1])
        out.append((fine[i - 1][0] + t * (fine[i][0] - fine[i - 1][0]),
                    fine[i - 1][1] + t * (fine[i][1] - fine[i - 1][1])))
    if close:
        out[-1] = out[0]
    return out


def _clamp_to_disk(pts: list[tuple[float, float]], cx: float, cy: float,
                   r: float) -> list[tuple[float, float]]:
    """Project anything the wave pushed past the rim back onto it. The
    projection is a contraction, so stitch pitch never grows."""
    out = []
    for x, y in pts:
        d = math.hypot(x - cx, y - cy)
        if d > r:
            s = r / d
            x, y = cx + (x - cx) * s, cy + (y - cy) * s
        out.append((x, y))
    return out


def _wavy_spoke(radius: float, config: EmbroideryConfig) -> list[tuple[float, float]]:
    """One spoke in its local frame: u along the spoke, v lateral."""
    amp, period = config.waviness_amplitude, config.waviness_period
    if amp == 0:
        return [(a, 0.0) for a in _abscissae(radius, config.stitch_spacing)]
    n_fine = max(64,
                 int(8 * radius / config.stitch_spacing) + 1,
                 int(32 * radius / period) + 1)
    fine = []
    for i in range(n_fine + 1):
        s = radius * i / n_fine
        fine.append((s, amp * math.sin(math.tau * s / period)))
    return _resample_curve(fine, config.stitch_spacing, close=False)


def radial_fill(region: Region, config: EmbroideryConfig) -> StitchPlan:
    """Spokes from the circle center to the rim, optionally wavy.

    Spoke count is round(circumference / line_spacing) so the rim pitch
    matches the line pitch. Spokes are laid counterclockwise and traversed
    serpentine fashion (out, rim jump, in, out, ...), which keeps all jumps
    on the rim; consecutive inward/outward spokes share the center stitch.
    """
    if config.primitive != RADIAL:
        raise ConfigMismatch(f"radial_fill got primitive {config.primitive!r}")
    if region.kind != CIRCLE:
        raise ConfigMismatch("radial_fill requires a circle region")
    r, c = region.radius, region.center
    if r < MIN_EXTENT_MM:
        raise RegionDegenerate("circle radius is below the fill threshold")
    n = max(1, round_half_away(math.tau * r / config.line_spacing))
    local = _wavy_spoke(r, config)
    builder = _PlanBuilder()
    for k in range(n):
        ang = math.tau * k / n
        ca, sa = math.cos(ang), math.sin(ang)
        pts = _clamp_to_disk(
            [(c.x + u * ca - v * sa, c.y + u * sa + v * ca) for u, v in local],
            c.x, c.y, r)
        if k % 2 == 0:
            if k == 0:
                builder.start_run(pts)
            else:
                builder.continue_run(pts)  # outward again from the center
        else:
            builder.start_run(list(reversed(pts)))  # rim jump, stitch inward
    plan = builder.plan(config=config, region=region)
    plan.validate()
    return plan


def _ring(rho: float, config: EmbroideryConfig) -> list[tuple[float, float]]:
    """One closed ring around the local origin at nominal radius rho."""
    amp, period = config.waviness_amplitude, config.waviness_period
    if amp == 0:
        circumference = math.tau * rho
        targets = _abscissae(circumference, config.stitch_spacing)
        pts = []
        for t in targets:
            ang = t / rho
            pts.append((rho * math.cos(ang), rho * math.sin(ang)))
        pts[-1] = pts[0]
        return pts
    # Quantize to a whole number of waves so the ring closes smoothly.
    waves = max(1, round_half_away(math.tau * rho / period))
    n_fine = max(128, 32 * waves, int(8 * math.tau * rho / config.stitch_spacing) + 1)
    fine = []
    for i in range(n_fine + 1):
        ang = math.tau * i / n_fine
        rr = max(0.0, rho + amp * math.sin(waves * ang))
        fine.append((rr * math.cos(ang), rr * math.sin(ang)))
    return _resample_curve(fine, config.stitch_spacing, close=True)


def concentric_fill(region: Region, config: EmbroideryConfig) -> StitchPlan:
    """Closed rings at multiples of the line pitch, optionally wavy.

    Ring k sits at radius k * line_spacing for k = 1 .. floor(radius /
    line_spacing); a circle smaller than one pitch is an error. Rings run
    counterclockwise from angle 0 and are chained by single radial jumps.
    With waviness enabled the ring radius swings sinusoidally by the
    amplitude, with the period quantized to a whole number of waves.
    """
    if config.primitive != CONCENTRIC:
        raise ConfigMismatch(f"concentric_fill got primitive {config.primitive!r}")
    if region.kind != CIRCLE:
        raise ConfigMismatch("concentric_fill requires a circle region")
    r, c = region.radius, region.center
    k_max = int(math.floor(r / config.line_spacing + 1e-9))
    if k_max < 1:
        raise RegionDegenerate(
            f"radius {r:g} mm holds no ring at pitch {config.line_spacing:g} mm")
    builder = _PlanBuilder()
    for k in range(1, k_max + 1):
        rho = k * config.line_spacing
        pts = _clamp_to_disk(
            [(c.x + px, c.y + py) for px, py in _ring(rho, config)],
            c.x, c.y, r)
        builder.start_run(pts)
    plan = builder.plan(config=config, region=region)
    plan.validate()
    return plan


def clip_to_region(plan: StitchPlan, region: Region) -> StitchPlan:
    """Drop points outside the region; reconnect severed runs with jumps.

    Point order is preserved. A surviving stitch that lost its predecessor
    is re-entered with a jump to its own location followed by the stitch,
    so every retained penetration stays a penetration.
    """
    kept: list[PlanPoint] = []
    severed = False
    for p in plan.points:
        if not region.contains(p.x, p.y, CONTAIN_TOL):
            severed = True
            continue
        if severed and kept:
            kept.append(PlanPoint(p.x, p.y, JUMP))
            if p.kind == STITCH:
                kept.append(p)
        else:
            kept.append(p)
        severed = False
    out = replace(plan, points=tuple(kept), region=region)
    out.validate()
    return out


# ---------------------------------------------------------------------------
# design validation


@dataclass(frozen=True)
class Diagnostic:
    severity: str  # "error" | "warning"
    code: str
    message: str


def validate_design(config: EmbroideryConfig, thread: ThreadSpec,
                    fabric: FabricSpec) -> list[Diagnostic]:
    """Machine-safety and envelope checks. Returns diagnostics in a fixed
    order (thread errors, spacing warnings, placement warnings); an empty
    list means the design is within the characterized envelope."""
    out: list[Diagnostic] = []
    if thread.tex > TEX_JAM_LIMIT:
        out.append(Diagnostic(
            "error", "thread-too-heavy",
            f"Tex {thread.tex:g} thread jams the machine; keep Tex <= {TEX_JAM_LIMIT:g}"))
    if thread.tex < TEX_SOFT_LIMIT:
        out.append(Diagnostic(
            "error", "thread-too-soft",
            f"Tex {thread.tex:g} thread molds too soft; keep Tex >= {TEX_SOFT_LIMIT:g}"))
    if config.stitch_spacing < TESTED_MIN_STITCH - 1e-9:
        out.append(Diagnostic(
            "warning", "over-punch",
            f"stitch spacing {config.stitch_spacing:g} mm is below the tested "
            f"minimum {TESTED_MIN_STITCH:g} mm and may perforate the fabric"))
    if config.line_spacing < TESTED_MIN_LINE - 1e-9:
        out.append(Diagnostic(
            "warning", "over-punch",
            f"line spacing {config.line_spacing:g} mm is below the tested "
            f"minimum {TESTED_MIN_LINE:g} mm and may perforate the fabric"))
    if thread.side == FRONT:
        out.append(Diagnostic(
            "warning", "thread-side",
            "thermoplastic on the front face shows after molding; feed it "
            "from the bobbin so it lands on the back"))
    return out

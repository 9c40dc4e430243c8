"""Property prediction from bench calibration tables.

Every prediction interpolates piecewise-linearly through measured
force-displacement knots; a (0 mm, 0 N) knot is injected into every series.
Queries at a stored knot return the stored force unchanged. Queries past
the last knot raise unless flat extrapolation is requested, because the
thermoplastic lattice work-hardens unpredictably out there.

Series are keyed by (geometry, config, fabric, layers, mode). Missing
layer counts on the bench swatch are filled by interpolating between the
measured 1-layer and 4-layer series; tensile scaling across layers is a
cruder linear model and must be opted into.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from functools import lru_cache
from importlib import resources
from typing import IO, Iterable, NamedTuple

from .errors import (
    InsufficientCalibration,
    InvariantViolation,
    NonStretchFabric,
    ParseError,
    UnknownAffordance,
    UnknownConfig,
    UnsupportedMold,
)
from .geometry import EmbroideryConfig, grid_config
from .materials import FabricSpec, fabric as fabric_spec

TABLE_VERSION = "1"

COMPRESSION = "compression"
TENSILE = "tensile"
MODES = (COMPRESSION, TENSILE)

SWATCH = "swatch-100"

PROVENANCES = ("paper", "derived", "external")
BOUNDS = ("exact", "upper")

GOOD = "good"
POOR = "poor"

MOLD_DIAMETERS_MM = (10.0, 20.0, 30.0)

_CSV_COLUMNS = ("geometry", "config", "fabric", "layers", "mode",
                "displacement_mm", "force_n", "provenance")

# Swatch fabrication time: 20 min per layer at the densest grid config
# (15150 penetrations) and 5 min at the sparsest (400), linear in between.
_TIME_REF_STITCHES = (400.0, 15150.0)
_TIME_REF_MINUTES = (5.0, 20.0)


class SeriesKey(NamedTuple):
    geometry: str
    config: str
    fabric: str
    layers: int
    mode: str


class Knot(NamedTuple):
    displacement: float
    force: float
    provenance: str
    bound: str


@dataclass(frozen=True)
class Prediction:
    """A force estimate. ``upper_bound`` marks values derived from a knot
    recorded as a ceiling rather than a measurement; ``layer_interpolated``
    marks values synthesized across layer counts instead of read from a
    series measured at the requested one."""

    force_n: float
    upper_bound: bool = False
    layer_interpolated: bool = False


@dataclass(frozen=True)
class CalibrationTable:
    series: dict[SeriesKey, tuple[Knot, ...]]
    version: str = TABLE_VERSION

    def __post_init__(self):
        for key, knots in self.series.items():
            _check_series(key, knots)

    def merge(self, other: "CalibrationTable") -> "CalibrationTable":
        """Overlay ``other``; its series replace same-keyed ones here."""
        merged = dict(self.series)
        merged.update(other.series)
        return CalibrationTable(series=merged, version=self.version)

    def lookup(self, key: SeriesKey) -> tuple[Knot, ...] | None:
        return self.series.get(key)


def _check_series(key: SeriesKey, knots: tuple[Knot, ...]) -> None:
    if not knots:
        raise InvariantViolation(f"{key}: empty series")
    prev = None
    for k in knots:
        if not (math.isfinite(k.displacement) and k.displacement >= 0):
            raise InvariantViolation(f"{key}: bad displacement {k.displacement!r}")
        if not (math.isfinite(k.force) and k.force >= 0):
            raise InvariantViolation(f"{key}: bad force {k.force!r}")
        if prev is not None:
            if k.displacement <= prev.displacement:
                raise InvariantViolation(
                    f"{key}: displacements must strictly increase "
                    f"({prev.displacement:g} then {k.displacement:g})")
            if k.force < prev.force:
                raise InvariantViolation(
                    f"{key}: force must not decrease with displacement "
                    f"({prev.force:g} then {k.force:g})")
        prev = k
    if knots[0].displacement == 0 and knots[0].force != 0:
        raise InvariantViolation(f"{key}: force at zero displacement must be zero")


def _inject_origin(knots: list[Knot]) -> tuple[Knot, ...]:
    knots.sort(key=lambda k: k.displacement)
    if not knots or knots[0].displacement > 0:
        knots.insert(0, Knot(0.0, 0.0, "derived", "exact"))
    return tuple(knots)


def load_calibration(source: str | IO[str]) -> CalibrationTable:
    """Read a calibration CSV (columns: geometry, config, fabric, layers,
    mode, displacement_mm, force_n, provenance, optional bound)."""
    if hasattr(source, "read"):
        return _load(source)  # type: ignore[arg-type]
    with open(source, "r", encoding="utf-8", newline="") as f:
        return _load(f)


def _load(f: IO[str]) -> CalibrationTable:
    reader = csv.DictReader(f)
    names = tuple(reader.fieldnames or ())
    missing = [c for c in _CSV_COLUMNS if c not in names]
    if missing:
        raise ParseError(f"missing column(s) {', '.join(missing)}", line=1)
    extra = [c for c in names if c not in _CSV_COLUMNS + ("bound",)]
    if extra:
        raise ParseError(f"unexpected column(s) {', '.join(extra)}", line=1)

    raw: dict[SeriesKey, list[Knot]] = {}
    for row in reader:
        line = reader.line_num
        try:
            layers = int(row["layers"])
            displacement = float(row["displacement_mm"])
            force = float(row["force_n"])
        except (TypeError, ValueError):
            raise ParseError("layers, displacement_mm and force_n must be numeric",
                             line=line) from None
        mode = (row["mode"] or "").strip()
        if mode not in MODES:
            raise ParseError(f"mode must be one of {MODES}", line=line)
        provenance = (row["provenance"] or "").strip()
        if provenance not in PROVENANCES:
            raise ParseError(f"provenance must be one of {PROVENANCES}", line=line)
        bound = (row.get("bound") or "exact").strip() or "exact"
        if bound not in BOUNDS:
            raise ParseError(f"bound must be one of {BOUNDS}", line=line)
        if layers < 1:
            raise ParseError("layers must be a positive integer", line=line)
        geometry = (row["geometry"] or "").strip()
        config = (row["config"] or "").strip()
        fabric = (row["fabric"] or "").strip()
        if not (geometry and config and fabric):
            raise ParseError("geometry, config and fabric must be non-empty",
                             line=line)
        key = SeriesKey(geometry, config, fabric, layers, mode)
        raw.setdefault(key, []).append(
            Knot(displacement, force, provenance, bound))

    return CalibrationTable(
        series={key: _inject_origin(knots) for key, knots in raw.items()})


@lru_cache(maxsize=1)
def default_table() -> CalibrationTable:
    ref = resources.files("stiffstitch").joinpath("data/calibration.csv")
    with ref.open("r", encoding="utf-8") as f:
        return load_calibration(f)


# ---------------------------------------------------------------------------
# interpolation


def _interp(knots: tuple[Knot, ...], displacement: float,
            extrapolate: bool) -> tuple[float, bool]:
    """Piecewise-linear force at ``displacement``; returns (force, upper)."""
    for k in knots:
        if k.displacement == displacement:
            return k.force, k.bound == "upper"
    last = knots[-1]
    if displacement > last.displacement:
        if extrapolate:
            return last.force, last.bound == "upper"
        raise InsufficientCalibration(
            f"displacement {displacement:g} mm is beyond the calibrated range "
            f"(max {last.displacement:g} mm); pass extrapolate=True to clamp")
    for lo, hi in zip(knots, knots[1:]):
        if lo.displacement < displacement < hi.displacement:
            t = (displacement - lo.displacement) / (hi.displacement - lo.displacement)
            force = lo.force + t * (hi.force - lo.force)
            return force, lo.bound == "upper" or hi.bound == "upper"
    raise InvariantViolation("displacement fell outside the knot span")


def _require_displacement(displacement: float) -> None:
    if not (math.isfinite(displacement) and displacement >= 0):
        raise InvariantViolation("displacement must be a non-negative number")


def _resolve_fabric(fab: FabricSpec | str) -> FabricSpec:
    return fab if isinstance(fab, FabricSpec) else fabric_spec(fab)


def predict_compression(config: str, fab: FabricSpec | str, displacement_mm: float,
                        layers: int = 1, geometry: str = SWATCH,
                        extrapolate: bool = False,
                        table: CalibrationTable | None = None) -> Prediction:
    """Blocked force under a dome compressed by ``displacement_mm``.

    Falls back to interpolating between the 1-layer and 4-layer bench
    series when the requested layer count was not measured directly (the
    swatch geometry only).
    """
    _require_displacement(displacement_mm)
    spec = _resolve_fabric(fab)
    if layers < 1:
        raise InvariantViolation("layers must be >= 1")
    if displacement_mm == 0:
        return Prediction(0.0)
    tbl = table or default_table()

    knots = tbl.lookup(SeriesKey(geometry, config, spec.name, layers, COMPRESSION))
    if knots is not None:
        force, upper = _interp(knots, displacement_mm, extrapolate)
        return Prediction(force, upper_bound=upper)

    if geometry == SWATCH and 1 <= layers <= 4:
        k1 = tbl.lookup(SeriesKey(geometry, config, spec.name, 1, COMPRESSION))
        k4 = tbl.lookup(SeriesKey(geometry, config, spec.name, 4, COMPRESSION))
        if k1 is not None and k4 is not None:
            f1, u1 = _interp(k1, displacement_mm, extrapolate)
            f4, u4 = _interp(k4, displacement_mm, extrapolate)
            force = f1 + (layers - 1) / 3.0 * (f4 - f1)
            return Prediction(force, upper_bound=u1 or u4, layer_interpolated=True)

    raise UnknownConfig(
        f"no compression calibration for {config} on {spec.name} "
        f"({geometry}, {layers} layer{'s' if layers != 1 else ''})")


def predict_tensile(config: str, fab: FabricSpec | str, displacement_mm: float,
                    layers: int = 1, geometry: str = SWATCH,
                    layer_scaling: bool = False, extrapolate: bool = False,
                    table: CalibrationTable | None = None) -> Prediction:
    """Force to elongate the swatch by ``displacement_mm``.

    Only stretch fabrics were pulled on the bench; the stitched lattice on
    a non-stretch base never loads in this mode, so asking is an error.
    Multi-layer tensile data does not exist; ``layer_scaling`` enables a
    linear stand-in that scales the single-layer curve by 1 + 2(n-1)/3.
    """
    _require_displacement(displacement_mm)
    spec = _resolve_fabric(fab)
    if not spec.is_stretch:
        raise NonStretchFabric(
            f"tensile prediction needs a stretch fabric, not {spec.name}")
    if layers < 1:
        raise InvariantViolation("layers must be >= 1")
    if displacement_mm == 0:
        return Prediction(0.0)
    tbl = table or default_table()

    knots = tbl.lookup(SeriesKey(geometry, config, spec.name, layers, TENSILE))
    if knots is not None:
        force, upper = _interp(knots, displacement_mm, extrapolate)
        return Prediction(force, upper_bound=upper)

    base = tbl.lookup(SeriesKey(geometry, config, spec.name, 1, TENSILE))
    if base is None:
        raise UnknownConfig(
            f"no tensile calibration for {config} on {spec.name} ({geometry})")
    if not layer_scaling:
        raise InsufficientCalibration(
            f"tensile response for {layers} layers is uncalibrated; pass "
            f"layer_scaling=True to scale the single-layer curve")
    force, upper = _interp(base, displacement_mm, extrapolate)
    scale = 1.0 + 2.0 * (layers - 1) / 3.0
    return Prediction(force * scale, upper_bound=upper, layer_interpolated=True)


# ---------------------------------------------------------------------------
# formability


@dataclass(frozen=True)
class Formability:
    classification: str  # GOOD or POOR
    warnings: tuple[str, ...] = ()


def classify_formability(config: EmbroideryConfig | str, fab: FabricSpec | str,
                         mold_diameter_mm: float = 30.0,
                         layers: int = 1) -> Formability:
    """Predict whether a config mold-forms a clean dome.

    On non-stretch bases forming quality tracks stitch spacing (dense
    penetrations pleat the fabric into the dome); on stretch bases it
    tracks line spacing (the knit stretches, the lattice must flex).
    """
    if isinstance(config, str):
        config = grid_config(config)
    spec = _resolve_fabric(fab)
    if float(mold_diameter_mm) not in MOLD_DIAMETERS_MM:
        raise UnsupportedMold(
            f"no mold data for {mold_diameter_mm:g} mm; available: 10, 20, 30")
    if layers < 1:
        raise InvariantViolation("layers must be >= 1")
    if spec.is_stretch:
        good = config.line_spacing <= 1.0 + 1e-9
    else:
        good = config.stitch_spacing <= 5.0 + 1e-9
    warnings: list[str] = []
    if layers >= 2:
        warnings.append(
            f"{layers} stacked layers give reduced mold conformance; "
            f"the formed dome comes out shallower than the mold")
    return Formability(GOOD if good else POOR, tuple(warnings))


# ---------------------------------------------------------------------------
# fabrication time


def minutes_per_layer(stitches: float) -> float:
    """Machine minutes for one layer with the given penetration count."""
    if not (math.isfinite(stitches) and stitches >= 0):
        raise InvariantViolation("stitch count must be >= 0")
    (s0, s1), (m0, m1) = _TIME_REF_STITCHES, _TIME_REF_MINUTES
    return m0 + (stitches - s0) * (m1 - m0) / (s1 - s0)


def estimate_fabrication_time(stitches_per_layer: float, layers: int = 1) -> float:
    """Total embroidery minutes for ``layers`` copies of one layer."""
    if layers < 1:
        raise InvariantViolation("layers must be >= 1")
    return minutes_per_layer(stitches_per_layer) * layers


# ---------------------------------------------------------------------------
# affordances

_AFFORDANCES: dict[str, tuple[str, ...]] = {
    "stiffness": ("thermoplastic quantity", "thermoplastic direction",
                  "fabric type"),
    "formability": ("thermoplastic direction", "fabric type"),
    "stretchability": ("thermoplastic direction", "fabric type"),
    "re-moldability": ("thermoplastic property",),
}


def affordance_hints(goal: str) -> tuple[str, ...]:
    """Which design parameters move a target property, most leveraged
    first. ``goal`` is one of stiffness, formability, stretchability,
    re-moldability."""
    key = goal.strip().lower().replace(" ", "-")
    if key == "remoldability":
        key = "re-moldability"
    try:
        return _AFFORDANCES[key]
    except KeyError:
        raise UnknownAffordance(
            f"unknown affordance {goal!r}; try one of "
            f"{', '.join(sorted(_AFFORDANCES))}") from None

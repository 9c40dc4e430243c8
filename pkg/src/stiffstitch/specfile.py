"""Design and requirements files.

Both are line-oriented text: ``[section]`` headers, ``key = value``
entries, ``#`` comments, case-sensitive keys. A design file has
``[design]``, ``[region]`` and ``[pattern]`` sections and compiles to a
stitch plan; a requirements file has one ``[requirements]`` section and
parses to the solver's input.

Parsing records which keys fell back to their defaults, and printing
omits exactly those keys, so parse -> print -> parse is identity on the
record. Floats are printed with repr so values survive the trip
bit-exactly.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

from .errors import ParseError, UnknownKey
from .geometry import (
    CONCENTRIC,
    EmbroideryConfig,
    LINEAR,
    PRIMITIVES,
    RADIAL,
    Point2,
    Region,
    StitchPlan,
    concentric_fill,
    linear_fill,
    radial_fill,
)
from .materials import FabricSpec, ThreadSpec, fabric as fabric_lookup, thread as thread_lookup
from .solver import ANY_FABRIC, FORMABILITY_LEVELS, FORM_NONE, Requirements

RECTANGLE_KEYS = ("width_mm", "height_mm")
CIRCLE_KEYS = ("radius_mm", "center")


@dataclass(frozen=True)
class DesignSpec:
    """A parsed design file, ready to compile."""

    name: str
    fabric: FabricSpec
    layers: int
    thread: ThreadSpec
    thread_name: str
    region: Region
    config: EmbroideryConfig
    defaulted: frozenset[str]


# ---------------------------------------------------------------------------
# low-level section reader


def _read_sections(text: str) -> dict[str, dict[str, tuple[str, int]]]:
    """Split text into {section: {key: (value, line)}}."""
    sections: dict[str, dict[str, tuple[str, int]]] = {}
    current: dict[str, tuple[str, int]] | None = None
    current_name = ""
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("["):
            if not line.endswith("]"):
                raise ParseError("unterminated section header", line=lineno)
            name = line[1:-1].strip()
            if not name:
                raise ParseError("empty section name", line=lineno)
            if name in sections:
                raise ParseError(f"duplicate section [{name}]", line=lineno)
            current = {}
            current_name = name
            sections[name] = current
            continue
        if "=" not in line:
            raise ParseError("expected 'key = value'", line=lineno)
        key, value = (part.strip() for part in line.split("=", 1))
        if not key:
            raise ParseError("empty key", line=lineno)
        if current is None:
            raise ParseError(f"key {key!r} appears before any section",
                             line=lineno)
        if key in current:
            raise ParseError(f"duplicate key {key!r} in [{current_name}]",
                             line=lineno)
        current[key] = (value, lineno)
    return sections


def _require_section(sections, name: str) -> dict[str, tuple[str, int]]:
    try:
        return sections[name]
    except KeyError:
        raise ParseError(f"missing [{name}] section") from None


def _reject_unknown(section_name: str, entries: dict[str, tuple[str, int]],
                    allowed: tuple[str, ...]) -> None:
    for key, (_, lineno) in entries.items():
        if key not in allowed:
            raise UnknownKey(f"unknown key {key!r} in [{section_name}]",
                             line=lineno)


def _take(entries: dict[str, tuple[str, int]], key: str):
    return entries.get(key)


def _as_float(key: str, value: str, lineno: int) -> float:
    try:
        return float(value)
    except ValueError:
        raise ParseError(f"{key} must be a number, got {value!r}",
                         line=lineno) from None


def _as_nonneg(key: str, value: str, lineno: int) -> float:
    v = _as_float(key, value, lineno)
    if v < 0:
        raise ParseError(f"{key} must be >= 0, got {value}", line=lineno)
    return v


def _as_positive(key: str, value: str, lineno: int) -> float:
    v = _as_float(key, value, lineno)
    if not v > 0:
        raise ParseError(f"{key} must be positive, got {value}", line=lineno)
    return v


def _as_int(key: str, value: str, lineno: int) -> int:
    try:
        return int(value)
    except ValueError:
        raise ParseError(f"{key} must be an integer, got {value!r}",
                         line=lineno) from None


def _as_point(key: str, value: str, lineno: int) -> Point2:
    parts = value.split(",")
    if len(parts) != 2:
        raise ParseError(f"{key} must be 'x, y', got {value!r}", line=lineno)
    return Point2(_as_float(key, parts[0].strip(), lineno),
                  _as_float(key, parts[1].strip(), lineno))


# ---------------------------------------------------------------------------
# design files


def parse_design_spec(text: str) -> DesignSpec:
    """Parse a design file; apply and record defaults."""
    sections = _read_sections(text)
    for name in sections:
        if name not in ("design", "region", "pattern"):
            raise ParseError(f"unknown section [{name}]")
    design = _require_section(sections, "design")
    region_sec = _require_section(sections, "region")
    pattern = _require_section(sections, "pattern")
    defaulted: set[str] = set()

    _reject_unknown("design", design, ("name", "fabric", "layers", "thread"))
    for key in ("name", "fabric", "layers"):
        if key not in design:
            raise ParseError(f"missing key {key!r} in [design]")
    name = design["name"][0]
    if not name:
        raise ParseError("design name must not be empty",
                         line=design["name"][1])
    fab = fabric_lookup(design["fabric"][0])
    layers = _as_int("layers", *design["layers"])
    if layers < 1:
        raise ParseError("layers must be >= 1", line=design["layers"][1])
    if "thread" in design:
        thread_name = design["thread"][0]
    else:
        thread_name = "tex60"
        defaulted.add("thread")
    thr = thread_lookup(thread_name)

    if "shape" not in region_sec:
        raise ParseError("missing key 'shape' in [region]")
    shape, shape_line = region_sec["shape"]
    if shape == "rectangle":
        _reject_unknown("region", region_sec, ("shape",) + RECTANGLE_KEYS)
        for key in RECTANGLE_KEYS:
            if key not in region_sec:
                raise ParseError(f"missing key {key!r} in [region]")
        region = Region.rectangle(
            _as_positive("width_mm", *region_sec["width_mm"]),
            _as_positive("height_mm", *region_sec["height_mm"]))
    elif shape == "circle":
        _reject_unknown("region", region_sec, ("shape",) + CIRCLE_KEYS)
        if "radius_mm" not in region_sec:
            raise ParseError("missing key 'radius_mm' in [region]")
        if "center" in region_sec:
            center = _as_point("center", *region_sec["center"])
        else:
            center = Point2(0.0, 0.0)
            defaulted.add("center")
        region = Region.circle(center,
                               _as_positive("radius_mm", *region_sec["radius_mm"]))
    else:
        raise ParseError(f"shape must be rectangle or circle, got {shape!r}",
                         line=shape_line)

    _reject_unknown("pattern", pattern,
                    ("primitive", "line_spacing_mm", "stitch_spacing_mm",
                     "angle_deg", "waviness_amp_mm", "waviness_period_mm"))
    for key in ("primitive", "line_spacing_mm", "stitch_spacing_mm"):
        if key not in pattern:
            raise ParseError(f"missing key {key!r} in [pattern]")
    primitive, prim_line = pattern["primitive"]
    if primitive not in PRIMITIVES:
        raise ParseError(
            f"primitive must be one of {', '.join(PRIMITIVES)}, got "
            f"{primitive!r}", line=prim_line)
    kwargs = {
        "line_spacing": _as_positive("line_spacing_mm",
                                     *pattern["line_spacing_mm"]),
        "stitch_spacing": _as_positive("stitch_spacing_mm",
                                       *pattern["stitch_spacing_mm"]),
    }
    if "angle_deg" in pattern:
        kwargs["angle"] = _as_float("angle_deg", *pattern["angle_deg"])
    else:
        defaulted.add("angle_deg")
    if "waviness_amp_mm" in pattern:
        kwargs["waviness_amplitude"] = _as_nonneg("waviness_amp_mm",
                                                  *pattern["waviness_amp_mm"])
    else:
        defaulted.add("waviness_amp_mm")
    if "waviness_period_mm" in pattern:
        kwargs["waviness_period"] = _as_positive("waviness_period_mm",
                                                 *pattern["waviness_period_mm"])
    else:
        defaulted.add("waviness_period_mm")
    config = EmbroideryConfig(primitive, **kwargs)

    return DesignSpec(name=name, fabric=fab, layers=layers, thread=thr,
                      thread_name=thread_name, region=region, config=config,
                      defaulted=frozenset(defaulted))


def format_design_spec(spec: DesignSpec) -> str:
    """Print a design record back to file text, skipping defaulted keys."""
    out = ["[design]",
           f"name = {spec.name}",
           f"fabric = {spec.fabric.name}",
           f"layers = {spec.layers}"]
    if "thread" not in spec.defaulted:
        out.append(f"thread = {spec.thread_name}")
    out += ["", "[region]"]
    region = spec.region
    if region.kind == "rectangle":
        out += ["shape = rectangle",
                f"width_mm = {region.width!r}",
                f"height_mm = {region.height!r}"]
    else:
        out += ["shape = circle",
                f"radius_mm = {region.radius!r}"]
        if "center" not in spec.defaulted:
            out.append(f"center = {region.center.x!r}, {region.center.y!r}")
    cfg = spec.config
    out += ["", "[pattern]",
            f"primitive = {cfg.primitive}",
            f"line_spacing_mm = {cfg.line_spacing!r}",
            f"stitch_spacing_mm = {cfg.stitch_spacing!r}"]
    if "angle_deg" not in spec.defaulted:
        out.append(f"angle_deg = {cfg.angle!r}")
    if "waviness_amp_mm" not in spec.defaulted:
        out.append(f"waviness_amp_mm = {cfg.waviness_amplitude!r}")
    if "waviness_period_mm" not in spec.defaulted:
        out.append(f"waviness_period_mm = {cfg.waviness_period!r}")
    return "\n".join(out) + "\n"


def build_plan(spec: DesignSpec) -> StitchPlan:
    """Compile a parsed design into its stitch plan."""
    fill = {LINEAR: linear_fill, RADIAL: radial_fill,
            CONCENTRIC: concentric_fill}[spec.config.primitive]
    plan = fill(spec.region, spec.config)
    return replace(plan, layer_count=spec.layers, name=spec.name)


# ---------------------------------------------------------------------------
# requirements files

_REQ_KEYS = ("geometry", "fabric", "min_compression_n", "min_compression_at_mm",
             "max_tensile_n", "max_tensile_at_mm", "formability",
             "mold_diameter_mm", "max_layers")


def parse_requirements(text: str) -> Requirements:
    """Parse a requirements file into the solver's input record."""
    sections = _read_sections(text)
    for name in sections:
        if name != "requirements":
            raise ParseError(f"unknown section [{name}]")
    entries = _require_section(sections, "requirements")
    _reject_unknown("requirements", entries, _REQ_KEYS)

    def pair(stem: str) -> tuple[float, float] | None:
        n_key, at_key = f"{stem}_n", f"{stem}_at_mm"
        have_n, have_at = n_key in entries, at_key in entries
        if have_n != have_at:
            present = n_key if have_n else at_key
            raise ParseError(f"{n_key} and {at_key} go together",
                             line=entries[present][1])
        if not have_n:
            return None
        return (_as_nonneg(n_key, *entries[n_key]),
                _as_nonneg(at_key, *entries[at_key]))

    kwargs: dict = {}
    if "geometry" in entries:
        kwargs["geometry"] = entries["geometry"][0]
    if "fabric" in entries:
        value, lineno = entries["fabric"]
        if value not in (ANY_FABRIC, "non-stretch", "stretch"):
            fabric_lookup(value)  # raises UnknownFabric for anything else
        kwargs["fabric"] = value
    mc = pair("min_compression")
    if mc is not None:
        kwargs["min_compression"] = mc
    mt = pair("max_tensile")
    if mt is not None:
        kwargs["max_tensile"] = mt
    if "formability" in entries:
        value, lineno = entries["formability"]
        if value not in FORMABILITY_LEVELS:
            raise ParseError(
                f"formability must be one of {', '.join(FORMABILITY_LEVELS)}",
                line=lineno)
        kwargs["formability"] = value
    if "mold_diameter_mm" in entries:
        kwargs["mold_diameter_mm"] = _as_positive("mold_diameter_mm",
                                                  *entries["mold_diameter_mm"])
    if "max_layers" in entries:
        value, lineno = entries["max_layers"]
        layers = _as_int("max_layers", value, lineno)
        if layers < 1:
            raise ParseError("max_layers must be >= 1", line=lineno)
        kwargs["max_layers"] = layers

    if (kwargs.get("min_compression") is None
            and kwargs.get("max_tensile") is None
            and kwargs.get("formability", FORM_NONE) == FORM_NONE):
        raise ParseError("no constraint present in [requirements]")
    return Requirements(**kwargs)


def format_requirements(req: Requirements) -> str:
    """Print a requirements record, skipping default-valued keys."""
    defaults = {"geometry": "swatch-100", "fabric": ANY_FABRIC,
                "formability": FORM_NONE, "mold_diameter_mm": 30.0,
                "max_layers": 4}
    out = ["[requirements]"]
    if req.geometry != defaults["geometry"]:
        out.append(f"geometry = {req.geometry}")
    if req.fabric != defaults["fabric"]:
        out.append(f"fabric = {req.fabric}")
    if req.min_compression is not None:
        out.append(f"min_compression_n = {req.min_compression[0]!r}")
        out.append(f"min_compression_at_mm = {req.min_compression[1]!r}")
    if req.max_tensile is not None:
        out.append(f"max_tensile_n = {req.max_tensile[0]!r}")
        out.append(f"max_tensile_at_mm = {req.max_tensile[1]!r}")
    if req.formability != defaults["formability"]:
        out.append(f"formability = {req.formability}")
    if req.mold_diameter_mm != defaults["mold_diameter_mm"]:
        out.append(f"mold_diameter_mm = {req.mold_diameter_mm!r}")
    if req.max_layers != defaults["max_layers"]:
        out.append(f"max_layers = {req.max_layers}")
    return "\n".join(out) + "\n"

"""Inverse design over the discrete embroidery grid.

The search space is the 9 characterized configs crossed with the
admissible fabrics and layer counts; at 72 nodes or fewer it is enumerated
exhaustively. Candidates that violate a requirement are rejected with the
violation spelled out; candidates the calibration table cannot price are
reported as skipped rather than guessed at. Survivors compete on three
minimized objectives: fabrication minutes, layer count, and total
penetrations (a fabric-damage proxy).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

from .calibration import (
    SWATCH,
    CalibrationTable,
    Formability,
    Prediction,
    affordance_hints,
    classify_formability,
    estimate_fabrication_time,
    predict_compression,
    predict_tensile,
)
from .errors import (
    InsufficientCalibration,
    InvariantViolation,
    UnknownConfig,
)
from .geometry import (
    GRID_CONFIG_IDS,
    parse_config_id,
    swatch_stitch_count,
)
from .materials import NON_STRETCH, STRETCH, FabricSpec, fabric as fabric_spec, primary_fabrics

ANY_FABRIC = "any"

FORM_NONE = "none"
SINGLE_CURVE = "single-curve"
DOUBLE_CURVE = "double-curve"
FORMABILITY_LEVELS = (FORM_NONE, SINGLE_CURVE, DOUBLE_CURVE)


@dataclass(frozen=True)
class Requirements:
    """What the artifact must do. At least one constraint is mandatory."""

    fabric: str = ANY_FABRIC  # any | non-stretch | stretch | a fabric name
    min_compression: tuple[float, float] | None = None  # (N, at mm)
    max_tensile: tuple[float, float] | None = None      # (N, at mm)
    formability: str = FORM_NONE
    mold_diameter_mm: float = 30.0
    geometry: str = SWATCH
    max_layers: int = 4

    def __post_init__(self):
        if self.formability not in FORMABILITY_LEVELS:
            raise InvariantViolation(
                f"formability must be one of {FORMABILITY_LEVELS}")
        if self.max_layers < 1:
            raise InvariantViolation("max_layers must be >= 1")
        for name, pair in (("min_compression", self.min_compression),
                           ("max_tensile", self.max_tensile)):
            if pair is None:
                continue
            force, at = pair
            if not (math.isfinite(force) and force >= 0):
                raise InvariantViolation(f"{name} force must be >= 0")
            if not (math.isfinite(at) and at >= 0):
                raise InvariantViolation(f"{name} displacement must be >= 0")
        if (self.min_compression is None and self.max_tensile is None
                and self.formability == FORM_NONE):
            raise InvariantViolation("no constraint present in requirements")


@dataclass(frozen=True)
class Candidate:
    """One grid point, annotated with predictions and objective values."""

    config_id: str
    fabric: str
    layers: int
    line_spacing: float
    stitch_spacing: float
    stitches: int   # penetrations across all layers
    minutes: float
    compression: Prediction | None = None
    tensile: Prediction | None = None
    formability: Formability | None = None
    missing_calibration: str | None = None
    violations: tuple[str, ...] = ()
    explanation: str = ""

    @property
    def objectives(self) -> tuple[float, int, int]:
        return (self.minutes, self.layers, self.stitches)

    @property
    def feasible(self) -> bool:
        return self.missing_calibration is None and not self.violations


@dataclass(frozen=True)
class NearMiss:
    candidate: Candidate
    shortfall_n: float


@dataclass(frozen=True)
class SolveResult:
    feasible: bool
    pareto_front: tuple[Candidate, ...]
    rejected_count: int
    skipped_for_missing_calibration: tuple[Candidate, ...]
    near_miss: NearMiss | None = None


def admissible_fabrics(req: Requirements) -> tuple[FabricSpec, ...]:
    """Fabrics the constraint allows; class names pick the primary of the
    class, 'any' both primaries, anything else a registry name."""
    if req.fabric == ANY_FABRIC:
        return tuple(primary_fabrics())
    if req.fabric in (NON_STRETCH, STRETCH):
        return tuple(f for f in primary_fabrics() if f.stretch == req.fabric)
    return (fabric_spec(req.fabric),)


def _order_key(c: Candidate) -> tuple:
    return (c.layers, -c.line_spacing, -c.stitch_spacing, c.fabric)


def _explain(req: Requirements, config_id: str, spec: FabricSpec,
             layers: int) -> str:
    hints = affordance_hints("stiffness")
    line, stitch = parse_config_id(config_id)
    parts = [
        f"{config_id} puts thermoplastic down at {line:g} mm line and "
        f"{stitch:g} mm stitch spacing ({hints[0]}) on {spec.name} "
        f"({hints[2]}); {layers} layer{'s' if layers != 1 else ''}"
    ]
    if req.formability == DOUBLE_CURVE:
        parts.append(
            "double curvature needs a stretch base with a concentric or "
            "radial wavy layout rather than parallel lines "
            f"({', '.join(affordance_hints('formability'))})")
    return "; ".join(parts)


def _evaluate(req: Requirements, config_id: str, spec: FabricSpec, layers: int,
              table: CalibrationTable | None) -> Candidate:
    line, stitch = parse_config_id(config_id)
    per_layer = swatch_stitch_count(config_id)
    cand = Candidate(
        config_id=config_id,
        fabric=spec.name,
        layers=layers,
        line_spacing=line,
        stitch_spacing=stitch,
        stitches=per_layer * layers,
        minutes=estimate_fabrication_time(per_layer, layers),
        explanation=_explain(req, config_id, spec, layers),
    )
    violations: list[str] = []

    if req.min_compression is not None:
        force, at = req.min_compression
        try:
            pred = predict_compression(config_id, spec, at, layers=layers,
                                       geometry=req.geometry, table=table)
        except (UnknownConfig, InsufficientCalibration) as exc:
            return replace(cand, missing_calibration=str(exc))
        cand = replace(cand, compression=pred)
        if pred.upper_bound:
            violations.append(
                f"compression at {at:g} mm is only bounded above "
                f"({pred.force_n:g} N); cannot verify >= {force:g} N")
        elif pred.force_n < force:
            violations.append(
                f"compression {pred.force_n:g} N at {at:g} mm is below the "
                f"required {force:g} N")

    if req.max_tensile is not None:
        force, at = req.max_tensile
        if not spec.is_stretch:
            violations.append(
                f"{spec.name} does not stretch, so a {force:g} N elongation "
                f"budget cannot be met")
        else:
            try:
                pred = predict_tensile(config_id, spec, at, layers=layers,
                                       geometry=SWATCH, table=table)
            except (UnknownConfig, InsufficientCalibration) as exc:
                return replace(cand, missing_calibration=str(exc),
                               violations=tuple(violations))
            cand = replace(cand, tensile=pred)
            if pred.force_n > force:
                violations.append(
                    f"tensile {pred.force_n:g} N at {at:g} mm exceeds the "
                    f"allowed {force:g} N")

    if req.formability != FORM_NONE:
        if req.formability == DOUBLE_CURVE and not spec.is_stretch:
            violations.append(
                "double-curve formability needs a stretch base fabric")
        else:
            form = classify_formability(config_id, spec,
                                        mold_diameter_mm=req.mold_diameter_mm,
                                        layers=layers)
            cand = replace(cand, formability=form)
            if form.classification != "good":
                violations.append(
                    f"formability on {spec.name} classifies as "
                    f"{form.classification}")

    return replace(cand, violations=tuple(violations))


def enumerate_candidates(req: Requirements,
                         table: CalibrationTable | None = None) -> list[Candidate]:
    """The full config-by-fabric-by-layers cross product, each node
    annotated with predictions, violations, or the missing-data reason."""
    out = []
    for config_id in GRID_CONFIG_IDS:
        for spec in admissible_fabrics(req):
            for layers in range(1, req.max_layers + 1):
                out.append(_evaluate(req, config_id, spec, layers, table))
    return out


def _dominates(a: Candidate, b: Candidate) -> bool:
    ao, bo = a.objectives, b.objectives
    return all(x <= y for x, y in zip(ao, bo)) and ao != bo


def _shortfall(req: Requirements, c: Candidate) -> float:
    """Total newtons by which a rejected candidate misses the force
    constraints; infinite when the miss is not a force gap."""
    total = 0.0
    if req.min_compression is not None:
        force, _ = req.min_compression
        if c.compression is None or c.compression.upper_bound:
            return math.inf
        total += max(0.0, force - c.compression.force_n)
    if req.max_tensile is not None:
        force, _ = req.max_tensile
        if c.tensile is None:
            return math.inf
        total += max(0.0, c.tensile.force_n - force)
    if any("formability" in v or "stretch base" in v or "does not stretch" in v
           for v in c.violations):
        return math.inf
    return total if total > 0 else math.inf


def solve(req: Requirements,
          table: CalibrationTable | None = None) -> SolveResult:
    """Filter the grid by the requirements and keep the Pareto-optimal
    survivors, ordered by (layers, line spacing desc, stitch spacing desc,
    fabric). Infeasible requirements return the closest force miss."""
    candidates = enumerate_candidates(req, table)
    skipped = tuple(sorted((c for c in candidates if c.missing_calibration),
                           key=_order_key))
    rejected = [c for c in candidates
                if c.missing_calibration is None and c.violations]
    feasible = [c for c in candidates if c.feasible]

    front = sorted((c for c in feasible
                    if not any(_dominates(o, c) for o in feasible)),
                   key=_order_key)
    if front:
        return SolveResult(True, tuple(front), len(rejected), skipped)

    near = None
    best = math.inf
    for c in sorted(rejected, key=_order_key):
        s = _shortfall(req, c)
        if s < best:
            best, near = s, NearMiss(c, s)
    return SolveResult(False, (), len(rejected), skipped, near_miss=near)


def feasibility_report(result: SolveResult) -> str:
    """Human-readable summary of a solve."""
    lines: list[str] = []
    if result.feasible:
        n = len(result.pareto_front)
        lines.append(f"feasible: {n} design{'s' if n != 1 else ''} on the "
                     f"Pareto front")
        for c in result.pareto_front:
            props = []
            if c.compression is not None:
                star = " (upper bound)" if c.compression.upper_bound else ""
                props.append(f"compression {c.compression.force_n:g} N{star}")
            if c.tensile is not None:
                star = " (upper bound)" if c.tensile.upper_bound else ""
                props.append(f"tensile {c.tensile.force_n:g} N{star}")
            if c.formability is not None:
                props.append(f"formability {c.formability.classification}")
            props.append(f"{c.minutes:.1f} min")
            props.append(f"{c.stitches} stitches")
            lines.append(f"  {c.config_id} on {c.fabric}, {c.layers} "
                         f"layer{'s' if c.layers != 1 else ''}: "
                         + ", ".join(props))
            lines.append(f"    {c.explanation}")
            if c.formability is not None:
                for w in c.formability.warnings:
                    lines.append(f"    note: {w}")
    else:
        lines.append("infeasible: no design in the characterized grid meets "
                     "the requirements")
        if result.near_miss is not None:
            c = result.near_miss.candidate
            lines.append(
                f"  nearest miss: {c.config_id} on {c.fabric}, {c.layers} "
                f"layer{'s' if c.layers != 1 else ''}")
            for v in c.violations:
                lines.append(f"    {v}")
            if math.isfinite(result.near_miss.shortfall_n):
                lines.append(
                    f"  reason: shortfall_n={result.near_miss.shortfall_n:g}")
        else:
            lines.append("  reason: no candidate had calibration data for "
                         "the requested geometry and displacement")
    if result.skipped_for_missing_calibration:
        lines.append(f"skipped (no calibration data): "
                     f"{len(result.skipped_for_missing_calibration)} candidates")
        seen: list[str] = []
        for c in result.skipped_for_missing_calibration:
            reason = c.missing_calibration or ""
            if reason not in seen:
                seen.append(reason)
        for reason in seen[:6]:
            lines.append(f"  {reason}")
    lines.append(f"rejected by constraints: {result.rejected_count}")
    return "\n".join(lines) + "\n"

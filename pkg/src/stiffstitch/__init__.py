"""stiffstitch: a design compiler for re-moldable thermoplastic embroidery.

Turns a small text spec (region + stitch layout + fabric) into a Tajima
DST stitch program, predicts the molded part's force response from bench
calibration tables, and searches the characterized design grid for
layouts that meet force and formability requirements.
"""

__version__ = "0.1.0"

from .calibration import (
    CalibrationTable,
    Prediction,
    affordance_hints,
    classify_formability,
    default_table,
    estimate_fabrication_time,
    load_calibration,
    predict_compression,
    predict_tensile,
)
from .dst import read_dst, write_dst
from .errors import StiffstitchError
from .geometry import (
    EmbroideryConfig,
    PlanPoint,
    Point2,
    Region,
    StitchPlan,
    clip_to_region,
    concentric_fill,
    grid_config,
    linear_fill,
    radial_fill,
    validate_design,
)
from .instructions import render_instructions
from .solver import Requirements, SolveResult, feasibility_report, solve
from .specfile import (
    DesignSpec,
    build_plan,
    format_design_spec,
    format_requirements,
    parse_design_spec,
    parse_requirements,
)
from .svg import write_svg

__all__ = [
    "CalibrationTable",
    "DesignSpec",
    "EmbroideryConfig",
    "PlanPoint",
    "Point2",
    "Prediction",
    "Region",
    "Requirements",
    "SolveResult",
    "StiffstitchError",
    "StitchPlan",
    "affordance_hints",
    "build_plan",
    "classify_formability",
    "clip_to_region",
    "concentric_fill",
    "default_table",
    "estimate_fabrication_time",
    "feasibility_report",
    "format_design_spec",
    "format_requirements",
    "grid_config",
    "linear_fill",
    "load_calibration",
    "parse_design_spec",
    "parse_requirements",
    "predict_compression",
    "predict_tensile",
    "radial_fill",
    "read_dst",
    "render_instructions",
    "solve",
    "validate_design",
    "write_dst",
    "write_svg",
    "__version__",
]

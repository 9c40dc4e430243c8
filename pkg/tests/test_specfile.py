from __future__ import annotations

import pytest

from stiffstitch.errors import ParseError, UnknownFabric, UnknownKey
from stiffstitch.geometry import CONCENTRIC, LINEAR, RADIAL
from stiffstitch.solver import Requirements
from stiffstitch.specfile import (
    build_plan,
    format_design_spec,
    format_requirements,
    parse_design_spec,
    parse_requirements,
)


def design_text(**overrides) -> str:
    """A minimal valid design file, with per-line overrides for error tests."""
    lines = {
        "name": "name = patch",
        "fabric": "fabric = nonstretch-336",
        "layers": "layers = 2",
        "shape": "shape = rectangle",
        "width": "width_mm = 30",
        "height": "height_mm = 10",
        "primitive": "primitive = linear",
        "line": "line_spacing_mm = 2",
        "stitch": "stitch_spacing_mm = 5",
    }
    lines.update(overrides)
    return "\n".join([
        "[design]", lines["name"], lines["fabric"], lines["layers"],
        "", "[region]", lines["shape"], lines["width"], lines["height"],
        "", "[pattern]", lines["primitive"], lines["line"], lines["stitch"],
    ]) + "\n"


# ---------------------------------------------------------------------------
# cookbook files


def test_splint_spec_fields(cookbook):
    spec = parse_design_spec((cookbook / "splint.spec").read_text())
    assert spec.name == "wrist-splint"
    assert spec.fabric.name == "nonstretch-336"
    assert spec.layers == 4
    assert spec.thread_name == "tex60"
    assert spec.region.kind == "rectangle"
    assert (spec.region.width, spec.region.height) == (80.0, 20.0)
    assert spec.config.primitive == LINEAR
    assert spec.config.line_spacing == pytest.approx(0.66)
    assert spec.config.stitch_spacing == 1.0
    # thread was explicit, so only the pattern extras fall back
    assert spec.defaulted == frozenset(
        {"angle_deg", "waviness_amp_mm", "waviness_period_mm"})


def test_bra_spec_fields(cookbook):
    spec = parse_design_spec((cookbook / "bra.spec").read_text())
    assert spec.name == "bra-dome"
    assert spec.fabric.is_stretch
    assert spec.layers == 1
    assert spec.region.kind == "circle"
    assert spec.region.radius == 50.0
    assert (spec.region.center.x, spec.region.center.y) == (0.0, 0.0)
    assert spec.config.primitive == CONCENTRIC
    assert spec.config.waviness_amplitude == 1.5
    assert spec.config.waviness_period == 10.0
    assert spec.defaulted == frozenset(
        {"thread", "center", "angle_deg", "waviness_amp_mm",
         "waviness_period_mm"})


def test_cookbook_specs_roundtrip(cookbook):
    for stem in ("splint", "bra", "lampshade"):
        spec = parse_design_spec((cookbook / f"{stem}.spec").read_text())
        text = format_design_spec(spec)
        assert parse_design_spec(text) == spec


def test_formatter_omits_defaulted_keys(cookbook):
    text = format_design_spec(
        parse_design_spec((cookbook / "bra.spec").read_text()))
    assert "thread" not in text
    assert "center" not in text
    assert "waviness" not in text
    # explicit thread survives
    text = format_design_spec(
        parse_design_spec((cookbook / "splint.spec").read_text()))
    assert "thread = tex60" in text


def test_cookbook_requirements_roundtrip(cookbook):
    for stem in ("splint", "bra"):
        req = parse_requirements((cookbook / f"{stem}.req").read_text())
        assert parse_requirements(format_requirements(req)) == req


def test_splint_requirements_fields(cookbook):
    req = parse_requirements((cookbook / "splint.req").read_text())
    assert req == Requirements(fabric="non-stretch",
                               min_compression=(6.4, 5.0),
                               geometry="splint")


# ---------------------------------------------------------------------------
# parsing behaviour


def test_floats_survive_print_parse_print():
    text = design_text(line="line_spacing_mm = 0.1",
                       stitch="stitch_spacing_mm = 0.30000000000000004")
    spec = parse_design_spec(text)
    again = parse_design_spec(format_design_spec(spec))
    assert again.config.line_spacing == spec.config.line_spacing
    assert again.config.stitch_spacing == spec.config.stitch_spacing
    assert format_design_spec(again) == format_design_spec(spec)


def test_comments_and_blank_lines_ignored():
    text = design_text(layers="layers = 2   # stacked pair")
    text = "# header comment\n\n" + text
    assert parse_design_spec(text).layers == 2


def test_optional_pattern_keys():
    text = design_text(stitch="stitch_spacing_mm = 5\nangle_deg = 30\n"
                              "waviness_amp_mm = 2.5\nwaviness_period_mm = 8")
    spec = parse_design_spec(text)
    assert spec.config.angle == 30.0
    assert spec.config.waviness_amplitude == 2.5
    assert spec.config.waviness_period == 8.0
    assert spec.defaulted == frozenset({"thread"})
    assert "angle_deg = 30.0" in format_design_spec(spec)


def test_circle_with_explicit_center():
    text = ("[design]\nname = d\nfabric = stretch-390\nlayers = 1\n"
            "[region]\nshape = circle\nradius_mm = 10\ncenter = 3, -4\n"
            "[pattern]\nprimitive = radial\nline_spacing_mm = 1\n"
            "stitch_spacing_mm = 5\n")
    spec = parse_design_spec(text)
    assert (spec.region.center.x, spec.region.center.y) == (3.0, -4.0)
    assert "center" not in spec.defaulted
    assert "center = 3.0, -4.0" in format_design_spec(spec)


# ---------------------------------------------------------------------------
# error reporting


def test_missing_section_is_named():
    text = "[design]\nname = d\nfabric = nonstretch-336\nlayers = 1\n"
    with pytest.raises(ParseError, match=r"missing \[region\] section"):
        parse_design_spec(text)


def test_unknown_key_carries_line_number():
    text = design_text(layers="layers = 2\ncolour = red")
    with pytest.raises(UnknownKey) as exc:
        parse_design_spec(text)
    assert exc.value.line == 5
    assert "line 5" in str(exc.value)
    assert "colour" in str(exc.value)


def test_duplicate_key_rejected():
    text = design_text(layers="layers = 2\nlayers = 3")
    with pytest.raises(ParseError, match="duplicate key 'layers'"):
        parse_design_spec(text)


def test_duplicate_section_rejected():
    text = design_text() + "\n[design]\n"
    with pytest.raises(ParseError, match=r"duplicate section \[design\]"):
        parse_design_spec(text)


def test_key_before_any_section():
    with pytest.raises(ParseError, match="before any section"):
        parse_design_spec("name = d\n" + design_text())


def test_unterminated_section_header():
    with pytest.raises(ParseError, match="unterminated"):
        parse_design_spec("[design\n")


def test_line_without_equals():
    with pytest.raises(ParseError, match="key = value"):
        parse_design_spec("[design]\njust words\n")


@pytest.mark.parametrize("override, message", [
    ({"layers": "layers = 2.5"}, "must be an integer"),
    ({"layers": "layers = 0"}, "layers must be >= 1"),
    ({"width": "width_mm = squid"}, "must be a number"),
    ({"width": "width_mm = -3"}, "must be positive"),
    ({"line": "line_spacing_mm = 0"}, "must be positive"),
    ({"shape": "shape = hexagon"}, "rectangle or circle"),
    ({"primitive": "primitive = zigzag"}, "primitive must be one of"),
])
def test_bad_values(override, message):
    with pytest.raises(ParseError, match=message):
        parse_design_spec(design_text(**override))


def test_unknown_fabric_in_design():
    with pytest.raises(UnknownFabric):
        parse_design_spec(design_text(fabric="fabric = kevlar-900"))


def test_rectangle_rejects_circle_keys():
    text = design_text(height="height_mm = 10\nradius_mm = 4")
    with pytest.raises(UnknownKey, match="radius_mm"):
        parse_design_spec(text)


def test_malformed_center():
    text = ("[design]\nname = d\nfabric = stretch-390\nlayers = 1\n"
            "[region]\nshape = circle\nradius_mm = 10\ncenter = 3\n"
            "[pattern]\nprimitive = radial\nline_spacing_mm = 1\n"
            "stitch_spacing_mm = 5\n")
    with pytest.raises(ParseError, match="must be 'x, y'"):
        parse_design_spec(text)


def test_requirement_pairs_must_travel_together():
    text = "[requirements]\nmin_compression_n = 5\n"
    with pytest.raises(ParseError, match="go together"):
        parse_requirements(text)
    text = "[requirements]\nmax_tensile_at_mm = 20\n"
    with pytest.raises(ParseError, match="go together"):
        parse_requirements(text)


def test_requirements_need_some_constraint():
    with pytest.raises(ParseError, match="no constraint present"):
        parse_requirements("[requirements]\ngeometry = splint\n")


def test_requirements_negative_force_rejected():
    text = ("[requirements]\nmin_compression_n = -1\n"
            "min_compression_at_mm = 5\n")
    with pytest.raises(ParseError, match=">= 0"):
        parse_requirements(text)


def test_requirements_fabric_checked_against_registry():
    text = ("[requirements]\nfabric = vantablack\n"
            "min_compression_n = 1\nmin_compression_at_mm = 5\n")
    with pytest.raises(UnknownFabric):
        parse_requirements(text)
    # class names and registry names both pass
    for name in ("any", "non-stretch", "stretch", "stretch-189"):
        req = parse_requirements(
            f"[requirements]\nfabric = {name}\n"
            "min_compression_n = 1\nmin_compression_at_mm = 5\n")
        assert req.fabric == name


def test_requirements_bad_formability():
    text = "[requirements]\nformability = spherical\n"
    with pytest.raises(ParseError, match="formability must be one of"):
        parse_requirements(text)


def test_requirements_unknown_key_line():
    text = "[requirements]\nmin_force = 5\n"
    with pytest.raises(UnknownKey) as exc:
        parse_requirements(text)
    assert exc.value.line == 2


# ---------------------------------------------------------------------------
# compilation


def test_build_plan_dispatch_and_metadata(cookbook):
    spec = parse_design_spec((cookbook / "splint.spec").read_text())
    plan = spec and build_plan(spec)
    assert plan.layer_count == 4
    assert plan.name == "wrist-splint"
    # 30 serpentine lines of 81 stitches, sewn into one jump-free chain
    assert plan.stitch_count == 30 * 81
    assert len(plan.points) == 30 * 81
    assert not any(p.kind == "jump" for p in plan.points)

    for stem, primitive in (("bra", CONCENTRIC), ("lampshade", LINEAR)):
        spec = parse_design_spec((cookbook / f"{stem}.spec").read_text())
        plan = build_plan(spec)
        assert plan.config.primitive == primitive
        assert plan.layer_count == spec.layers
        plan.validate()


def test_build_plan_radial():
    text = ("[design]\nname = wheel\nfabric = stretch-390\nlayers = 1\n"
            "[region]\nshape = circle\nradius_mm = 20\n"
            "[pattern]\nprimitive = radial\nline_spacing_mm = 2\n"
            "stitch_spacing_mm = 5\n")
    plan = build_plan(parse_design_spec(text))
    assert plan.config.primitive == RADIAL
    plan.validate()
    r = max((p.x ** 2 + p.y ** 2) ** 0.5 for p in plan.points)
    assert r <= 20.0 + 1e-6

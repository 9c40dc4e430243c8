"""Molding instruction sheets.

The protocol constants are the bench-validated ones: mold above the
thread's softening range, hold briefly, then let the shape lock while
cooling back to room temperature. Re-heating resets the shape, so the
sheet doubles as the re-molding recipe.
"""

from __future__ import annotations

from .specfile import DesignSpec

MOLD_TEMP_C = 70
HEAT_SECONDS = 10
COOL_SECONDS = 20
ROOM_TEMP_C = 22


def render_instructions(spec: DesignSpec) -> str:
    """Instruction sheet text for a parsed design."""
    fab = spec.fabric
    thr = spec.thread
    lines = [
        f"instructions: {spec.name}",
        "",
        f"fabric: {fab.name} ({fab.stretch}, {fab.gsm:g} gsm, "
        f"{fab.composition})",
        f"thread: {spec.thread_name}, {thr.material}, Tex {thr.tex:g}",
        "thread side: feed the thermoplastic from the bobbin so it lands on "
        "the back face of the fabric; the front stays plain",
    ]
    if spec.layers > 1:
        lines.append(f"layers: embroider {spec.layers} copies and stack them "
                     f"aligned before molding")
    else:
        lines.append("layers: embroider 1 copy")
    lines += [
        "",
        f"molding: heat to {MOLD_TEMP_C} °C for {HEAT_SECONDS} s; "
        f"cool {COOL_SECONDS} s to {ROOM_TEMP_C} °C",
        f"the thread softens at {thr.tg_low:g}–{thr.tg_high:g} °C; hold the "
        "piece against the mold until it drops back below that range",
        "re-mold any time: re-heat past the softening range and repeat",
    ]
    return "\n".join(lines) + "\n"

"""Tajima DST reader and writer.

The format is a 512-byte text header followed by 3-byte movement records.
Each record encodes a relative move of up to +/-121 units per axis (one
unit is 0.1 mm, y grows upward) in balanced ternary: per axis, one bit
pair per weight 1, 3, 9, 27, 81 selects +weight, -weight, or neither.
Byte layout, bit 7 first:

    byte 0:  y+1  y-1  y+9  y-9  x-9  x+9  x-1  x+1
    byte 1:  y+3  y-3  y+27 y-27 x-27 x+27 x-3  x+3
    byte 2:  jump color y+81 y-81 x-81 x+81  1    1

The stream ends with 00 00 F3. Color-change records are never written
(single-thread machine setup) and are rejected on read.

Writing starts from machine origin (0, 0): the first record moves to the
first plan point. Plan coordinates are quantized to units by rounding
half away from zero; every plan point becomes at least one record, so a
jump followed by a landing stitch at the same spot is a jump record plus
a zero-move stitch record. Moves wider than one record are split into a
greedy chain of +/-121 jumps whose last record keeps the point's kind.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

from .errors import (
    BadHeader,
    BadRecord,
    CoordinateOverflow,
    ExtentMismatch,
    InvariantViolation,
    NameTooLong,
)
from .geometry import JUMP, STITCH, PlanPoint, StitchPlan, round_half_away

UNIT_MM = 0.1
MAX_RECORD_UNITS = 121
MAX_ABS_UNITS = 32767  # +/-3276.7 mm total extent

HEADER_SIZE = 512
END_RECORD = b"\x00\x00\xf3"

# (byte index, plus bit, minus bit) per balanced-ternary weight.
_X_BITS = {1: (0, 0, 1), 3: (1, 0, 1), 9: (0, 2, 3), 27: (1, 2, 3), 81: (2, 2, 3)}
_Y_BITS = {1: (0, 7, 6), 3: (1, 7, 6), 9: (0, 5, 4), 27: (1, 5, 4), 81: (2, 5, 4)}
_WEIGHTS = (1, 3, 9, 27, 81)

_JUMP_BIT = 0x80
_COLOR_BIT = 0x40
_CONTROL_BITS = 0x03


def _ternary_digits(v: int) -> dict[int, int]:
    """Balanced-ternary digits of v, keyed by weight; |v| <= 121."""
    digits = {}
    for w in _WEIGHTS:
        r = ((v + 1) % 3) - 1
        digits[w] = r
        v = (v - r) // 3
    if v:
        raise InvariantViolation("record delta out of +/-121 range")
    return digits


def encode_record(dx: int, dy: int, jump: bool = False) -> bytes:
    """One 3-byte movement record for a relative move in units."""
    if max(abs(dx), abs(dy)) > MAX_RECORD_UNITS:
        raise InvariantViolation("record delta out of +/-121 range")
    b = [0, 0, _CONTROL_BITS]
    for weight, digit in _ternary_digits(dx).items():
        idx, plus, minus = _X_BITS[weight]
        if digit > 0:
            b[idx] |= 1 << plus
        elif digit < 0:
            b[idx] |= 1 << minus
    for weight, digit in _ternary_digits(dy).items():
        idx, plus, minus = _Y_BITS[weight]
        if digit > 0:
            b[idx] |= 1 << plus
        elif digit < 0:
            b[idx] |= 1 << minus
    if jump:
        b[2] |= _JUMP_BIT
    return bytes(b)


def decode_record(rec: bytes, offset: int = 0) -> tuple[int, int, bool]:
    """Decode 3 bytes into (dx, dy, jump). ``offset`` labels errors."""
    if len(rec) != 3:
        raise BadRecord("record must be 3 bytes", offset=offset)
    if rec[2] & _CONTROL_BITS != _CONTROL_BITS:
        raise BadRecord("control bits 0-1 must be set", offset=offset)
    if rec[2] & _COLOR_BIT:
        raise BadRecord("color-change records are not supported", offset=offset)
    dx = dy = 0
    for weight, (idx, plus, minus) in _X_BITS.items():
        if rec[idx] >> plus & 1:
            dx += weight
        if rec[idx] >> minus & 1:
            dx -= weight
    for weight, (idx, plus, minus) in _Y_BITS.items():
        if rec[idx] >> plus & 1:
            dy += weight
        if rec[idx] >> minus & 1:
            dy -= weight
    return dx, dy, bool(rec[2] & _JUMP_BIT)


def _split(dx: int, dy: int) -> list[tuple[int, int]]:
    """Greedy chain of per-axis +/-121 steps covering (dx, dy)."""
    if dx == 0 and dy == 0:
        return [(0, 0)]
    out = []
    while dx or dy:
        cx = max(-MAX_RECORD_UNITS, min(MAX_RECORD_UNITS, dx))
        cy = max(-MAX_RECORD_UNITS, min(MAX_RECORD_UNITS, dy))
        out.append((cx, cy))
        dx -= cx
        dy -= cy
    return out


def quantize(v_mm: float) -> int:
    """Millimeters to integer 0.1 mm units, halves away from zero."""
    return round_half_away(v_mm * 10.0)


# ---------------------------------------------------------------------------
# header


@dataclass(frozen=True)
class DstHeader:
    name: str
    stitch_count: int
    color_changes: int
    x_plus: int
    x_minus: int
    y_plus: int
    y_minus: int
    ax: int
    ay: int


_FIELD_LAYOUT = (
    # (offset, tag, body length) for each 0x0D-terminated header field
    (0, b"LA:", 16),
    (20, b"ST:", 7),
    (31, b"CO:", 3),
    (38, b"+X:", 5),
    (47, b"-X:", 5),
    (56, b"+Y:", 5),
    (65, b"-Y:", 5),
    (74, b"AX:", 6),
    (84, b"AY:", 6),
    (94, b"MX:", 6),
    (104, b"MY:", 6),
    (114, b"PD:", 6),
)


def _format_header(name: str, stitch_count: int, x_plus: int, x_minus: int,
                   y_plus: int, y_minus: int, ax: int, ay: int) -> bytes:
    def signed(v: int) -> bytes:
        return b"%c%05d" % (ord("-") if v < 0 else ord("+"), abs(v))

    fields = [
        b"LA:" + name.ljust(16).encode("ascii"),
        b"ST:%07d" % stitch_count,
        b"CO:000",
        b"+X:%05d" % x_plus,
        b"-X:%05d" % x_minus,
        b"+Y:%05d" % y_plus,
        b"-Y:%05d" % y_minus,
        b"AX:" + signed(ax),
        b"AY:" + signed(ay),
        b"MX:+00000",
        b"MY:+00000",
        b"PD:******",
    ]
    head = b"\r".join(fields) + b"\r\x1a"
    return head.ljust(HEADER_SIZE, b" ")


def read_header(data: bytes) -> DstHeader:
    """Parse and sanity-check the 512-byte header."""
    if len(data) < HEADER_SIZE:
        raise BadHeader(f"file is {len(data)} bytes, header needs {HEADER_SIZE}")
    values = {}
    for offset, tag, body_len in _FIELD_LAYOUT:
        if data[offset:offset + 3] != tag:
            raise BadHeader(f"expected {tag.decode()!r} at byte {offset}")
        end = offset + 3 + body_len
        if data[end:end + 1] != b"\r":
            raise BadHeader(f"field {tag.decode()!r} not 0x0D-terminated")
        values[tag] = data[offset + 3:end]
    if data[124:125] != b"\x1a":
        raise BadHeader("missing 0x1A end-of-header byte")

    def digits(tag: bytes) -> int:
        body = values[tag]
        if not body.isdigit():
            raise BadHeader(f"field {tag.decode()!r} must be digits")
        return int(body)

    def signed(tag: bytes) -> int:
        body = values[tag]
        if body[:1] not in (b"+", b"-") or not body[1:].isdigit():
            raise BadHeader(f"field {tag.decode()!r} must be a signed number")
        return int(body)

    try:
        name = values[b"LA:"].decode("ascii").rstrip()
    except UnicodeDecodeError:
        raise BadHeader("design name is not ASCII") from None
    return DstHeader(
        name=name,
        stitch_count=digits(b"ST:"),
        color_changes=digits(b"CO:"),
        x_plus=digits(b"+X:"),
        x_minus=digits(b"-X:"),
        y_plus=digits(b"+Y:"),
        y_minus=digits(b"-Y:"),
        ax=signed(b"AX:"),
        ay=signed(b"AY:"),
    )


# ---------------------------------------------------------------------------
# whole-file writer / reader


def write_dst(plan: StitchPlan, name: str = "") -> bytes:
    """Serialize a plan. ``name`` fills the 16-character LA field."""
    if len(name) > 16:
        raise NameTooLong(f"design name {name!r} exceeds 16 characters")
    try:
        name.encode("ascii")
    except UnicodeError:
        raise InvariantViolation("design name must be ASCII") from None
    plan.validate()

    records = bytearray()
    count = 0
    px = py = 0
    x_min = x_max = y_min = y_max = 0
    for p in plan.points:
        ux, uy = quantize(p.x), quantize(p.y)
        if max(abs(ux), abs(uy)) > MAX_ABS_UNITS:
            raise CoordinateOverflow(
                f"({p.x:g}, {p.y:g}) mm is outside the +/-3276.7 mm field")
        chunks = _split(ux - px, uy - py)
        for i, (cx, cy) in enumerate(chunks):
            last = i == len(chunks) - 1
            records += encode_record(cx, cy, jump=p.kind == JUMP or not last)
            count += 1
            px += cx
            py += cy
            x_min, x_max = min(x_min, px), max(x_max, px)
            y_min, y_max = min(y_min, py), max(y_max, py)
    header = _format_header(
        name, count,
        x_plus=max(0, x_max), x_minus=max(0, -x_min),
        y_plus=max(0, y_max), y_minus=max(0, -y_min),
        ax=px, ay=py)
    return header + bytes(records) + END_RECORD


def read_dst(data: bytes) -> StitchPlan:
    """Decode a DST file into an absolute millimeter path.

    Raises BadHeader or BadRecord on malformed input. A header whose
    counters disagree with the decoded record stream gets an
    ExtentMismatch warning; the records win.
    """
    header = read_header(data)
    points: list[PlanPoint] = []
    x = y = 0
    x_min = x_max = y_min = y_max = 0
    count = 0
    offset = HEADER_SIZE
    terminated = False
    while offset < len(data):
        rec = data[offset:offset + 3]
        if rec == END_RECORD:
            terminated = True
            break
        dx, dy, jump = decode_record(rec, offset=offset)
        x += dx
        y += dy
        if max(abs(x), abs(y)) > MAX_ABS_UNITS:
            raise BadRecord("path leaves the +/-3276.7 mm field", offset=offset)
        x_min, x_max = min(x_min, x), max(x_max, x)
        y_min, y_max = min(y_min, y), max(y_max, y)
        points.append(PlanPoint(x * UNIT_MM, y * UNIT_MM, JUMP if jump else STITCH))
        count += 1
        offset += 3
    if not terminated:
        raise BadRecord("missing 00 00 F3 end record", offset=offset)

    expected = {
        "ST": (header.stitch_count, count),
        "+X": (header.x_plus, max(0, x_max)),
        "-X": (header.x_minus, max(0, -x_min)),
        "+Y": (header.y_plus, max(0, y_max)),
        "-Y": (header.y_minus, max(0, -y_min)),
        "AX": (header.ax, x),
        "AY": (header.ay, y),
    }
    wrong = [f"{k}: header {a}, stream {b}"
             for k, (a, b) in expected.items() if a != b]
    if wrong:
        warnings.warn(
            "header disagrees with record stream ({})".format("; ".join(wrong)),
            ExtentMismatch, stacklevel=2)
    return StitchPlan(points=tuple(points), name=header.name)

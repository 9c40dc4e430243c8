"""Fabric and thread stock definitions.

The registry mirrors the bench stock the calibration tables were measured
on: two fabric weights per stretch class, and nylon monofilament
thermoplastic thread in the machine-safe Tex sizes. The two fabrics marked
``primary`` are the ones with shipped calibration coverage; the solver
enumerates over those unless a requirement names a fabric explicitly.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import InvariantViolation, StiffstitchError, UnknownFabric

NON_STRETCH = "non-stretch"
STRETCH = "stretch"

FRONT = "front"
BACK = "back"


@dataclass(frozen=True)
class FabricSpec:
    """One fabric stock entry. ``gsm`` is grams per square meter."""

    name: str
    stretch: str
    gsm: float
    composition: str = "unspecified"
    primary: bool = False

    def __post_init__(self):
        if self.stretch not in (NON_STRETCH, STRETCH):
            raise InvariantViolation(f"bad stretch class {self.stretch!r}")
        if not self.gsm > 0:
            raise InvariantViolation("fabric weight must be positive")

    @property
    def is_stretch(self) -> bool:
        return self.stretch == STRETCH


@dataclass(frozen=True)
class ThreadSpec:
    """Thermoplastic thread entry.

    ``tg_low``/``tg_high`` bound the softening range in Celsius; ``side``
    says which fabric face the thread lands on (bobbin-fed thread lands on
    the back).
    """

    tex: float
    material: str
    tg_low: float
    tg_high: float
    side: str = BACK

    def __post_init__(self):
        if not self.tex > 0:
            raise InvariantViolation("thread weight (Tex) must be positive")
        if not self.tg_low < self.tg_high:
            raise InvariantViolation("softening range must be ordered")
        if self.side not in (FRONT, BACK):
            raise InvariantViolation(f"bad thread side {self.side!r}")


FABRICS: dict[str, FabricSpec] = {
    "nonstretch-336": FabricSpec(
        "nonstretch-336", NON_STRETCH, 336.0,
        "98% cotton, 2% elastane, twill weave", primary=True),
    "nonstretch-167": FabricSpec("nonstretch-167", NON_STRETCH, 167.0),
    "stretch-390": FabricSpec(
        "stretch-390", STRETCH, 390.0,
        "62% rayon, 32% nylon, 6% spandex, knit", primary=True),
    "stretch-189": FabricSpec("stretch-189", STRETCH, 189.0),
}

# Tex 60 is the heaviest size that runs without jamming; lighter sizes mold
# softer. All bobbin-fed, so the thermoplastic lands on the back face.
THREADS: dict[str, ThreadSpec] = {
    "tex60": ThreadSpec(60.0, "nylon monofilament", 47.0, 57.0, BACK),
    "tex50": ThreadSpec(50.0, "nylon monofilament", 47.0, 57.0, BACK),
    "tex45": ThreadSpec(45.0, "nylon monofilament", 47.0, 57.0, BACK),
}

DEFAULT_THREAD = THREADS["tex60"]


def fabric(name: str) -> FabricSpec:
    try:
        return FABRICS[name]
    except KeyError:
        raise UnknownFabric(
            f"unknown fabric {name!r}; known: {', '.join(sorted(FABRICS))}"
        ) from None


def thread(name: str) -> ThreadSpec:
    try:
        return THREADS[name]
    except KeyError:
        raise StiffstitchError(
            f"unknown thread {name!r}; known: {', '.join(sorted(THREADS))}"
        ) from None


def primary_fabrics() -> list[FabricSpec]:
    return [f for f in FABRICS.values() if f.primary]

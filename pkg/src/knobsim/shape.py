"""Shape-changing mechanism kinematics.

Two coaxial pulleys drive six radially sliding fins. Pulley A (0..90 deg)
moves fins 1, 2, 4, 5 together; pulley B (0..130 deg) moves fins 0 and 3
consecutively: fin 0 extends over the first 60 deg, a 10 deg dwell holds it
locked, then fin 3 extends over the last 60 deg. Full travel is 8 mm; with
everything retracted the outer profile is a flush 26 mm radius cylinder.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

PULLEY_A_MAX_DEG = 90.0
PULLEY_B_MAX_DEG = 130.0
FIN_TRAVEL_MM = 8.0
KNOB_BASE_RADIUS_MM = 26.0

# Fin indices, 60 deg apart around the knob.
PULLEY_A_FINS = (1, 2, 4, 5)
PULLEY_B_LEAD_FIN = 0  # extends over pulley_b in [0, 60]
PULLEY_B_LAG_FIN = 3  # extends over pulley_b in [70, 130]
_B_TRAVEL_DEG = 60.0
_B_DWELL_END_DEG = 70.0


@dataclass(frozen=True)
class PulleyState:
    """Angles of the two expansion pulleys; out-of-range values are rejected."""

    pulley_a_deg: float = 0.0
    pulley_b_deg: float = 0.0

    def __post_init__(self) -> None:
        if not 0.0 <= self.pulley_a_deg <= PULLEY_A_MAX_DEG:
            raise ValueError(
                f"pulley_a_deg must be in [0, {PULLEY_A_MAX_DEG}], "
                f"got {self.pulley_a_deg}"
            )
        if not 0.0 <= self.pulley_b_deg <= PULLEY_B_MAX_DEG:
            raise ValueError(
                f"pulley_b_deg must be in [0, {PULLEY_B_MAX_DEG}], "
                f"got {self.pulley_b_deg}"
            )


@dataclass(frozen=True)
class FinConfiguration:
    """Radial displacement of each fin in mm, index 0-5."""

    displacements_mm: tuple[float, float, float, float, float, float]

    def __post_init__(self) -> None:
        if len(self.displacements_mm) != 6:
            raise ValueError("exactly six fins")
        for d in self.displacements_mm:
            if not 0.0 <= d <= FIN_TRAVEL_MM:
                raise ValueError(f"fin displacement {d} outside [0, {FIN_TRAVEL_MM}]")


class ShapePreset(Enum):
    """The seven named shape configurations."""

    DEFAULT = 0
    POINTER = 1
    TWO_FIN = 2
    FOUR_FIN = 3
    FIVE_FIN = 4
    SIX_FIN = 5
    HALF_GRIP = 6

    @property
    def preset_name(self) -> str:
        return self.name.lower()

    @classmethod
    def from_name(cls, name: str) -> "ShapePreset":
        try:
            return cls[name.upper()]
        except KeyError:
            raise ValueError(f"unknown preset: {name!r}") from None


_PRESET_TARGETS: dict[ShapePreset, PulleyState] = {
    ShapePreset.DEFAULT: PulleyState(0.0, 0.0),
    ShapePreset.POINTER: PulleyState(0.0, 65.0),
    ShapePreset.TWO_FIN: PulleyState(0.0, 130.0),
    ShapePreset.FOUR_FIN: PulleyState(90.0, 0.0),
    ShapePreset.FIVE_FIN: PulleyState(90.0, 65.0),
    ShapePreset.SIX_FIN: PulleyState(90.0, 130.0),
    ShapePreset.HALF_GRIP: PulleyState(45.0, 0.0),
}


def preset_targets(preset: ShapePreset) -> PulleyState:
    """Pulley angles that realize a named preset."""
    try:
        return _PRESET_TARGETS[preset]
    except KeyError:
        raise ValueError(f"unknown preset: {preset!r}") from None


def fin_displacements(p: PulleyState) -> FinConfiguration:
    """Map pulley angles to the six fin displacements.

    Pulley A drives its four fins proportionally over its full range. On
    pulley B the lead fin finishes its 8 mm travel at 60 deg, holds through
    the 60..70 deg locking dwell, and the lag fin covers 70..130 deg.
    """
    a_travel = FIN_TRAVEL_MM * p.pulley_a_deg / PULLEY_A_MAX_DEG
    lead = FIN_TRAVEL_MM * min(p.pulley_b_deg, _B_TRAVEL_DEG) / _B_TRAVEL_DEG
    if p.pulley_b_deg <= _B_DWELL_END_DEG:
        lag = 0.0
    else:
        lag = FIN_TRAVEL_MM * (p.pulley_b_deg - _B_DWELL_END_DEG) / _B_TRAVEL_DEG
    d = [0.0] * 6
    for i in PULLEY_A_FINS:
        d[i] = a_travel
    d[PULLEY_B_LEAD_FIN] = lead
    d[PULLEY_B_LAG_FIN] = lag
    return FinConfiguration(tuple(d))


def outer_profile(f: FinConfiguration) -> tuple[float, ...]:
    """Outer radius at each fin: base radius plus displacement, mm."""
    return tuple(KNOB_BASE_RADIUS_MM + d for d in f.displacements_mm)


@dataclass(frozen=True)
class ServoState:
    """Current pulley angles plus the per-pulley slew limit."""

    pulleys: PulleyState = PulleyState(0.0, 0.0)
    slew_rate_dps: float = 500.0

    def __post_init__(self) -> None:
        if self.slew_rate_dps <= 0:
            raise ValueError("slew_rate_dps must be > 0")


def _toward(current: float, target: float, max_step: float) -> float:
    if target > current:
        return min(current + max_step, target)
    if target < current:
        return max(current - max_step, target)
    return current


def step_servos(s: ServoState, target: PulleyState, dt: float) -> ServoState:
    """Move each pulley toward its target by at most slew_rate * dt.

    Arrives exactly (no overshoot); at the target this is a fixed point.
    """
    if dt <= 0:
        raise ValueError("dt must be > 0")
    max_step = s.slew_rate_dps * dt
    nxt = PulleyState(
        _toward(s.pulleys.pulley_a_deg, target.pulley_a_deg, max_step),
        _toward(s.pulleys.pulley_b_deg, target.pulley_b_deg, max_step),
    )
    return ServoState(nxt, s.slew_rate_dps)

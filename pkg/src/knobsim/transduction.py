"""Sensing and actuation chain between the electrical and mechanical sides.

Covers the encoder/gearbox geometry (counts <-> knob degrees), gear free play
as a dead-band hysteresis, velocity estimation from counts, and the mapping
from a signed torque request to a PWM-style motor command.

Conventions: angles in degrees at the knob, positive clockwise; torque in
N*cm, positive clockwise.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from enum import Enum


class ConfigError(ValueError):
    """A configuration value is physically invalid."""


class Direction(Enum):
    CLOCKWISE = "cw"
    COUNTERCLOCKWISE = "ccw"


class Engagement(Enum):
    """Which gear flank the backlash output is riding on, if any."""

    POSITIVE = "positive"
    NEGATIVE = "negative"
    NONE = "none"


@dataclass(frozen=True)
class DrivetrainConfig:
    """Gear train between the motor-shaft encoder and the knob.

    encoder_counts_per_motor_rev: effective counts per motor shaft revolution
    gearbox_ratio: motor revolutions per gearbox output revolution
    drive_ratio: gearbox output revolutions per knob revolution
    backlash_width: total free play seen at the knob, degrees (0 = ideal)

    Stock values give 24 * 9.7 * 2.5 = 582 counts per knob revolution.
    """

    encoder_counts_per_motor_rev: float = 24.0
    gearbox_ratio: float = 9.7
    drive_ratio: float = 2.5
    backlash_width: float = 0.0

    def __post_init__(self) -> None:
        if (
            self.encoder_counts_per_motor_rev <= 0
            or self.gearbox_ratio <= 0
            or self.drive_ratio <= 0
        ):
            raise ConfigError("drivetrain ratios must be strictly positive")
        if self.backlash_width < 0:
            raise ConfigError("backlash_width must be >= 0")

    @property
    def counts_per_knob_rev(self) -> float:
        return (
            self.encoder_counts_per_motor_rev * self.gearbox_ratio * self.drive_ratio
        )


def knob_resolution(config: DrivetrainConfig) -> float:
    """Knob degrees per encoder count (0.6186 deg/count for stock gearing)."""
    return 360.0 / config.counts_per_knob_rev


def quantize_angle(theta_deg: float, config: DrivetrainConfig) -> int:
    """Encoder count for a knob angle.

    Floor toward -inf, matching an up/down counter crossing fixed thresholds;
    monotone non-decreasing in theta.
    """
    if not math.isfinite(theta_deg):
        raise ValueError("theta must be finite")
    return math.floor(theta_deg / knob_resolution(config))


def counts_to_angle(counts: int, config: DrivetrainConfig) -> float:
    """Knob angle represented by an encoder count."""
    return counts * knob_resolution(config)


@dataclass(frozen=True)
class BacklashState:
    """Output side of the gear free play.

    knob_side_angle stays within backlash_width/2 of the driving angle.
    """

    knob_side_angle: float = 0.0
    engaged_direction: Engagement = Engagement.NONE


def apply_backlash(
    motor_side_angle: float, state: BacklashState, width: float
) -> tuple[BacklashState, float]:
    """Advance the dead-band hysteresis by one input sample.

    The output holds position while the input moves inside the free play and
    follows offset by width/2 once a flank engages. width = 0 is the identity.
    """
    if width < 0:
        raise ValueError("backlash width must be >= 0")
    half = width / 2.0
    out = state.knob_side_angle
    gap = motor_side_angle - out
    if gap > half:
        out = motor_side_angle - half
        engaged = Engagement.POSITIVE
    elif gap < -half:
        out = motor_side_angle + half
        engaged = Engagement.NEGATIVE
    else:
        engaged = state.engaged_direction
        # Contact is lost as soon as the input backs off its flank.
        if engaged is Engagement.POSITIVE and gap < half:
            engaged = Engagement.NONE
        elif engaged is Engagement.NEGATIVE and gap > -half:
            engaged = Engagement.NONE
    return BacklashState(out, engaged), out


@dataclass(frozen=True)
class VelocityFilterState:
    """First-order low-pass over the finite difference of encoder counts."""

    last_count: int = 0
    filtered_velocity: float = 0.0  # deg/s
    cutoff_hz: float = 50.0

    def __post_init__(self) -> None:
        if self.cutoff_hz <= 0:
            raise ConfigError("cutoff_hz must be > 0")
        if not math.isfinite(self.filtered_velocity):
            raise ValueError("filtered_velocity must be finite")


def estimate_velocity(
    state: VelocityFilterState,
    new_count: int,
    dt: float,
    config: DrivetrainConfig,
) -> tuple[VelocityFilterState, float]:
    """Differentiate counts and low-pass the result.

    filtered = alpha * previous + (1 - alpha) * raw with
    alpha = exp(-2*pi*cutoff_hz*dt), so the DC gain is exactly 1.
    """
    if dt <= 0:
        raise ValueError("dt must be > 0")
    raw = (new_count - state.last_count) * knob_resolution(config) / dt
    alpha = math.exp(-2.0 * math.pi * state.cutoff_hz * dt)
    filtered = alpha * state.filtered_velocity + (1.0 - alpha) * raw
    return replace(state, last_count=new_count, filtered_velocity=filtered), filtered


@dataclass(frozen=True)
class MotorCommand:
    """PWM-style drive request: duty in [0, 1] plus a rotation direction."""

    duty: float
    direction: Direction

    def __post_init__(self) -> None:
        if not 0.0 <= self.duty <= 1.0:
            raise ValueError("duty must be in [0, 1]")


def torque_to_command(torque_ncm: float, max_torque_ncm: float) -> MotorCommand:
    """Linear torque -> duty mapping with saturation.

    Positive torque drives clockwise; exact zero yields duty 0 with a
    clockwise direction by convention.
    """
    if max_torque_ncm <= 0:
        raise ConfigError("max_torque must be > 0")
    if torque_ncm < 0:
        direction = Direction.COUNTERCLOCKWISE
    else:
        direction = Direction.CLOCKWISE
    duty = min(abs(torque_ncm) / max_torque_ncm, 1.0)
    return MotorCommand(duty, direction)

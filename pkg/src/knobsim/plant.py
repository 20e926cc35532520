"""Fixed-step rigid-rotor model of the knob.

Semi-implicit Euler on a single inertia with viscous plus regularized Coulomb
friction, a quasi-static motor (torque proportional to duty), and a simulated
hand that either applies torque directly or grips toward a target angle.

The angle is unwrapped (multi-turn). Gear free play is tracked as a follower
angle on the sensing side: the encoder observes the backlash output, never
the true rotor angle, so a nonzero width degrades position tracking exactly
the way a loose gearbox does.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

from .transduction import (
    BacklashState,
    ConfigError,
    Direction,
    MotorCommand,
    apply_backlash,
)

# Below this speed Coulomb friction scales linearly with omega instead of
# switching sign, keeping net torque continuous and the stepper chatter-free.
COULOMB_KNEE_DPS = 1.0


@dataclass(frozen=True)
class PlantParams:
    """Mechanical constants. Units: N*cm, deg, s.

    Defaults are plausible stand-ins for a desktop knob, not measured values.
    """

    inertia: float = 8.73e-4  # N*cm*s^2/deg
    viscous_friction: float = 5e-3  # N*cm*s/deg
    coulomb_friction: float = 0.5  # N*cm
    dt: float = 1e-3  # s
    max_motor_torque: float = 25.0  # N*cm

    def __post_init__(self) -> None:
        if self.inertia <= 0:
            raise ConfigError("inertia must be > 0")
        if self.dt <= 0:
            raise ConfigError("dt must be > 0")
        if self.viscous_friction < 0 or self.coulomb_friction < 0:
            raise ConfigError("friction coefficients must be >= 0")
        if self.max_motor_torque <= 0:
            raise ConfigError("max_motor_torque must be > 0")


@dataclass(frozen=True)
class PlantState:
    """Rotor angle/velocity plus the sensing-side backlash follower."""

    theta: float = 0.0  # deg, unwrapped
    omega: float = 0.0  # deg/s
    backlash: BacklashState = BacklashState()


class HandMode(Enum):
    DIRECT_TORQUE = "direct_torque"
    POSITION_GRIP = "position_grip"


@dataclass(frozen=True)
class HandInput:
    """Stand-in for the human operator."""

    mode: HandMode = HandMode.DIRECT_TORQUE
    torque_ncm: float = 0.0
    target_deg: float = 0.0
    grip_stiffness: float = 0.0  # N*cm/deg
    grip_damping: float = 0.0  # N*cm*s/deg

    def __post_init__(self) -> None:
        if self.grip_stiffness < 0 or self.grip_damping < 0:
            raise ValueError("grip parameters must be >= 0")

    @classmethod
    def direct(cls, torque_ncm: float) -> "HandInput":
        return cls(HandMode.DIRECT_TORQUE, torque_ncm=torque_ncm)

    @classmethod
    def grip(
        cls, target_deg: float, stiffness: float, damping: float = 0.0
    ) -> "HandInput":
        return cls(
            HandMode.POSITION_GRIP,
            target_deg=target_deg,
            grip_stiffness=stiffness,
            grip_damping=damping,
        )


IDLE_HAND = HandInput.direct(0.0)


def motor_torque(cmd: MotorCommand, params: PlantParams) -> float:
    """Knob torque produced by a motor command (quasi-static model)."""
    magnitude = cmd.duty * params.max_motor_torque
    return magnitude if cmd.direction is Direction.CLOCKWISE else -magnitude


def hand_torque(h: HandInput, state: PlantState) -> float:
    """Torque the simulated hand applies at the current plant state."""
    if h.mode is HandMode.DIRECT_TORQUE:
        return h.torque_ncm
    return (
        h.grip_stiffness * (h.target_deg - state.theta) - h.grip_damping * state.omega
    )


def step(
    state: PlantState,
    motor_ncm: float,
    hand_ncm: float,
    params: PlantParams,
    backlash_width: float = 0.0,
) -> PlantState:
    """One semi-implicit Euler step; returns the successor state.

    Net torque = motor + hand - viscous*omega - coulomb*sat(omega), with
    sat() the linear regularization below COULOMB_KNEE_DPS. Velocity updates
    first, then position, then the sensing-side backlash follower tracks the
    new angle.
    """
    omega = state.omega
    if abs(omega) < COULOMB_KNEE_DPS:
        coulomb = params.coulomb_friction * (omega / COULOMB_KNEE_DPS)
    else:
        coulomb = math.copysign(params.coulomb_friction, omega)
    net = motor_ncm + hand_ncm - params.viscous_friction * omega - coulomb
    new_omega = omega + params.dt * net / params.inertia
    new_theta = state.theta + params.dt * new_omega
    backlash, _ = apply_backlash(new_theta, state.backlash, backlash_width)
    return PlantState(new_theta, new_omega, backlash)

"""Control-loop orchestration.

A Session owns one simulation timeline: it wires the sensing chain, the
effect renderer, the rotor plant, and the servo-driven shape mechanism into a
fixed-rate tick, and interprets the JSON command protocol. Rendering always
consumes the quantized, backlash-affected angle and the filtered velocity
estimate -- the same information a real controller would have -- never the
true plant state.

Tick order is fixed: sense counts, estimate velocity, render torque, map to a
motor command, step the plant with the hand torque, slew the servos, emit a
snapshot. Exactly one plant step per tick; timestamps are tick_count/loop_rate.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, replace
from typing import Callable, Sequence

from . import effects as fx
from . import plant as plant_mod
from . import shape as shape_mod
from . import transduction as td
from .plant import IDLE_HAND, HandInput, HandMode, PlantParams, PlantState
from .shape import ServoState, ShapePreset
from .transduction import ConfigError, DrivetrainConfig, VelocityFilterState


@dataclass(frozen=True)
class Mode:
    """One selectable pairing of force rendering and shape configuration."""

    number: int
    name: str
    preset: ShapePreset
    effects: tuple[fx.TorqueEffect, ...]


def default_mode_table() -> dict[int, Mode]:
    """The six stock demo modes."""
    cw = td.Direction.CLOCKWISE
    ccw = td.Direction.COUNTERCLOCKWISE
    return {
        1: Mode(1, "volume_detents", ShapePreset.DEFAULT,
                (fx.Detent(spacing=18.0, amplitude=4.0),)),
        2: Mode(2, "bounded_dial", ShapePreset.FOUR_FIN,
                (fx.HardWall(135.0, cw, 10.0), fx.HardWall(-135.0, ccw, 10.0))),
        3: Mode(3, "selector", ShapePreset.POINTER,
                (fx.Detent(spacing=30.0, amplitude=6.0),)),
        4: Mode(4, "damped_scrub", ShapePreset.TWO_FIN,
                (fx.LinearDamping(0.02),)),
        5: Mode(5, "textured", ShapePreset.SIX_FIN,
                (fx.Texture(spatial_period=12.0, peak_coefficient=0.04),)),
        6: Mode(6, "spring_mass", ShapePreset.HALF_GRIP,
                (fx.MassSpringDamper(0.002, 2.0, 0.05),)),
    }


@dataclass(frozen=True)
class Snapshot:
    """One control-tick observation; the unit of persistence and streaming."""

    t_s: float
    theta_deg: float
    omega_dps: float
    torque_cmd_ncm: float
    duty: float
    direction: str  # "cw" | "ccw"
    mode: int
    preset: str
    pulley_a_deg: float
    pulley_b_deg: float
    fins_mm: tuple[float, float, float, float, float, float]
    hand_torque_ncm: float

    def as_wire_dict(self) -> dict:
        return {
            "type": "snapshot",
            "t_s": self.t_s,
            "theta_deg": self.theta_deg,
            "omega_dps": self.omega_dps,
            "torque_cmd_ncm": self.torque_cmd_ncm,
            "duty": self.duty,
            "direction": self.direction,
            "mode": self.mode,
            "preset": self.preset,
            "pulley_a_deg": self.pulley_a_deg,
            "pulley_b_deg": self.pulley_b_deg,
            "fins_mm": list(self.fins_mm),
            "hand_torque_ncm": self.hand_torque_ncm,
        }


@dataclass(frozen=True)
class SessionConfig:
    """Everything a Session needs; mirrors the JSON config file."""

    loop_rate_hz: float = 1000.0
    snapshot_rate_hz: float = 60.0
    plant: PlantParams = PlantParams()
    drivetrain: DrivetrainConfig = DrivetrainConfig()
    velocity_cutoff_hz: float = 50.0
    servo_slew_dps: float = 500.0
    modes: dict[int, Mode] = field(default_factory=default_mode_table)
    seed: int = 0  # reserved

    def __post_init__(self) -> None:
        if not self.loop_rate_hz >= self.snapshot_rate_hz > 0:
            raise ConfigError("need loop_rate_hz >= snapshot_rate_hz > 0")
        if self.velocity_cutoff_hz <= 0:
            raise ConfigError("velocity_cutoff_hz must be > 0")
        if set(self.modes) != set(range(1, 7)):
            raise ConfigError("mode table must contain exactly modes 1..6")

    @classmethod
    def from_dict(cls, data: dict) -> "SessionConfig":
        known = {
            "loop_rate_hz", "snapshot_rate_hz", "plant", "drivetrain",
            "velocity_cutoff_hz", "servo_slew_dps", "modes", "seed",
        }
        unknown = set(data) - known
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        kwargs: dict = {}
        for key in ("loop_rate_hz", "snapshot_rate_hz",
                    "velocity_cutoff_hz", "servo_slew_dps", "seed"):
            if key in data:
                kwargs[key] = data[key]
        if "plant" in data:
            kwargs["plant"] = PlantParams(**data["plant"])
        if "drivetrain" in data:
            kwargs["drivetrain"] = DrivetrainConfig(**data["drivetrain"])
        modes = default_mode_table()
        for key, override in data.get("modes", {}).items():
            number = int(key)
            if number not in modes:
                raise ConfigError(f"mode number out of range: {number}")
            base = modes[number]
            name = override.get("name", base.name)
            preset = base.preset
            if "preset" in override:
                preset = ShapePreset.from_name(override["preset"])
            effect_list = base.effects
            if "effects" in override:
                effect_list = tuple(
                    fx.effect_from_dict(e) for e in override["effects"]
                )
            modes[number] = Mode(number, name, preset, effect_list)
        kwargs["modes"] = modes
        return cls(**kwargs)

    def to_dict(self) -> dict:
        return {
            "loop_rate_hz": self.loop_rate_hz,
            "snapshot_rate_hz": self.snapshot_rate_hz,
            "plant": {
                "inertia": self.plant.inertia,
                "viscous_friction": self.plant.viscous_friction,
                "coulomb_friction": self.plant.coulomb_friction,
                "dt": self.plant.dt,
                "max_motor_torque": self.plant.max_motor_torque,
            },
            "drivetrain": {
                "encoder_counts_per_motor_rev":
                    self.drivetrain.encoder_counts_per_motor_rev,
                "gearbox_ratio": self.drivetrain.gearbox_ratio,
                "drive_ratio": self.drivetrain.drive_ratio,
                "backlash_width": self.drivetrain.backlash_width,
            },
            "velocity_cutoff_hz": self.velocity_cutoff_hz,
            "servo_slew_dps": self.servo_slew_dps,
            "modes": {
                str(n): {
                    "name": m.name,
                    "preset": m.preset.preset_name,
                    "effects": [fx.effect_to_dict(e) for e in m.effects],
                }
                for n, m in sorted(self.modes.items())
            },
            "seed": self.seed,
        }


@dataclass(frozen=True)
class HandledMessage:
    """Outcome of one protocol command."""

    reply: dict
    subscribe_rate_hz: float | None = None
    unsubscribe: bool = False


class Session:
    """One deterministic simulation timeline.

    Not thread-safe by itself: callers serialize tick() and the mutators
    (the socket server drains its command queue at tick boundaries).
    """

    def __init__(self, config: SessionConfig | None = None, initial_mode: int = 1):
        self.config = config if config is not None else SessionConfig()
        if initial_mode not in self.config.modes:
            raise ConfigError(f"initial mode out of range: {initial_mode}")
        self.dt = 1.0 / self.config.loop_rate_hz
        # The loop rate owns the step size; a mismatched plant dt is overridden.
        self.params = replace(self.config.plant, dt=self.dt)
        self._initial_mode = initial_mode
        self.tick_count = 0
        self.plant_state = PlantState()
        self.filter_state = VelocityFilterState(
            cutoff_hz=self.config.velocity_cutoff_hz
        )
        self.hand = IDLE_HAND
        self.mode = self.config.modes[initial_mode]
        self.preset_name = self.mode.preset.preset_name
        self._shape_target = shape_mod.preset_targets(self.mode.preset)
        # Servos start parked at the initial mode's preset.
        self.servo = ServoState(self._shape_target, self.config.servo_slew_dps)
        self.proxies = self._fresh_proxies(anchor_deg=0.0)

    # -- mutators ---------------------------------------------------------

    def _fresh_proxies(self, anchor_deg: float) -> list[fx.ProxyState | None]:
        """Proxy per effect, parked at the current encoder angle (zero force)."""
        return [
            fx.ProxyState(anchor_deg, 0.0)
            if isinstance(e, fx.MassSpringDamper) else None
            for e in self.mode.effects
        ]

    def encoder_angle(self) -> float:
        """Angle as the controller sees it: backlash output, quantized."""
        count = td.quantize_angle(
            self.plant_state.backlash.knob_side_angle, self.config.drivetrain
        )
        return td.counts_to_angle(count, self.config.drivetrain)

    def set_mode(self, number: int) -> None:
        if number not in self.config.modes:
            raise ValueError(f"mode out of range: {number}")
        self.mode = self.config.modes[number]
        self.preset_name = self.mode.preset.preset_name
        self._shape_target = shape_mod.preset_targets(self.mode.preset)
        self.proxies = self._fresh_proxies(self.encoder_angle())

    def set_preset(self, preset: ShapePreset) -> None:
        """Override the shape only; effects keep following the mode."""
        self._shape_target = shape_mod.preset_targets(preset)
        self.preset_name = preset.preset_name

    def set_hand(self, hand: HandInput) -> None:
        self.hand = hand

    def reset(self) -> None:
        """Re-zero plant and filters, restore the initial mode, re-home servos.

        Tick time keeps running so stream timestamps stay monotone.
        """
        self.plant_state = PlantState()
        self.filter_state = VelocityFilterState(
            cutoff_hz=self.config.velocity_cutoff_hz
        )
        self.hand = IDLE_HAND
        self.mode = self.config.modes[self._initial_mode]
        self.preset_name = self.mode.preset.preset_name
        self._shape_target = shape_mod.preset_targets(self.mode.preset)
        self.servo = ServoState(self._shape_target, self.config.servo_slew_dps)
        self.proxies = self._fresh_proxies(anchor_deg=0.0)

    # -- the control tick --------------------------------------------------

    def tick(self, hand: HandInput | None = None) -> Snapshot:
        """Advance one control period and return the resulting snapshot.

        `hand` overrides the session's live hand for this tick only (used by
        scripted runs); None uses the hand last set via set_hand.
        """
        active_hand = hand if hand is not None else self.hand
        drivetrain = self.config.drivetrain

        # 1-2: sense and estimate.
        count = td.quantize_angle(
            self.plant_state.backlash.knob_side_angle, drivetrain
        )
        self.filter_state, omega_est = td.estimate_velocity(
            self.filter_state, count, self.dt, drivetrain
        )
        theta_enc = td.counts_to_angle(count, drivetrain)

        # 3-5: render and command.
        ctx = fx.RenderContext(theta_enc, omega_est, self.params.max_motor_torque)
        torque_cmd = fx.compose_and_clamp(self.mode.effects, ctx, self.proxies)
        cmd = td.torque_to_command(torque_cmd, self.params.max_motor_torque)
        tau_motor = plant_mod.motor_torque(cmd, self.params)

        # Virtual masses advance on the same sensed state the render used.
        self.proxies = [
            fx.step_proxy(e, p, ctx, self.dt)
            if isinstance(e, fx.MassSpringDamper) and p is not None else p
            for e, p in zip(self.mode.effects, self.proxies)
        ]

        # 6-7: physics and shape.
        tau_hand = plant_mod.hand_torque(active_hand, self.plant_state)
        self.plant_state = plant_mod.step(
            self.plant_state, tau_motor, tau_hand, self.params,
            drivetrain.backlash_width,
        )
        self.servo = shape_mod.step_servos(self.servo, self._shape_target, self.dt)

        # 8: emit.
        self.tick_count += 1
        fins = shape_mod.fin_displacements(self.servo.pulleys)
        return Snapshot(
            t_s=self.tick_count / self.config.loop_rate_hz,
            theta_deg=self.plant_state.theta,
            omega_dps=self.plant_state.omega,
            torque_cmd_ncm=torque_cmd,
            duty=cmd.duty,
            direction=cmd.direction.value,
            mode=self.mode.number,
            preset=self.preset_name,
            pulley_a_deg=self.servo.pulleys.pulley_a_deg,
            pulley_b_deg=self.servo.pulleys.pulley_b_deg,
            fins_mm=fins.displacements_mm,
            hand_torque_ncm=tau_hand,
        )

    # -- protocol ----------------------------------------------------------

    def snapshot_stride(self, rate_hz: float) -> int:
        """Decimation stride: every floor(loop_rate/rate)-th tick."""
        return max(1, math.floor(self.config.loop_rate_hz / rate_hz))

    def handle_message(self, msg: object) -> HandledMessage:
        """Apply one decoded client message; always produces a reply."""
        if not isinstance(msg, dict) or not isinstance(msg.get("type"), str):
            return HandledMessage(_error("parse_error", msg))
        mtype = msg["type"]
        if mtype == "hello":
            return HandledMessage(_ack(msg, {
                "server": "knobsim",
                "modes": [
                    {"mode": m.number, "name": m.name,
                     "preset": m.preset.preset_name}
                    for m in sorted(self.config.modes.values(),
                                    key=lambda m: m.number)
                ],
                "presets": [p.preset_name for p in ShapePreset],
                "loop_rate_hz": self.config.loop_rate_hz,
                "max_torque_ncm": self.params.max_motor_torque,
            }))
        if mtype == "set_mode":
            number = msg.get("mode")
            if not isinstance(number, int) or isinstance(number, bool):
                return HandledMessage(_error("parse_error", msg))
            if number not in self.config.modes:
                return HandledMessage(_error("out_of_range", msg))
            self.set_mode(number)
            return HandledMessage(_ack(msg, {"mode": number}))
        if mtype == "set_preset":
            name = msg.get("preset")
            try:
                if isinstance(name, str):
                    preset = ShapePreset.from_name(name)
                elif isinstance(name, int) and not isinstance(name, bool):
                    preset = ShapePreset(name)
                else:
                    return HandledMessage(_error("parse_error", msg))
            except ValueError:
                return HandledMessage(_error("out_of_range", msg))
            self.set_preset(preset)
            return HandledMessage(_ack(msg, {"preset": preset.preset_name}))
        if mtype == "set_hand":
            try:
                hand = _hand_from_wire(msg)
            except (TypeError, ValueError):
                return HandledMessage(_error("parse_error", msg))
            if hand is None:
                return HandledMessage(_error("out_of_range", msg))
            self.set_hand(hand)
            return HandledMessage(_ack(msg, {"hand": hand.mode.value}))
        if mtype == "reset":
            self.reset()
            return HandledMessage(_ack(msg, {"reset": True}))
        if mtype == "subscribe":
            rate = msg.get("rate_hz", self.config.snapshot_rate_hz)
            if not isinstance(rate, (int, float)) or isinstance(rate, bool):
                return HandledMessage(_error("parse_error", msg))
            if not rate > 0:
                return HandledMessage(_error("out_of_range", msg))
            return HandledMessage(
                _ack(msg, {"rate_hz": rate}), subscribe_rate_hz=float(rate)
            )
        if mtype == "unsubscribe":
            return HandledMessage(_ack(msg, {"unsubscribed": True}),
                                  unsubscribe=True)
        return HandledMessage(_error("unknown_type", msg))


def _echo_id(msg: object, reply: dict) -> dict:
    if isinstance(msg, dict) and "id" in msg:
        reply["id"] = msg["id"]
    return reply


def _ack(msg: object, extra: dict | None = None) -> dict:
    reply: dict = {"type": "ack"}
    if extra:
        reply.update(extra)
    return _echo_id(msg, reply)


def _error(code: str, msg: object = None) -> dict:
    return _echo_id(msg, {"type": "error", "code": code})


def _hand_from_wire(msg: dict) -> HandInput | None:
    """Build a HandInput from a set_hand message; None when out of range."""
    mode = msg.get("mode")
    if mode == HandMode.DIRECT_TORQUE.value:
        torque = msg.get("torque_ncm", 0.0)
        if not isinstance(torque, (int, float)) or isinstance(torque, bool):
            raise ValueError("torque_ncm must be a number")
        return HandInput.direct(float(torque))
    if mode == HandMode.POSITION_GRIP.value:
        target = msg.get("target_deg", 0.0)
        stiffness = msg.get("grip_stiffness", 0.0)
        damping = msg.get("grip_damping", 0.0)
        for value in (target, stiffness, damping):
            if not isinstance(value, (int, float)) or isinstance(value, bool):
                raise ValueError("grip fields must be numbers")
        if stiffness < 0 or damping < 0:
            return None
        return HandInput.grip(float(target), float(stiffness), float(damping))
    raise ValueError(f"unknown hand mode: {mode!r}")


# -- scripted hands ---------------------------------------------------------


@dataclass(frozen=True)
class HandSegment:
    """One piece of a scripted hand schedule, active from t until the next."""

    t: float
    hand: HandInput
    t_end: float | None = None  # ramp horizon when *_end fields are used
    torque_end_ncm: float | None = None
    target_end_deg: float | None = None


class HandScript:
    """Deterministic, piecewise hand input with optional linear ramps.

    JSON form: {"segments": [{"t": 0.0, "mode": "direct_torque",
    "torque_ncm": 2.0}, {"t": 1.0, "mode": "position_grip", "target_deg": 0,
    "target_end_deg": 360, "t_end": 19.0, "grip_stiffness": 2.0,
    "grip_damping": 0.02}]}. Ramp horizons default to the next segment's
    start time.
    """

    def __init__(self, segments: Sequence[HandSegment]):
        self.segments = sorted(segments, key=lambda s: s.t)
        for i, seg in enumerate(self.segments):
            needs_ramp = (
                seg.torque_end_ncm is not None or seg.target_end_deg is not None
            )
            if needs_ramp and seg.t_end is None:
                if i + 1 < len(self.segments):
                    seg = replace(seg, t_end=self.segments[i + 1].t)
                    self.segments[i] = seg
                else:
                    raise ValueError(
                        "last segment uses a ramp but has no t_end"
                    )
            if seg.t_end is not None and seg.t_end <= seg.t:
                raise ValueError("segment t_end must be greater than t")

    @classmethod
    def from_dict(cls, data: dict | list) -> "HandScript":
        raw = data["segments"] if isinstance(data, dict) else data
        segments = []
        for entry in raw:
            t = float(entry["t"])
            mode = entry["mode"]
            if mode == HandMode.DIRECT_TORQUE.value:
                hand = HandInput.direct(float(entry.get("torque_ncm", 0.0)))
            elif mode == HandMode.POSITION_GRIP.value:
                hand = HandInput.grip(
                    float(entry.get("target_deg", 0.0)),
                    float(entry.get("grip_stiffness", 0.0)),
                    float(entry.get("grip_damping", 0.0)),
                )
            else:
                raise ValueError(f"unknown hand mode: {mode!r}")
            segments.append(HandSegment(
                t=t,
                hand=hand,
                t_end=float(entry["t_end"]) if "t_end" in entry else None,
                torque_end_ncm=(
                    float(entry["torque_end_ncm"])
                    if "torque_end_ncm" in entry else None
                ),
                target_end_deg=(
                    float(entry["target_end_deg"])
                    if "target_end_deg" in entry else None
                ),
            ))
        return cls(segments)

    @classmethod
    def load(cls, path: str) -> "HandScript":
        with open(path, "r", encoding="utf-8") as f:
            return cls.from_dict(json.load(f))

    def hand_at(self, t: float) -> HandInput:
        active: HandSegment | None = None
        for seg in self.segments:
            if seg.t <= t:
                active = seg
            else:
                break
        if active is None:
            return IDLE_HAND
        hand = active.hand
        if active.t_end is not None:
            u = (t - active.t) / (active.t_end - active.t)
            u = min(max(u, 0.0), 1.0)
            if active.torque_end_ncm is not None:
                hand = replace(
                    hand,
                    torque_ncm=hand.torque_ncm
                    + u * (active.torque_end_ncm - hand.torque_ncm),
                )
            if active.target_end_deg is not None:
                hand = replace(
                    hand,
                    target_deg=hand.target_deg
                    + u * (active.target_end_deg - hand.target_deg),
                )
        return hand


def run_session(
    session: Session,
    seconds: float,
    hand_script: HandScript | None = None,
    on_snapshot: Callable[[Snapshot], None] | None = None,
) -> list[Snapshot]:
    """Free-run a session for a duration, returning every snapshot in order.

    The scripted hand is evaluated at each tick's input-sampling time
    (tick_count/loop_rate before the step).
    """
    ticks = round(seconds * session.config.loop_rate_hz)
    out: list[Snapshot] = []
    for _ in range(ticks):
        hand = None
        if hand_script is not None:
            hand = hand_script.hand_at(session.tick_count / session.config.loop_rate_hz)
        snap = session.tick(hand)
        out.append(snap)
        if on_snapshot is not None:
            on_snapshot(snap)
    return out

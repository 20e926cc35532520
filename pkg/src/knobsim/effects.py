"""Force-feedback rendering primitives.

Each effect maps knob state (angle, velocity) to a commanded torque. The six
primitives are one-sided stiff walls, periodic detents (bump or valley
flavor), linear damping, a spatially modulated damping texture, and a virtual
mass coupled to the knob by a spring-damper. `compose_and_clamp` sums any
stack of effects and enforces the device torque ceiling.

Sign convention as elsewhere: positive angle and positive torque are
clockwise; dissipative effects therefore satisfy torque * omega <= 0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, fields
from enum import Enum
from typing import Sequence, Union

from .transduction import Direction


class DetentKind(Enum):
    BUMP = "bump"
    VALLEY = "valley"


@dataclass(frozen=True)
class HardWall:
    """One-sided virtual wall: a stiff spring beyond wall_angle.

    blocked_side is the rotation direction the wall forbids; torque is zero
    everywhere on the free side.
    """

    wall_angle: float  # deg
    blocked_side: Direction
    stiffness: float  # N*cm/deg

    def __post_init__(self) -> None:
        if self.stiffness < 0:
            raise ValueError("stiffness must be >= 0")


@dataclass(frozen=True)
class Detent:
    """Periodic click lattice with sinusoidal torque profile.

    Valleys attract toward the lattice {phase + k*spacing}; bumps repel from
    it (stable points sit at the midpoints instead).
    """

    spacing: float  # deg between detents
    amplitude: float  # N*cm peak torque
    kind: DetentKind = DetentKind.VALLEY
    phase: float = 0.0  # deg, lattice offset

    def __post_init__(self) -> None:
        if self.spacing <= 0:
            raise ValueError("spacing must be > 0")
        if self.amplitude < 0:
            raise ValueError("amplitude must be >= 0")


@dataclass(frozen=True)
class LinearDamping:
    coefficient: float  # N*cm*s/deg

    def __post_init__(self) -> None:
        if self.coefficient < 0:
            raise ValueError("coefficient must be >= 0")


@dataclass(frozen=True)
class Texture:
    """Damping grating: the damping coefficient varies with angle.

    b(theta) = peak_coefficient * (1 + sin(2*pi*theta/spatial_period)) / 2,
    which stays in [0, peak], keeping the effect passive.
    """

    spatial_period: float  # deg
    peak_coefficient: float  # N*cm*s/deg

    def __post_init__(self) -> None:
        if self.spatial_period <= 0:
            raise ValueError("spatial_period must be > 0")
        if self.peak_coefficient < 0:
            raise ValueError("peak_coefficient must be >= 0")


@dataclass(frozen=True)
class MassSpringDamper:
    """Virtual proxy mass coupled to the knob by a spring and damper."""

    virtual_inertia: float  # N*cm*s^2/deg
    coupling_stiffness: float  # N*cm/deg
    coupling_damping: float  # N*cm*s/deg

    def __post_init__(self) -> None:
        if self.virtual_inertia < 0:
            raise ValueError("virtual_inertia must be >= 0")
        if self.coupling_stiffness < 0 or self.coupling_damping < 0:
            raise ValueError("coupling parameters must be >= 0")


TorqueEffect = Union[HardWall, Detent, LinearDamping, Texture, MassSpringDamper]


@dataclass(frozen=True)
class ProxyState:
    """State of the virtual mass; evolves only via step_proxy."""

    proxy_angle: float = 0.0  # deg
    proxy_velocity: float = 0.0  # deg/s


@dataclass(frozen=True)
class RenderContext:
    """Knob state the renderer sees, plus the device torque ceiling."""

    theta: float  # deg, positive clockwise
    omega: float  # deg/s
    max_torque: float = 25.0  # N*cm

    def __post_init__(self) -> None:
        if self.max_torque <= 0:
            raise ValueError("max_torque must be > 0")


def effect_torque(
    effect: TorqueEffect, ctx: RenderContext, proxy: ProxyState | None = None
) -> float:
    """Unclamped torque contribution of one effect at the given knob state."""
    if isinstance(effect, HardWall):
        if effect.blocked_side is Direction.CLOCKWISE:
            penetration = ctx.theta - effect.wall_angle
            if penetration > 0:
                return -effect.stiffness * penetration
        else:
            penetration = effect.wall_angle - ctx.theta
            if penetration > 0:
                return effect.stiffness * penetration
        return 0.0
    if isinstance(effect, Detent):
        wave = math.sin(2.0 * math.pi * (ctx.theta - effect.phase) / effect.spacing)
        if effect.kind is DetentKind.VALLEY:
            return -effect.amplitude * wave
        return effect.amplitude * wave
    if isinstance(effect, LinearDamping):
        return -effect.coefficient * ctx.omega
    if isinstance(effect, Texture):
        b = (
            effect.peak_coefficient
            * (1.0 + math.sin(2.0 * math.pi * ctx.theta / effect.spatial_period))
            / 2.0
        )
        return -b * ctx.omega
    if isinstance(effect, MassSpringDamper):
        if proxy is None:
            proxy = ProxyState()
        return -effect.coupling_stiffness * (
            ctx.theta - proxy.proxy_angle
        ) - effect.coupling_damping * (ctx.omega - proxy.proxy_velocity)
    raise TypeError(f"unknown effect type: {type(effect).__name__}")


def step_proxy(
    effect: MassSpringDamper, proxy: ProxyState, ctx: RenderContext, dt: float
) -> ProxyState:
    """Semi-implicit update of the virtual mass over one control period."""
    if effect.virtual_inertia <= 0:
        raise ValueError("virtual_inertia must be > 0 to integrate the proxy")
    if dt <= 0:
        raise ValueError("dt must be > 0")
    accel = (
        effect.coupling_stiffness * (ctx.theta - proxy.proxy_angle)
        + effect.coupling_damping * (ctx.omega - proxy.proxy_velocity)
    ) / effect.virtual_inertia
    velocity = proxy.proxy_velocity + dt * accel
    angle = proxy.proxy_angle + dt * velocity
    return ProxyState(angle, velocity)


def compose_and_clamp(
    effects: Sequence[TorqueEffect],
    ctx: RenderContext,
    proxies: Sequence[ProxyState | None] | None = None,
) -> float:
    """Total torque of an effect stack, clamped to [-max_torque, +max_torque].

    `proxies` aligns with `effects` by index; entries for effects without a
    proxy are ignored (None is fine).
    """
    total = 0.0
    for i, effect in enumerate(effects):
        proxy = proxies[i] if proxies is not None and i < len(proxies) else None
        total += effect_torque(effect, ctx, proxy)
    return min(max(total, -ctx.max_torque), ctx.max_torque)


# JSON form: {"type": <tag>, <field>: <value>, ...} with lower_snake_case
# field names exactly as declared on the dataclasses.
_EFFECT_TAGS: dict[str, type] = {
    "hard_wall": HardWall,
    "detent": Detent,
    "linear_damping": LinearDamping,
    "texture": Texture,
    "mass_spring_damper": MassSpringDamper,
}
_ENUM_FIELDS = {"blocked_side": Direction, "kind": DetentKind}
_TAGS_BY_TYPE = {cls: tag for tag, cls in _EFFECT_TAGS.items()}
_DIRECTION_NAMES = {
    Direction.CLOCKWISE: "clockwise",
    Direction.COUNTERCLOCKWISE: "counterclockwise",
}


def effect_to_dict(effect: TorqueEffect) -> dict:
    """Serialize an effect for the session JSON configuration."""
    out: dict = {"type": _TAGS_BY_TYPE[type(effect)]}
    for f in fields(effect):
        value = getattr(effect, f.name)
        if isinstance(value, Direction):
            value = _DIRECTION_NAMES[value]
        elif isinstance(value, DetentKind):
            value = value.value
        out[f.name] = value
    return out


def effect_from_dict(data: dict) -> TorqueEffect:
    """Inverse of effect_to_dict; raises ValueError on unknown tags/fields."""
    try:
        tag = data["type"]
    except KeyError:
        raise ValueError("effect dict is missing 'type'") from None
    cls = _EFFECT_TAGS.get(tag)
    if cls is None:
        raise ValueError(f"unknown effect type: {tag!r}")
    kwargs = {}
    valid = {f.name for f in fields(cls)}
    for key, value in data.items():
        if key == "type":
            continue
        if key not in valid:
            raise ValueError(f"unknown field {key!r} for effect {tag!r}")
        if key == "blocked_side":
            names = {name: d for d, name in _DIRECTION_NAMES.items()}
            if value not in names:
                raise ValueError(f"invalid blocked_side: {value!r}")
            value = names[value]
        elif key == "kind":
            try:
                value = DetentKind(value)
            except ValueError:
                raise ValueError(f"invalid detent kind: {value!r}") from None
        kwargs[key] = value
    return cls(**kwargs)

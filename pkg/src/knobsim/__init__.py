"""knobsim: deterministic simulator of a shape-changing force-feedback knob.

The package mirrors the device's architecture: `transduction` models the
encoder/gearbox/PWM chain, `effects` renders torque fields, `shape` handles
the fin-expansion kinematics, `plant` integrates the rotor, and `session`
ties them into a fixed-rate control loop with a streaming protocol, CSV
traces, and a CLI.
"""

from .effects import (
    Detent,
    DetentKind,
    HardWall,
    LinearDamping,
    MassSpringDamper,
    ProxyState,
    RenderContext,
    Texture,
    compose_and_clamp,
    effect_torque,
    step_proxy,
)
from .plant import HandInput, HandMode, PlantParams, PlantState
from .session import (
    HandScript,
    Mode,
    Session,
    SessionConfig,
    Snapshot,
    default_mode_table,
    run_session,
)
from .shape import (
    FinConfiguration,
    PulleyState,
    ServoState,
    ShapePreset,
    fin_displacements,
    outer_profile,
    preset_targets,
    step_servos,
)
from .transduction import (
    BacklashState,
    Direction,
    DrivetrainConfig,
    Engagement,
    MotorCommand,
    VelocityFilterState,
    apply_backlash,
    counts_to_angle,
    estimate_velocity,
    knob_resolution,
    quantize_angle,
    torque_to_command,
)

__version__ = "0.1.0"

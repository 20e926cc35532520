"""Control loop orchestration: tick pipeline, protocol handling, hand scripts."""

import dataclasses

import pytest

from knobsim.effects import Detent, MassSpringDamper, effect_torque, RenderContext
from knobsim.plant import HandInput
from knobsim.session import (
    HandScript,
    Mode,
    Session,
    SessionConfig,
    default_mode_table,
    run_session,
)
from knobsim.shape import ShapePreset, preset_targets
from knobsim.transduction import ConfigError, DrivetrainConfig


def make_session(**config_kwargs) -> Session:
    initial_mode = config_kwargs.pop("initial_mode", 1)
    return Session(SessionConfig(**config_kwargs), initial_mode=initial_mode)


# A drivetrain so fine-grained that quantization is negligible (0.1 mdeg).
FINE_DRIVETRAIN = DrivetrainConfig(3.6e6, 1.0, 1.0)


# -- tick pipeline ------------------------------------------------------------


def test_rest_equilibrium_damping_mode():
    session = make_session(initial_mode=4)
    snap = session.tick(HandInput.direct(0.0))
    assert snap.torque_cmd_ncm == 0.0
    assert snap.theta_deg == 0.0
    assert snap.omega_dps == 0.0
    assert snap.mode == 4
    assert snap.preset == "two_fin"


def test_timestamps_are_tick_over_loop_rate():
    session = make_session()
    for k in range(1, 6):
        snap = session.tick()
        assert snap.t_s == k / 1000.0


def test_exactly_one_plant_step_per_tick():
    session = make_session(initial_mode=4)
    session.tick(HandInput.direct(5.0))
    theta_after_one = session.plant_state.theta
    # one step from rest: omega = dt*tau/J, theta = dt*omega
    params = session.params
    expected = params.dt * (params.dt * 5.0 / params.inertia)
    assert theta_after_one == pytest.approx(expected, rel=1e-9)


def test_rendering_uses_encoder_angle_not_true_angle():
    # coarse default encoder: inside the first quantization cell the detent
    # torque must stay exactly zero even though the true angle moved
    session = make_session()
    session.plant_state = dataclasses.replace(
        session.plant_state, theta=0.3,
        backlash=dataclasses.replace(session.plant_state.backlash,
                                     knob_side_angle=0.3),
    )
    snap = session.tick(HandInput.direct(0.0))
    assert snap.torque_cmd_ncm == 0.0  # quantized angle is still count 0


def test_pipeline_matches_true_angle_with_fine_encoder():
    # with quantization negligible and no backlash, the rendered torque equals
    # the detent law evaluated at the true (pre-step) angle
    session = make_session(drivetrain=FINE_DRIVETRAIN)
    detent = session.mode.effects[0]
    assert isinstance(detent, Detent)
    hand = HandInput.grip(360.0, 2.0, 0.01)
    for _ in range(2000):
        theta_before = session.plant_state.theta
        snap = session.tick(hand)
        expected = effect_torque(
            detent, RenderContext(theta_before, 0.0, 25.0)
        )
        expected = min(max(expected, -25.0), 25.0)
        assert snap.torque_cmd_ncm == pytest.approx(expected, abs=1e-3)


def test_snapshot_invariants_under_torture():
    config = SessionConfig(drivetrain=DrivetrainConfig(backlash_width=2.0))
    session = Session(config, initial_mode=2)
    for k in range(3000):
        hand = HandInput.direct(30.0 if (k // 300) % 2 == 0 else -30.0)
        snap = session.tick(hand)
        assert abs(snap.torque_cmd_ncm) <= 25.0
        assert 0.0 <= snap.duty <= 1.0
        assert all(0.0 <= d <= 8.0 for d in snap.fins_mm)
        assert snap.direction in ("cw", "ccw")


# -- mode and preset switching ---------------------------------------------------


def test_set_mode_switches_effects_and_retargets_servos():
    session = make_session()
    session.set_mode(2)
    assert session.mode.number == 2
    assert session.preset_name == "four_fin"
    # servos slew toward the new target rather than jumping
    snap = session.tick()
    assert snap.pulley_a_deg == pytest.approx(0.5)  # 500 deg/s * 1 ms
    target = preset_targets(ShapePreset.FOUR_FIN)
    for _ in range(1000):
        snap = session.tick()
    assert snap.pulley_a_deg == target.pulley_a_deg
    assert snap.pulley_b_deg == target.pulley_b_deg


def test_set_preset_overrides_shape_only():
    session = make_session()
    session.set_preset(ShapePreset.SIX_FIN)
    assert session.mode.number == 1  # effects unchanged
    assert session.preset_name == "six_fin"
    for _ in range(1000):
        snap = session.tick()
    assert snap.fins_mm == pytest.approx((8.0,) * 6)
    assert snap.mode == 1


def test_mode_switch_to_spring_mass_anchors_proxy():
    # entering the virtual-mass mode must not slam the clamp: the proxy is
    # anchored at the current encoder angle, so only the damping term remains
    session = make_session(drivetrain=FINE_DRIVETRAIN)
    hand = HandInput.grip(60.0, 2.0, 0.0)
    for _ in range(500):
        session.tick(hand)
    omega = session.plant_state.omega
    session.set_mode(6)
    snap = session.tick(hand)
    msd = session.config.modes[6].effects[0]
    assert isinstance(msd, MassSpringDamper)
    bound = msd.coupling_damping * (abs(omega) + 50.0) + 1.0
    assert abs(snap.torque_cmd_ncm) <= bound


def test_reset_rezeros_but_time_keeps_running():
    session = make_session()
    for _ in range(10):
        session.tick(HandInput.direct(5.0))
    session.set_mode(3)
    session.reset()
    assert session.plant_state.theta == 0.0
    assert session.plant_state.omega == 0.0
    assert session.mode.number == 1
    snap = session.tick()
    assert snap.t_s == pytest.approx(11 / 1000.0)


def test_set_mode_out_of_range():
    session = make_session()
    with pytest.raises(ValueError):
        session.set_mode(7)


# -- protocol -----------------------------------------------------------------


def test_hello_lists_modes_and_presets():
    session = make_session()
    handled = session.handle_message({"type": "hello", "id": 7})
    assert handled.reply["type"] == "ack"
    assert handled.reply["id"] == 7
    assert [m["mode"] for m in handled.reply["modes"]] == [1, 2, 3, 4, 5, 6]
    assert "default" in handled.reply["presets"]


def test_set_mode_ack():
    session = make_session()
    handled = session.handle_message({"type": "set_mode", "mode": 3})
    assert handled.reply == {"type": "ack", "mode": 3}
    assert session.mode.number == 3


def test_set_mode_out_of_range_error():
    session = make_session()
    handled = session.handle_message({"type": "set_mode", "mode": 9})
    assert handled.reply == {"type": "error", "code": "out_of_range"}


def test_set_mode_garbage_is_parse_error():
    session = make_session()
    handled = session.handle_message({"type": "set_mode", "mode": "three"})
    assert handled.reply["code"] == "parse_error"


def test_unknown_type_error_echoes_id():
    session = make_session()
    handled = session.handle_message({"type": "warp", "id": "abc"})
    assert handled.reply == {"type": "error", "code": "unknown_type", "id": "abc"}


def test_non_object_message_is_parse_error():
    session = make_session()
    assert session.handle_message([1, 2, 3]).reply["code"] == "parse_error"
    assert session.handle_message("hello").reply["code"] == "parse_error"


def test_set_preset_by_name_and_id():
    session = make_session()
    handled = session.handle_message({"type": "set_preset", "preset": "pointer"})
    assert handled.reply == {"type": "ack", "preset": "pointer"}
    handled = session.handle_message({"type": "set_preset", "preset": 5})
    assert handled.reply == {"type": "ack", "preset": "six_fin"}
    handled = session.handle_message({"type": "set_preset", "preset": "mystery"})
    assert handled.reply["code"] == "out_of_range"


def test_set_hand_direct_and_grip():
    session = make_session()
    handled = session.handle_message(
        {"type": "set_hand", "mode": "direct_torque", "torque_ncm": 2.5}
    )
    assert handled.reply["type"] == "ack"
    assert session.hand.torque_ncm == 2.5
    handled = session.handle_message({
        "type": "set_hand", "mode": "position_grip", "target_deg": 90.0,
        "grip_stiffness": 2.0, "grip_damping": 0.1,
    })
    assert handled.reply["type"] == "ack"
    assert session.hand.target_deg == 90.0
    handled = session.handle_message({
        "type": "set_hand", "mode": "position_grip", "grip_stiffness": -1.0,
    })
    assert handled.reply["code"] == "out_of_range"


def test_reset_message():
    session = make_session()
    session.tick(HandInput.direct(10.0))
    handled = session.handle_message({"type": "reset"})
    assert handled.reply["type"] == "ack"
    assert session.plant_state.theta == 0.0


def test_subscribe_and_unsubscribe_directives():
    session = make_session()
    handled = session.handle_message({"type": "subscribe", "rate_hz": 60})
    assert handled.reply == {"type": "ack", "rate_hz": 60}
    assert handled.subscribe_rate_hz == 60.0
    handled = session.handle_message({"type": "subscribe", "rate_hz": 0})
    assert handled.reply["code"] == "out_of_range"
    handled = session.handle_message({"type": "unsubscribe"})
    assert handled.unsubscribe


def test_snapshot_stride_is_floor():
    session = make_session()
    assert session.snapshot_stride(60.0) == 16  # floor(1000/60)
    assert session.snapshot_stride(1000.0) == 1
    assert session.snapshot_stride(2000.0) == 1
    assert session.snapshot_stride(100.0) == 10


# -- determinism ---------------------------------------------------------------


def test_identical_scripts_produce_identical_snapshot_streams():
    script = HandScript.from_dict([
        {"t": 0.0, "mode": "direct_torque", "torque_ncm": 0.0,
         "torque_end_ncm": 8.0, "t_end": 0.5},
        {"t": 0.5, "mode": "position_grip", "target_deg": 0.0,
         "target_end_deg": 180.0, "t_end": 1.0, "grip_stiffness": 2.0},
    ])
    runs = []
    for _ in range(2):
        session = make_session(initial_mode=2)
        runs.append(run_session(session, 1.0, script))
    assert runs[0] == runs[1]


# -- hand scripts -----------------------------------------------------------------


def test_hand_script_segments_and_ramps():
    script = HandScript.from_dict({
        "segments": [
            {"t": 1.0, "mode": "direct_torque", "torque_ncm": 2.0},
            {"t": 2.0, "mode": "position_grip", "target_deg": 0.0,
             "target_end_deg": 100.0, "t_end": 3.0, "grip_stiffness": 1.5},
        ]
    })
    assert script.hand_at(0.0) == HandInput.direct(0.0)  # idle before start
    assert script.hand_at(1.5).torque_ncm == 2.0
    assert script.hand_at(2.5).target_deg == pytest.approx(50.0)
    assert script.hand_at(3.0).target_deg == pytest.approx(100.0)
    assert script.hand_at(99.0).target_deg == pytest.approx(100.0)  # holds


def test_hand_script_ramp_defaults_to_next_segment():
    script = HandScript.from_dict([
        {"t": 0.0, "mode": "direct_torque", "torque_ncm": 0.0,
         "torque_end_ncm": 10.0},
        {"t": 2.0, "mode": "direct_torque", "torque_ncm": 1.0},
    ])
    assert script.hand_at(1.0).torque_ncm == pytest.approx(5.0)
    assert script.hand_at(2.5).torque_ncm == 1.0


def test_hand_script_last_ramp_needs_horizon():
    with pytest.raises(ValueError):
        HandScript.from_dict([
            {"t": 0.0, "mode": "direct_torque", "torque_ncm": 0.0,
             "torque_end_ncm": 10.0},
        ])


# -- config --------------------------------------------------------------------


def test_config_round_trips_through_dict():
    config = SessionConfig()
    rebuilt = SessionConfig.from_dict(config.to_dict())
    assert rebuilt == config


def test_config_mode_override():
    data = {
        "drivetrain": {"backlash_width": 2.0},
        "modes": {
            "2": {
                "name": "stiff_wall",
                "effects": [{"type": "hard_wall", "wall_angle": 10.0,
                             "blocked_side": "clockwise", "stiffness": 50.0}],
            }
        },
    }
    config = SessionConfig.from_dict(data)
    assert config.drivetrain.backlash_width == 2.0
    assert config.modes[2].name == "stiff_wall"
    assert config.modes[2].preset is ShapePreset.FOUR_FIN  # inherited
    assert config.modes[1] == default_mode_table()[1]


def test_config_rejects_unknown_keys_and_bad_rates():
    with pytest.raises(ConfigError):
        SessionConfig.from_dict({"loop_rate": 1000})
    with pytest.raises(ConfigError):
        SessionConfig(loop_rate_hz=30.0, snapshot_rate_hz=60.0)
    with pytest.raises(ConfigError):
        SessionConfig.from_dict({"modes": {"9": {"name": "x"}}})


def test_mode_table_must_have_six_modes():
    table = default_mode_table()
    del table[6]
    with pytest.raises(ConfigError):
        SessionConfig(modes=table)

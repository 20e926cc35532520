"""Rotor physics: motor/hand torque maps, stepping, friction, backlash wiring."""

import struct

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from knobsim.plant import (
    COULOMB_KNEE_DPS,
    HandInput,
    PlantParams,
    PlantState,
    hand_torque,
    motor_torque,
    step,
)
from knobsim.transduction import (
    ConfigError,
    Direction,
    MotorCommand,
    torque_to_command,
)

PARAMS = PlantParams()


# -- torque sources -----------------------------------------------------------


def test_motor_full_duty_clockwise():
    assert motor_torque(MotorCommand(1.0, Direction.CLOCKWISE), PARAMS) == 25.0


def test_motor_zero_duty():
    assert motor_torque(MotorCommand(0.0, Direction.CLOCKWISE), PARAMS) == 0.0


def test_motor_half_duty_counterclockwise():
    cmd = MotorCommand(0.5, Direction.COUNTERCLOCKWISE)
    assert motor_torque(cmd, PARAMS) == -12.5


def test_motor_round_trips_command_mapping():
    for tau in (-25.0, -3.2, 0.0, 11.0, 25.0):
        cmd = torque_to_command(tau, PARAMS.max_motor_torque)
        assert motor_torque(cmd, PARAMS) == pytest.approx(tau)


def test_hand_direct_passthrough():
    assert hand_torque(HandInput.direct(3.0), PlantState()) == 3.0


def test_hand_grip_equilibrium():
    state = PlantState(theta=42.0, omega=0.0)
    assert hand_torque(HandInput.grip(42.0, 2.0), state) == 0.0


def test_hand_grip_spring_law():
    state = PlantState(theta=10.0, omega=0.0)
    assert hand_torque(HandInput.grip(15.0, 2.0), state) == pytest.approx(10.0)


def test_hand_grip_rejects_negative_gains():
    with pytest.raises(ValueError):
        HandInput.grip(0.0, -1.0)


# -- stepping ---------------------------------------------------------------------


def test_rest_equilibrium_is_fixed_point():
    state = PlantState()
    assert step(state, 0.0, 0.0, PARAMS) == state


def test_free_rotor_matches_closed_form():
    # frictionless, constant 0.1 N*cm for 10 ms: omega = tau*t/J
    params = PlantParams(viscous_friction=0.0, coulomb_friction=0.0)
    state = PlantState()
    for _ in range(10):
        state = step(state, 0.1, 0.0, params)
    expected = 0.1 * 0.010 / params.inertia
    assert state.omega == pytest.approx(expected, rel=1e-12)
    assert state.omega == pytest.approx(1.1458, rel=5e-3)


def test_damping_only_decays_monotonically():
    state = PlantState(omega=100.0)
    prev = state.omega
    for _ in range(1000):
        state = step(state, 0.0, 0.0, PARAMS)
        assert abs(state.omega) <= abs(prev)
        prev = state.omega
    assert abs(state.omega) < 1.0


def test_energy_non_increasing_without_inputs():
    for omega0 in (-400.0, -20.0, 0.5, 3.0, 250.0):
        state = PlantState(omega=omega0)
        energy = 0.5 * PARAMS.inertia * state.omega**2
        for _ in range(2000):
            state = step(state, 0.0, 0.0, PARAMS)
            e = 0.5 * PARAMS.inertia * state.omega**2
            assert e <= energy + 1e-15
            energy = e


def test_coulomb_regularization_is_continuous():
    # successor velocity is continuous across the regularization knee
    eps = 1e-9
    lo = step(PlantState(omega=COULOMB_KNEE_DPS - eps), 0.0, 0.0, PARAMS)
    hi = step(PlantState(omega=COULOMB_KNEE_DPS + eps), 0.0, 0.0, PARAMS)
    assert hi.omega - lo.omega == pytest.approx(0.0, abs=1e-6)
    lo = step(PlantState(omega=-eps), 0.0, 0.0, PARAMS)
    hi = step(PlantState(omega=+eps), 0.0, 0.0, PARAMS)
    assert hi.omega - lo.omega == pytest.approx(0.0, abs=1e-6)


def test_step_is_deterministic_bitwise():
    state = PlantState(theta=1.234, omega=-56.78)
    a = step(state, 3.21, -1.1, PARAMS, backlash_width=2.0)
    b = step(state, 3.21, -1.1, PARAMS, backlash_width=2.0)
    pack = lambda s: struct.pack(
        "<ddd", s.theta, s.omega, s.backlash.knob_side_angle
    )
    assert pack(a) == pack(b)


def test_backlash_disabled_tracks_exactly():
    state = PlantState()
    for k in range(500):
        hand = HandInput.direct(2.0 if k < 250 else -2.0)
        state = step(state, 0.0, hand_torque(hand, state), PARAMS)
        assert state.backlash.knob_side_angle == state.theta


def test_backlash_enabled_lags_within_half_width():
    width = 2.0
    state = PlantState()
    for k in range(1000):
        hand = HandInput.direct(3.0 if (k // 200) % 2 == 0 else -3.0)
        state = step(state, 0.0, hand_torque(hand, state), PARAMS, width)
        assert abs(state.theta - state.backlash.knob_side_angle) <= width / 2 + 1e-12


@settings(max_examples=30, deadline=None)
@given(
    st.floats(min_value=-20.0, max_value=20.0),
    st.floats(min_value=-300.0, max_value=300.0),
)
def test_velocity_update_bounded_by_torque(torque, omega0):
    # one step never changes omega by more than the worst-case net torque
    state = PlantState(omega=omega0)
    after = step(state, torque, 0.0, PARAMS)
    worst = (
        abs(torque)
        + PARAMS.viscous_friction * abs(omega0)
        + PARAMS.coulomb_friction
    )
    assert abs(after.omega - omega0) <= PARAMS.dt * worst / PARAMS.inertia + 1e-12


def test_step_size_convergence_smooth_forcing():
    # grip toward 30 deg: dt = 1 ms vs a 10 us reference, 2 s horizon
    hand = HandInput.grip(30.0, 0.5, 0.02)

    def run(dt, seconds):
        params = PlantParams(dt=dt)
        state = PlantState()
        trajectory = []
        for k in range(round(seconds / dt)):
            state = step(state, 0.0, hand_torque(hand, state), params)
            trajectory.append(state.theta)
        return trajectory

    coarse = run(1e-3, 2.0)
    fine = run(1e-5, 2.0)
    worst = max(
        abs(c - fine[100 * (i + 1) - 1]) for i, c in enumerate(coarse)
    )
    assert worst <= 0.5


def test_invalid_params_rejected():
    with pytest.raises(ConfigError):
        PlantParams(inertia=0.0)
    with pytest.raises(ConfigError):
        PlantParams(dt=0.0)
    with pytest.raises(ConfigError):
        PlantParams(viscous_friction=-1.0)

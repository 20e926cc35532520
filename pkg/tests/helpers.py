"""Shared test utilities."""

from knobsim.session import Snapshot


def synthetic_snapshot(
    t_s: float,
    theta_deg: float = 0.0,
    omega_dps: float = 0.0,
    torque_cmd_ncm: float = 0.0,
    hand_torque_ncm: float = 0.0,
    mode: int = 1,
) -> Snapshot:
    duty = min(abs(torque_cmd_ncm) / 25.0, 1.0)
    return Snapshot(
        t_s=t_s,
        theta_deg=theta_deg,
        omega_dps=omega_dps,
        torque_cmd_ncm=torque_cmd_ncm,
        duty=duty,
        direction="cw" if torque_cmd_ncm >= 0 else "ccw",
        mode=mode,
        preset="default",
        pulley_a_deg=0.0,
        pulley_b_deg=0.0,
        fins_mm=(0.0,) * 6,
        hand_torque_ncm=hand_torque_ncm,
    )

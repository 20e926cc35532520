"""Trace analysis: detent counting, torque extrema, energy balance, and
limit-cycle detection.

Works purely from recorded snapshots plus the inertia used for kinetic
energy, so it can audit any trace regardless of how it was produced.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

from .plant import PlantParams
from .session import Snapshot

DETENT_BIN_DEG = 0.5
# Bins with |torque| below this fraction of the peak are treated as zero when
# looking for sign changes, so sensor jitter around a crossing counts once.
DETENT_NOISE_FRACTION = 0.05


def count_stable_detents(
    snapshots: Sequence[Snapshot], bin_deg: float = DETENT_BIN_DEG
) -> int:
    """Stable equilibria in the rendered torque field over one revolution.

    Folds the sampled (theta, torque) curve onto [0, 360), averages torque in
    angular bins, and counts positive-to-negative transitions walking the
    circle: exactly the points a slow sweep would get captured by.
    """
    n_bins = max(1, round(360.0 / bin_deg))
    sums = [0.0] * n_bins
    counts = [0] * n_bins
    for s in snapshots:
        idx = int((s.theta_deg % 360.0) / 360.0 * n_bins) % n_bins
        sums[idx] += s.torque_cmd_ncm
        counts[idx] += 1
    values = [sums[i] / counts[i] for i in range(n_bins) if counts[i] > 0]
    if not values:
        return 0
    peak = max(abs(v) for v in values)
    if peak == 0.0:
        return 0
    floor = DETENT_NOISE_FRACTION * peak
    signs = [v for v in values if abs(v) > floor]
    if len(signs) < 2:
        return 0
    crossings = 0
    prev = signs[-1]  # close the circle
    for v in signs:
        if prev > 0 and v < 0:
            crossings += 1
        prev = v
    return crossings


def max_abs_torque(snapshots: Sequence[Snapshot]) -> float:
    return max((abs(s.torque_cmd_ncm) for s in snapshots), default=0.0)


@dataclass(frozen=True)
class EnergyBalance:
    """Work/energy bookkeeping over a trace, N*cm*deg units."""

    hand_work: float
    motor_work: float
    delta_kinetic: float
    dissipated: float  # hand + motor - delta_kinetic; >= 0 for passive runs


def energy_balance(
    snapshots: Sequence[Snapshot], inertia: float | None = None
) -> EnergyBalance:
    if inertia is None:
        inertia = PlantParams().inertia
    if not snapshots:
        return EnergyBalance(0.0, 0.0, 0.0, 0.0)
    hand_work = 0.0
    motor_work = 0.0
    prev_t = 0.0
    for s in snapshots:
        dt = s.t_s - prev_t
        prev_t = s.t_s
        hand_work += s.hand_torque_ncm * s.omega_dps * dt
        motor_work += s.torque_cmd_ncm * s.omega_dps * dt
    kinetic_first = 0.5 * inertia * snapshots[0].omega_dps ** 2
    kinetic_last = 0.5 * inertia * snapshots[-1].omega_dps ** 2
    delta = kinetic_last - kinetic_first
    return EnergyBalance(hand_work, motor_work, delta,
                         hand_work + motor_work - delta)


@dataclass(frozen=True)
class OscillationReport:
    """Tail-window limit-cycle metrics."""

    reversals: int  # velocity sign changes in the tail window
    reversals_per_s: float
    peak_to_peak_theta_deg: float
    rms_omega_dps: float
    sustained: bool


# A run is called a sustained oscillation when, in its final stretch, the
# velocity keeps reversing at speed and the angle keeps swinging. Creep
# inside one quantization cell stays below both floors.
OSC_MIN_REVERSALS_PER_S = 2.0
OSC_MIN_PTP_DEG = 0.5
OSC_OMEGA_FLOOR_DPS = 1.0


def detect_oscillation(
    snapshots: Sequence[Snapshot], tail_fraction: float = 0.5
) -> OscillationReport:
    if not snapshots:
        return OscillationReport(0, 0.0, 0.0, 0.0, False)
    start = int(len(snapshots) * (1.0 - tail_fraction))
    tail = snapshots[start:]
    duration = max(tail[-1].t_s - tail[0].t_s, 1e-12)
    reversals = 0
    prev_sign = 0
    for s in tail:
        if abs(s.omega_dps) < OSC_OMEGA_FLOOR_DPS:
            continue
        sign = 1 if s.omega_dps > 0 else -1
        if prev_sign != 0 and sign != prev_sign:
            reversals += 1
        prev_sign = sign
    thetas = [s.theta_deg for s in tail]
    ptp = max(thetas) - min(thetas)
    rms = math.sqrt(sum(s.omega_dps ** 2 for s in tail) / len(tail))
    per_s = reversals / duration
    sustained = per_s >= OSC_MIN_REVERSALS_PER_S and ptp >= OSC_MIN_PTP_DEG
    return OscillationReport(reversals, per_s, ptp, rms, sustained)


def analyze_snapshots(
    snapshots: Sequence[Snapshot], inertia: float | None = None
) -> dict:
    """Full report as a JSON-ready dict; what the analyze CLI prints."""
    energy = energy_balance(snapshots, inertia)
    osc = detect_oscillation(snapshots)
    return {
        "samples": len(snapshots),
        "duration_s": snapshots[-1].t_s if snapshots else 0.0,
        "detent_count": count_stable_detents(snapshots),
        "max_abs_torque_ncm": max_abs_torque(snapshots),
        "energy": {
            "hand_work": energy.hand_work,
            "motor_work": energy.motor_work,
            "delta_kinetic": energy.delta_kinetic,
            "dissipated": energy.dissipated,
        },
        "oscillation": {
            "reversals": osc.reversals,
            "reversals_per_s": osc.reversals_per_s,
            "peak_to_peak_theta_deg": osc.peak_to_peak_theta_deg,
            "rms_omega_dps": osc.rms_omega_dps,
            "sustained": osc.sustained,
        },
    }

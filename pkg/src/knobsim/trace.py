"""CSV trace recording and replay.

One row per control tick at full loop rate, columns fixed by TRACE_HEADER.
Floats are written with repr() so identical runs produce byte-identical
files and parsing round-trips exactly.
"""

from __future__ import annotations

import csv
import io
from pathlib import Path
from typing import Iterable, Iterator

from .session import Snapshot

TRACE_FIELDS = (
    "t_s", "theta_deg", "omega_dps", "torque_cmd_ncm", "duty", "direction",
    "mode", "preset", "pulley_a_deg", "pulley_b_deg",
    "fin0_mm", "fin1_mm", "fin2_mm", "fin3_mm", "fin4_mm", "fin5_mm",
    "hand_torque_ncm",
)
TRACE_HEADER = ",".join(TRACE_FIELDS)


class TraceFormatError(ValueError):
    """A trace file row could not be parsed; carries the 1-based row number."""

    def __init__(self, row: int, message: str):
        super().__init__(f"row {row}: {message}")
        self.row = row


def snapshot_to_row(s: Snapshot) -> list[str]:
    return [
        repr(s.t_s), repr(s.theta_deg), repr(s.omega_dps),
        repr(s.torque_cmd_ncm), repr(s.duty), s.direction,
        str(s.mode), s.preset, repr(s.pulley_a_deg), repr(s.pulley_b_deg),
        *(repr(d) for d in s.fins_mm),
        repr(s.hand_torque_ncm),
    ]


def row_to_snapshot(row: list[str], row_number: int) -> Snapshot:
    if len(row) != len(TRACE_FIELDS):
        raise TraceFormatError(
            row_number,
            f"expected {len(TRACE_FIELDS)} columns, got {len(row)}",
        )
    try:
        direction = row[5]
        if direction not in ("cw", "ccw"):
            raise ValueError(f"bad direction {direction!r}")
        return Snapshot(
            t_s=float(row[0]),
            theta_deg=float(row[1]),
            omega_dps=float(row[2]),
            torque_cmd_ncm=float(row[3]),
            duty=float(row[4]),
            direction=direction,
            mode=int(row[6]),
            preset=row[7],
            pulley_a_deg=float(row[8]),
            pulley_b_deg=float(row[9]),
            fins_mm=tuple(float(v) for v in row[10:16]),  # type: ignore[arg-type]
            hand_torque_ncm=float(row[16]),
        )
    except ValueError as exc:
        raise TraceFormatError(row_number, str(exc)) from None


class TraceWriter:
    """Streams snapshots to a CSV sink; writes the header immediately."""

    def __init__(self, sink: io.TextIOBase):
        self._sink = sink
        self._writer = csv.writer(sink, lineterminator="\n")
        self._writer.writerow(TRACE_FIELDS)

    def write(self, snapshot: Snapshot) -> None:
        self._writer.writerow(snapshot_to_row(snapshot))


def write_trace(snapshots: Iterable[Snapshot], path: str | Path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as f:
        writer = TraceWriter(f)
        for snap in snapshots:
            writer.write(snap)


def read_trace(path: str | Path) -> list[Snapshot]:
    """Parse a trace file; aborts with the offending row number on bad input."""
    with open(path, "r", encoding="utf-8", newline="") as f:
        reader = csv.reader(f)
        try:
            header = next(reader)
        except StopIteration:
            raise TraceFormatError(1, "missing header") from None
        if header != list(TRACE_FIELDS):
            raise TraceFormatError(1, "unexpected header")
        return [row_to_snapshot(row, i) for i, row in enumerate(reader, start=2)]


def replay_trace(source: str | Path) -> Iterator[Snapshot]:
    """Re-emit recorded snapshots in tick order without re-simulation."""
    yield from read_trace(source)

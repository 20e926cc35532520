"""Command-line entry points: serve, run, replay, sweep, analyze."""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys
import threading
from pathlib import Path

from . import effects as fx
from .analyze import analyze_snapshots
from .server import KnobServer, run_ws_bridge
from .session import HandScript, Mode, Session, SessionConfig, run_session
from .shape import ShapePreset
from .trace import TraceWriter, read_trace
from .transduction import Direction


def _load_config(path: str | None) -> SessionConfig:
    if path is None:
        return SessionConfig()
    with open(path, "r", encoding="utf-8") as f:
        return SessionConfig.from_dict(json.load(f))


def _cmd_serve(args: argparse.Namespace) -> int:
    config = _load_config(args.config)
    session = Session(config, initial_mode=args.mode)
    server = KnobServer(session, host=args.host, port=args.port, pace=True)
    server.start()
    print(f"serving ndjson protocol on {args.host}:{server.port}", flush=True)
    stop = threading.Event()
    if args.ws_port is not None:
        bridge = threading.Thread(
            target=run_ws_bridge,
            args=(args.host, args.ws_port, args.host, server.port, stop),
            daemon=True,
        )
        bridge.start()
        print(f"websocket bridge on ws://{args.host}:{args.ws_port}", flush=True)
    try:
        while True:
            threading.Event().wait(0.5)
    except KeyboardInterrupt:
        pass
    finally:
        stop.set()
        server.stop()
    return 0


def _cmd_run(args: argparse.Namespace) -> int:
    config = _load_config(args.config)
    session = Session(config, initial_mode=args.mode)
    script = HandScript.load(args.hand) if args.hand else None
    with open(args.out, "w", encoding="utf-8", newline="") as f:
        writer = TraceWriter(f)
        run_session(session, args.seconds, script, on_snapshot=writer.write)
    return 0


def _cmd_replay(args: argparse.Namespace) -> int:
    for snapshot in read_trace(args.trace):
        sys.stdout.write(
            json.dumps(snapshot.as_wire_dict(), separators=(",", ":")) + "\n"
        )
    return 0


def _cmd_analyze(args: argparse.Namespace) -> int:
    snapshots = read_trace(args.trace)
    inertia = args.inertia
    if inertia is None:
        inertia = _load_config(args.config).plant.inertia
    report = analyze_snapshots(snapshots, inertia)
    print(json.dumps(report, indent=2))
    return 0


_SWEEP_BASES: dict[str, fx.TorqueEffect] = {
    "hard_wall": fx.HardWall(10.0, Direction.CLOCKWISE, 10.0),
    "detent": fx.Detent(spacing=18.0, amplitude=4.0),
    "linear_damping": fx.LinearDamping(0.02),
    "texture": fx.Texture(spatial_period=12.0, peak_coefficient=0.04),
    "mass_spring_damper": fx.MassSpringDamper(0.002, 2.0, 0.05),
}


def _cmd_sweep(args: argparse.Namespace) -> int:
    base = _SWEEP_BASES[args.effect]
    valid = {f.name for f in dataclasses.fields(base)}
    if args.param not in valid:
        print(
            f"unknown param {args.param!r} for {args.effect}; "
            f"valid: {sorted(valid)}",
            file=sys.stderr,
        )
        return 2
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    if args.steps < 1:
        print("--steps must be >= 1", file=sys.stderr)
        return 2
    values = [
        args.start + (args.stop - args.start) * i / max(args.steps - 1, 1)
        for i in range(args.steps)
    ]
    # Slow full-turn grip sweep; stiff enough to drag through any base effect.
    script = HandScript.from_dict([{
        "t": 0.0, "mode": "position_grip", "target_deg": 0.0,
        "target_end_deg": 360.0, "t_end": args.seconds,
        "grip_stiffness": 2.0, "grip_damping": 0.01,
    }])
    config = _load_config(args.config)
    summary = []
    for value in values:
        effect = dataclasses.replace(base, **{args.param: value})
        modes = dict(config.modes)
        modes[1] = Mode(1, f"sweep_{args.effect}", ShapePreset.DEFAULT, (effect,))
        sweep_config = dataclasses.replace(config, modes=modes)
        session = Session(sweep_config, initial_mode=1)
        trace_path = out_dir / f"{args.effect}_{args.param}_{value:.6g}.csv"
        with open(trace_path, "w", encoding="utf-8", newline="") as f:
            writer = TraceWriter(f)
            run_session(session, args.seconds, script, on_snapshot=writer.write)
        report = analyze_snapshots(read_trace(trace_path),
                                   sweep_config.plant.inertia)
        summary.append({
            "value": value,
            "trace": trace_path.name,
            **report,
        })
    summary_path = out_dir / "summary.json"
    with open(summary_path, "w", encoding="utf-8") as f:
        json.dump(summary, f, indent=2)
    print(f"wrote {len(values)} traces and {summary_path}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="knobsim",
        description="Deterministic shape-changing haptic knob simulator",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    serve = sub.add_parser("serve", help="run the live streaming service")
    serve.add_argument("--host", default="127.0.0.1")
    serve.add_argument("--port", type=int, default=8780)
    serve.add_argument("--ws-port", type=int, default=None,
                       help="also bridge the protocol over WebSocket")
    serve.add_argument("--config", default=None, help="JSON config file")
    serve.add_argument("--mode", type=int, default=1)
    serve.set_defaults(func=_cmd_serve)

    run = sub.add_parser("run", help="free-run a scripted session to a trace")
    run.add_argument("--mode", type=int, default=1)
    run.add_argument("--seconds", type=float, required=True)
    run.add_argument("--hand", default=None, help="hand script JSON file")
    run.add_argument("--out", required=True, help="output trace CSV")
    run.add_argument("--config", default=None)
    run.set_defaults(func=_cmd_run)

    replay = sub.add_parser("replay", help="re-emit a recorded trace as NDJSON")
    replay.add_argument("--trace", required=True)
    replay.set_defaults(func=_cmd_replay)

    sweep = sub.add_parser("sweep", help="sweep one effect parameter")
    sweep.add_argument("--effect", required=True, choices=sorted(_SWEEP_BASES))
    sweep.add_argument("--param", required=True)
    sweep.add_argument("--from", dest="start", type=float, required=True)
    sweep.add_argument("--to", dest="stop", type=float, required=True)
    sweep.add_argument("--steps", type=int, required=True)
    sweep.add_argument("--seconds", type=float, default=12.0)
    sweep.add_argument("--out", required=True, help="output directory")
    sweep.add_argument("--config", default=None)
    sweep.set_defaults(func=_cmd_sweep)

    analyze = sub.add_parser("analyze", help="report metrics for a trace")
    analyze.add_argument("--trace", required=True)
    analyze.add_argument("--inertia", type=float, default=None)
    analyze.add_argument("--config", default=None)
    analyze.set_defaults(func=_cmd_analyze)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())

"""Command-line entry points: headless runs, trace audits, the API server."""
from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .config import ConfigError, load_config
from .errors import BridgewatchError
from .scenario import load_scenario
from .session import run_headless
from .trace import audit_trace, dump_trace, load_trace

VERDICT_BY_FLAG = {"accept": "accepted", "decline": "declined"}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="bridgewatch",
        description="Collision-avoidance simulator with contrastive "
                    "maneuver explanations.")
    parser.add_argument("--config", help="JSON config file", default=None)
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run a scenario headless and write a trace")
    run.add_argument("--scenario", required=True, help="scenario JSON file")
    run.add_argument("--decision", choices=sorted(VERDICT_BY_FLAG),
                     default=None, help="supervisor verdict applied at the "
                                        "decision point")
    run.add_argument("--trace", default=None, help="output trace path (JSONL)")
    run.add_argument("--duration", type=float, default=None,
                     help="override the configured run length in seconds")

    audit = sub.add_parser("audit", help="re-check the invariants of a trace file")
    audit.add_argument("--trace", required=True, help="trace file to audit")

    serve = sub.add_parser("serve", help="start the supervision API server")
    serve.add_argument("--port", type=int, default=None)
    serve.add_argument("--scenario-dir", default=None,
                       help="directory of scenario JSON files (default: bundled)")
    serve.add_argument("--host", default="127.0.0.1")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config)
        if args.command == "run":
            return _cmd_run(args, cfg)
        if args.command == "audit":
            return _cmd_audit(args)
        return _cmd_serve(args, cfg)
    except (BridgewatchError, ConfigError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def _cmd_run(args: argparse.Namespace, cfg) -> int:
    import dataclasses

    if args.duration is not None:
        if args.duration <= 0:
            print("error: --duration must be positive", file=sys.stderr)
            return 2
        cfg = dataclasses.replace(
            cfg, session=dataclasses.replace(cfg.session, duration=args.duration))
    scenario = load_scenario(Path(args.scenario).read_text(encoding="utf-8"))
    verdict = VERDICT_BY_FLAG[args.decision] if args.decision else None
    session = run_headless(scenario, cfg, verdict)
    if args.trace:
        dump_trace(session.trace, args.trace)
    point = session.decision_point
    trigger = f"{point.trigger_time:g} s" if point else "none"
    separation = (f"{session.min_separation:.1f} m"
                  if session.obstacles else "n/a")
    print(f"scenario {scenario.id}: {session.tick_count} ticks "
          f"({session.clock:g} s), decision point {trigger}, "
          f"decision {session.decision}, min separation {separation}, "
          f"{len(session.trace)} trace records")
    if args.trace:
        print(f"trace written to {args.trace}")
    return 0


def _cmd_audit(args: argparse.Namespace) -> int:
    records = load_trace(args.trace)
    report = audit_trace(records)
    for line in report.lines():
        print(line)
    return 0 if report.ok else 1


def _cmd_serve(args: argparse.Namespace, cfg) -> int:
    import dataclasses

    import uvicorn

    from .server import create_app

    server = cfg.server
    if args.port is not None:
        server = dataclasses.replace(server, port=args.port)
    if args.scenario_dir is not None:
        server = dataclasses.replace(server, scenario_dir=args.scenario_dir)
    cfg = dataclasses.replace(cfg, server=server)
    app = create_app(cfg)
    uvicorn.run(app, host=args.host, port=cfg.server.port, log_level="info")
    return 0


if __name__ == "__main__":
    sys.exit(main())

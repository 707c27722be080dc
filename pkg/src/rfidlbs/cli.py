"""Operator entry point.

Subcommands:
    serve        host the location server
    simulate     run a scenario headless and write the event log
    interactive  run the simulator in real time with the control API / web UI
    registry     add / list / check registry TSV files

Exit codes: 0 success, 1 runtime or data error, 2 usage error.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import replace
from pathlib import Path

from .registry import (
    DuplicateTag,
    LocationService,
    ParseError,
    RegistryError,
    load_credentials,
    load_registry,
)
from .server import LocationServer
from .sim import ScenarioError, format_event_log, load_scenario, run
from .tags import MalformedId, format_tag_id, parse_tag_id


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="rfidlbs")
    sub = parser.add_subparsers(dest="command", required=True)

    serve = sub.add_parser("serve", help="host the location server")
    serve.add_argument("--port", type=int, default=8080)
    serve.add_argument("--host", default="127.0.0.1")
    serve.add_argument("--registry", required=True, metavar="PATH")
    serve.add_argument("--credentials", required=True, metavar="PATH")
    serve.add_argument("--assets", metavar="DIR")

    simulate = sub.add_parser("simulate", help="run a scenario headless")
    simulate.add_argument("scenario", metavar="SCENARIO.toml")
    simulate.add_argument("--seed", type=int, help="override the scenario seed")
    simulate.add_argument("--out", metavar="PATH", help="event log path (default stdout)")

    interactive = sub.add_parser("interactive", help="real-time simulation with web UI")
    interactive.add_argument("scenario", metavar="SCENARIO.toml")
    interactive.add_argument("--port", type=int, default=8080)
    interactive.add_argument("--host", default="127.0.0.1")
    interactive.add_argument("--speed", type=float, default=1.0,
                             help="time scale, sim-seconds per wall-second")
    interactive.add_argument("--ui", metavar="DIR", help="static web UI directory")

    registry = sub.add_parser("registry", help="manage registry TSV files")
    reg_sub = registry.add_subparsers(dest="registry_command", required=True)
    reg_add = reg_sub.add_parser("add", help="append a record")
    reg_add.add_argument("file")
    reg_add.add_argument("tag")
    reg_add.add_argument("name")
    reg_add.add_argument("description")
    reg_add.add_argument("--image", default="")
    reg_add.add_argument("--extra", action="append", default=[], metavar="TOPIC=TEXT")
    reg_list = reg_sub.add_parser("list", help="print records")
    reg_list.add_argument("file")
    reg_check = reg_sub.add_parser("check", help="validate a registry file")
    reg_check.add_argument("file")

    return parser


def cmd_serve(args: argparse.Namespace) -> int:
    try:
        registry = load_registry(args.registry)
        credentials = load_credentials(args.credentials)
    except (OSError, RegistryError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    service = LocationService(registry, credentials, assets_dir=args.assets)
    server = LocationServer(service, host=args.host, port=args.port)
    print(f"serving on {args.host}:{server.port}", file=sys.stderr)
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        pass
    return 0


def cmd_simulate(args: argparse.Namespace) -> int:
    try:
        scenario = load_scenario(args.scenario)
        if args.seed is not None:
            scenario = replace(scenario, seed=args.seed)
        log = run(scenario)
    except (OSError, ScenarioError, RegistryError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    text = format_event_log(log)
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return 0


def cmd_interactive(args: argparse.Namespace) -> int:
    from .interactive import InteractiveServer  # deferred: pulls in threading machinery

    try:
        scenario = load_scenario(args.scenario)
    except (OSError, ScenarioError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    ui_dir = Path(args.ui) if args.ui else _default_ui_dir()
    server = InteractiveServer(
        scenario, host=args.host, port=args.port, time_scale=args.speed, ui_dir=ui_dir
    )
    where = f"http://{args.host}:{server.port}/"
    print(f"interactive simulator on {where}" + ("" if ui_dir else " (no UI assets)"),
          file=sys.stderr)
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        server.stop()
    return 0


def _default_ui_dir() -> Path | None:
    candidate = Path(__file__).resolve().parents[2] / "frontend" / "dist"
    return candidate if candidate.is_dir() else None


def cmd_registry(args: argparse.Namespace) -> int:
    path = Path(args.file)
    if args.registry_command == "add":
        try:
            tag_id = parse_tag_id(args.tag)
        except MalformedId as exc:
            print(f"error: {exc}", file=sys.stderr)
            return 1
        existing = path.read_text(encoding="utf-8") if path.exists() else ""
        cols = [format_tag_id(tag_id), args.name, args.description, args.image]
        cols.extend(args.extra)
        line = "\t".join(cols).rstrip("\t") + "\n"
        try:
            from .registry import parse_registry

            parse_registry(existing + line)  # reject duplicates / bad extras up front
        except RegistryError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return 1
        path.write_text(existing + line, encoding="utf-8")
        return 0
    try:
        registry = load_registry(path)
    except (OSError, ParseError, DuplicateTag) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    if args.registry_command == "list":
        for tag_id in sorted(registry.records):
            record = registry.records[tag_id]
            print(f"{format_tag_id(tag_id)}\t{record.name}\t{record.description}")
    else:  # check
        print(f"ok: {len(registry.records)} records")
    return 0


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "serve":
        return cmd_serve(args)
    if args.command == "simulate":
        return cmd_simulate(args)
    if args.command == "interactive":
        return cmd_interactive(args)
    return cmd_registry(args)


if __name__ == "__main__":
    sys.exit(main())

"""Discrete-event building simulator.

A user carrying a reader moves through a 2-D floor plan populated with
fixed tags. Fixed-step integration (default dt = 0.01 s) drives the air
interface; every singulation is emitted as an encoded serial frame. run()
wires the full pipeline (air -> serial link -> middleware -> client -> an
in-process location service) and returns a deterministic, replayable event
log.

Scenario files are TOML:

    [sim]    seed, preset, dt, duration, speed, initial_slots (optional)
    [[tags]] id, x, y, class, power
    [[path]] x, y, speed
    [registry] file

Event log lines are "t<TAB>EVENT<TAB>payload" with t formatted to
microseconds; events are FRAME (hex bytes), CHANGED (tag id), LOST ("-")
and LOCATED (location name). Identical scenario + seed gives a
byte-identical log.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Optional, Union

try:
    import tomllib
except ModuleNotFoundError:  # Python 3.10
    import tomli as tomllib

from . import client as cl
from . import middleware as mw
from .air import PRESETS, FieldView, InventoryEngine, SlotCountPolicy, powered_tags
from .framing import StreamScanner, encode_frame
from .registry import (
    AuthFailed,
    LocationService,
    NotFound,
    Registry,
    Unauthorized,
    load_registry,
    make_credentials,
    resolve,
)
from .tags import MalformedId, Tag, TagClass, TagPower, format_tag_id, make_tag, parse_tag_id

SIM_USER = "guest"
SIM_PASSWORD = "guest"


class ScenarioError(Exception):
    pass


class ParseError(ScenarioError):
    pass


class InvalidScenario(ScenarioError):
    pass


@dataclass(frozen=True)
class TagPlacement:
    tag_id: int
    x: float
    y: float
    tag_class: TagClass = TagClass.CLASS0
    power: TagPower = TagPower.PASSIVE


@dataclass(frozen=True)
class Waypoint:
    x: float
    y: float
    speed: float = 1.0  # m/s used to reach this waypoint


@dataclass(frozen=True)
class Scenario:
    seed: int
    preset: str
    duration: float
    tags: tuple[TagPlacement, ...]
    path: tuple[Waypoint, ...]
    dt: float = 0.01
    speed: float = 1.0              # walk speed for interactive GoTo steering
    initial_slots: int = 16
    registry_file: Optional[Path] = None


def _validate(scenario: Scenario) -> Scenario:
    if scenario.dt <= 0:
        raise InvalidScenario("dt must be > 0")
    if scenario.duration <= 0:
        raise InvalidScenario("duration must be > 0")
    if scenario.preset not in PRESETS:
        raise InvalidScenario(f"unknown preset {scenario.preset!r}")
    if scenario.initial_slots < 1:
        raise InvalidScenario("initial_slots must be >= 1")
    if not scenario.path:
        raise InvalidScenario("path needs at least one waypoint")
    seen: set[int] = set()
    for placement in scenario.tags:
        if placement.tag_id in seen:
            raise InvalidScenario(f"duplicate tag id {format_tag_id(placement.tag_id)}")
        seen.add(placement.tag_id)
        if not (math.isfinite(placement.x) and math.isfinite(placement.y)):
            raise InvalidScenario("tag positions must be finite")
    for wp in scenario.path:
        if wp.speed < 0:
            raise InvalidScenario("waypoint speeds must be >= 0")
    return scenario


def load_scenario(path: str | Path) -> Scenario:
    path = Path(path)
    try:
        data = tomllib.loads(path.read_text(encoding="utf-8"))
    except (OSError, tomllib.TOMLDecodeError) as exc:
        raise ParseError(str(exc)) from None
    try:
        sim = data.get("sim", {})
        tags = []
        for entry in data.get("tags", []):
            tags.append(
                TagPlacement(
                    tag_id=parse_tag_id(entry["id"]),
                    x=float(entry["x"]),
                    y=float(entry["y"]),
                    tag_class=TagClass(int(entry.get("class", 0))),
                    power=TagPower(entry.get("power", "passive")),
                )
            )
        path_points = [
            Waypoint(float(p["x"]), float(p["y"]), float(p.get("speed", sim.get("speed", 1.0))))
            for p in data.get("path", [])
        ]
        registry_file = None
        if "registry" in data and "file" in data["registry"]:
            registry_file = (path.parent / data["registry"]["file"]).resolve()
        scenario = Scenario(
            seed=int(sim.get("seed", 0)),
            preset=str(sim.get("preset", "HF1356")),
            duration=float(sim["duration"]),
            dt=float(sim.get("dt", 0.01)),
            speed=float(sim.get("speed", 1.0)),
            initial_slots=int(sim.get("initial_slots", 16)),
            tags=tuple(tags),
            path=tuple(path_points),
            registry_file=registry_file,
        )
    except (KeyError, ValueError, MalformedId, TypeError) as exc:
        raise ParseError(f"bad scenario field: {exc}") from None
    return _validate(scenario)


# -- steering commands ----------------------------------------------------

@dataclass(frozen=True)
class SetVelocity:
    vx: float
    vy: float


@dataclass(frozen=True)
class GoTo:
    x: float
    y: float


@dataclass(frozen=True)
class Stop:
    pass


SteerCommand = Union[SetVelocity, GoTo, Stop]


@dataclass
class World:
    scenario: Scenario
    step_count: int = 0
    position: tuple[float, float] = (0.0, 0.0)
    waypoint_index: int = 1           # next path waypoint to reach
    override: Optional[SteerCommand] = None
    pending: list[SteerCommand] = field(default_factory=list)
    tags: dict[int, Tag] = field(default_factory=dict)
    engine: InventoryEngine = None  # type: ignore[assignment]

    @property
    def clock(self) -> float:
        return self.step_count * self.scenario.dt


def make_world(scenario: Scenario) -> World:
    _validate(scenario)
    preset = PRESETS[scenario.preset]
    rng = random.Random(scenario.seed)
    engine = InventoryEngine(preset, rng, SlotCountPolicy(slots=scenario.initial_slots))
    tags = {
        p.tag_id: make_tag(p.tag_id, p.tag_class, p.power) for p in scenario.tags
    }
    start = scenario.path[0]
    return World(
        scenario=scenario,
        position=(start.x, start.y),
        tags=tags,
        engine=engine,
    )


def steer(world: World, command: SteerCommand) -> World:
    """Queue a steering command; it takes effect at the next tick boundary."""
    world.pending.append(command)
    return world


def _move(world: World, dt: float) -> None:
    # apply queued steering at the tick boundary; Stop holds in place rather
    # than resuming the waypoint path
    for command in world.pending:
        world.override = SetVelocity(0.0, 0.0) if isinstance(command, Stop) else command
    world.pending.clear()

    x, y = world.position
    if isinstance(world.override, SetVelocity):
        world.position = (x + world.override.vx * dt, y + world.override.vy * dt)
        return
    if isinstance(world.override, GoTo):
        tx, ty = world.override.x, world.override.y
        speed = world.scenario.speed
        dist = math.hypot(tx - x, ty - y)
        step = speed * dt
        if dist <= step or dist == 0.0:
            world.position = (tx, ty)
            world.override = SetVelocity(0.0, 0.0)  # arrived: hold
        else:
            world.position = (x + (tx - x) / dist * step, y + (ty - y) / dist * step)
        return

    path = world.scenario.path
    time_left = dt
    while world.waypoint_index < len(path) and time_left > 0:
        target = path[world.waypoint_index]
        dist = math.hypot(target.x - x, target.y - y)
        budget = target.speed * time_left
        if dist <= budget:
            x, y = target.x, target.y
            time_left -= dist / target.speed if target.speed > 0 else time_left
            world.waypoint_index += 1
            continue
        if budget > 0 and dist > 0:
            x += (target.x - x) / dist * budget
            y += (target.y - y) / dist * budget
        break
    world.position = (x, y)


def advance(world: World, scenario: Scenario) -> list[tuple[float, bytes]]:
    """One fixed step: move the user, recompute the powered set, run the
    inventory slots falling inside [clock, clock + dt), emit frames."""
    dt = scenario.dt
    _move(world, dt)
    preset = world.engine.preset
    view = FieldView(world.position, {p.tag_id: (p.x, p.y) for p in scenario.tags}, preset)
    powered = powered_tags(view, world.tags.values())
    world.engine.notice_field_change(powered)
    world.step_count += 1
    t_end = world.step_count * dt
    reads = world.engine.poll(t_end, powered)
    return [(t, encode_frame(tag_id)) for t, tag_id in reads]


def simulate_frames(scenario: Scenario):
    """Generator over all frames of a headless run: yields (t, bytes)."""
    world = make_world(scenario)
    steps = round(scenario.duration / scenario.dt)
    for _ in range(steps):
        yield from advance(world, scenario)


# -- full pipeline --------------------------------------------------------

EVENT_FRAME = "FRAME"
EVENT_CHANGED = "CHANGED"
EVENT_LOST = "LOST"
EVENT_LOCATED = "LOCATED"


@dataclass(frozen=True)
class LogEntry:
    t: float
    kind: str
    payload: str


EventLog = list[LogEntry]


def format_event_log(log: EventLog) -> str:
    return "".join(f"{e.t:.6f}\t{e.kind}\t{e.payload}\n" for e in log)


def _serve_request(
    service: LocationService, registry: Registry, request: cl.ClientRequest
) -> cl.ClientInput:
    """In-process request dispatch with immediate response (delta ~ 0)."""
    if isinstance(request, cl.LoginRequest):
        try:
            token = service.login(request.username, request.password)
            return cl.LoginResponse(200, token)
        except AuthFailed:
            return cl.LoginResponse(401)
    if isinstance(request, cl.LocateRequest):
        try:
            service.locate(request.token, format_tag_id(request.tag))
            return cl.LocateResponse(200, request.tag, resolve(registry, request.tag))
        except Unauthorized:
            return cl.LocateResponse(401, request.tag)
        except NotFound:
            return cl.LocateResponse(404, request.tag)
    raise TypeError(f"unknown request {request!r}")


def run(scenario: Scenario) -> EventLog:
    """Run the whole pipeline headless and return the merged event log."""
    _validate(scenario)
    registry = (
        load_registry(scenario.registry_file)
        if scenario.registry_file is not None
        else Registry(records={})
    )
    service = LocationService(registry, make_credentials({SIM_USER: SIM_PASSWORD}))

    world = make_world(scenario)
    scanner = StreamScanner()
    mid = mw.MiddlewareState()
    state = cl.ClientState()
    log: EventLog = []

    def pump(inputs: list[cl.ClientInput]) -> None:
        nonlocal state
        while inputs:
            before = state.phase
            state, requests = cl.step(state, inputs.pop(0))
            if state.phase is cl.Phase.LOCATED and before is not cl.Phase.LOCATED:
                assert state.record is not None
                log.append(LogEntry(world.clock, EVENT_LOCATED, state.record.name))
            inputs.extend(_serve_request(service, registry, r) for r in requests)

    state, requests = cl.begin_login(state, SIM_USER, SIM_PASSWORD, "in-process")
    pump([_serve_request(service, registry, r) for r in requests])

    steps = round(scenario.duration / scenario.dt)
    for _ in range(steps):
        for t, frame_bytes in advance(world, scenario):
            log.append(LogEntry(t, EVENT_FRAME, frame_bytes.hex().upper()))
            for report in scanner.feed(frame_bytes, t):
                mid, event = mw.ingest(mid, report, t)
                if event is not None:
                    log.append(LogEntry(t, EVENT_CHANGED, format_tag_id(report.tag_id)))
        now = world.clock
        mid, lost = mw.poll_lost(mid, now)
        if lost is not None:
            log.append(LogEntry(now, EVENT_LOST, "-"))
            pump([cl.MiddlewareLost(now)])
        state, requests = cl.step(state, cl.Tick(now, mw.current_tag(mid)))
        pump([_serve_request(service, registry, r) for r in requests])
    return log

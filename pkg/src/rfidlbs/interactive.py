"""Interactive mode: real-time simulation loop plus the control HTTP API.

Hosts on one port:
  - the location-service endpoints (/login, /locate, /info, /image, /healthz)
  - the simulator control API:
        GET  /sim/state   -> {"t","user":{"x","y"},"tags":[...],"client_phase","location"}
        POST /sim/steer   body {"cmd":"goto"|"vel"|"stop", ...}
        POST /sim/reset
        GET  /sim/events  -> server-sent events, state pushed at 10 Hz
  - optional static UI assets under /

The simulation advances in wall-clock time (1 sim-second per wall-second,
scaled by the speed factor) on a background thread; steering commands are
queued and applied at tick boundaries.
"""

from __future__ import annotations

import json
import mimetypes
import threading
import time
from http.server import ThreadingHTTPServer
from pathlib import Path
from typing import Optional

from . import client as cl
from . import middleware as mw
from .framing import decode_frame
from .registry import (
    LocationService,
    Registry,
    load_registry,
    make_credentials,
    record_to_json,
)
from .server import ServiceHandler
from .sim import (
    SIM_PASSWORD,
    SIM_USER,
    GoTo,
    Scenario,
    SetVelocity,
    Stop,
    World,
    _serve_request,
    advance,
    make_world,
    steer,
)
from .tags import format_tag_id

SSE_PERIOD = 0.1  # state push interval, seconds


class InteractiveSim:
    """Owns the world, middleware, client, and in-process service; advances
    the simulation in (scaled) real time on a background thread."""

    def __init__(self, scenario: Scenario, time_scale: float = 1.0):
        self.scenario = scenario
        self.time_scale = time_scale
        self.registry = (
            load_registry(scenario.registry_file)
            if scenario.registry_file is not None
            else Registry(records={})
        )
        self.service = LocationService(self.registry, make_credentials({SIM_USER: SIM_PASSWORD}))
        self._lock = threading.Lock()
        self._stop = threading.Event()
        self._thread: Optional[threading.Thread] = None
        self._reset_locked()

    def _reset_locked(self) -> None:
        self.world: World = make_world(self.scenario)
        self.mid = mw.MiddlewareState()
        self.client = cl.ClientState()
        state, requests = cl.begin_login(self.client, SIM_USER, SIM_PASSWORD, "in-process")
        self.client = state
        self._pump([_serve_request(self.service, self.registry, r) for r in requests])

    def _pump(self, inputs: list[cl.ClientInput]) -> None:
        while inputs:
            self.client, requests = cl.step(self.client, inputs.pop(0))
            inputs.extend(_serve_request(self.service, self.registry, r) for r in requests)

    def _tick(self) -> None:
        with self._lock:
            for t, frame_bytes in advance(self.world, self.scenario):
                self.mid, _ = mw.ingest(self.mid, decode_frame(frame_bytes, t), t)
            now = self.world.clock
            self.mid, lost = mw.poll_lost(self.mid, now)
            if lost is not None:
                self._pump([cl.MiddlewareLost(now)])
            self.client, requests = cl.step(self.client, cl.Tick(now, mw.current_tag(self.mid)))
            self._pump([_serve_request(self.service, self.registry, r) for r in requests])

    def run_loop(self) -> None:
        step_wall = self.scenario.dt / self.time_scale
        next_at = time.monotonic()
        while not self._stop.is_set():
            self._tick()
            next_at += step_wall
            delay = next_at - time.monotonic()
            if delay > 0:
                self._stop.wait(delay)
            else:
                next_at = time.monotonic()  # fell behind; don't spiral

    def start(self) -> None:
        self._thread = threading.Thread(target=self.run_loop, daemon=True)
        self._thread.start()

    def stop(self) -> None:
        self._stop.set()
        if self._thread is not None:
            self._thread.join()

    # -- control API ------------------------------------------------------

    def state_json(self) -> dict:
        with self._lock:
            record = self.client.record
            return {
                "t": round(self.world.clock, 6),
                "user": {"x": self.world.position[0], "y": self.world.position[1]},
                "tags": [
                    {"id": format_tag_id(p.tag_id), "x": p.x, "y": p.y}
                    for p in self.scenario.tags
                ],
                "client_phase": self.client.phase.value,
                "location": record_to_json(record) if record is not None else None,
            }

    def apply_steer(self, payload: dict) -> None:
        cmd = payload.get("cmd")
        if cmd == "vel":
            command = SetVelocity(float(payload["vx"]), float(payload["vy"]))
        elif cmd == "goto":
            command = GoTo(float(payload["x"]), float(payload["y"]))
        elif cmd == "stop":
            command = Stop()
        else:
            raise ValueError(f"unknown steer command {cmd!r}")
        with self._lock:
            steer(self.world, command)

    def reset(self) -> None:
        with self._lock:
            self._reset_locked()


class InteractiveHandler(ServiceHandler):
    sim: InteractiveSim
    ui_dir: Optional[Path] = None

    def do_GET(self):
        if self.path == "/sim/state":
            self._send_json(200, self.sim.state_json())
        elif self.path == "/sim/events":
            self._serve_events()
        elif self.path in ("/sim/steer", "/sim/reset"):
            self._error(405, "use POST")
        elif self._maybe_static():
            pass
        else:
            super().do_GET()

    def do_POST(self):
        if self.path == "/sim/steer":
            try:
                self.sim.apply_steer(json.loads(self._read_body() or b"{}"))
            except (ValueError, KeyError, json.JSONDecodeError):
                self._error(400, "bad steer command")
                return
            self._send_json(200, {"ok": True})
        elif self.path == "/sim/reset":
            self.sim.reset()
            self._send_json(200, {"ok": True})
        else:
            super().do_POST()

    def _serve_events(self) -> None:
        self.send_response(200)
        self.send_header("Content-Type", "text/event-stream")
        self.send_header("Cache-Control", "no-cache")
        self.end_headers()
        try:
            while True:
                payload = json.dumps(self.sim.state_json())
                self.wfile.write(f"data: {payload}\n\n".encode("utf-8"))
                self.wfile.flush()
                time.sleep(SSE_PERIOD)
        except (BrokenPipeError, ConnectionResetError):
            pass

    def _maybe_static(self) -> bool:
        if self.ui_dir is None:
            return False
        rel = self.path.split("?", 1)[0].lstrip("/") or "index.html"
        root = self.ui_dir.resolve()
        target = (root / rel).resolve()
        if root not in target.parents and target != root:
            return False
        if not target.is_file():
            return False
        content_type = mimetypes.guess_type(target.name)[0] or "application/octet-stream"
        self._send_bytes(200, target.read_bytes(), content_type)
        return True


def make_interactive_handler(sim: InteractiveSim, ui_dir: Optional[Path]) -> type:
    return type(
        "BoundInteractiveHandler",
        (InteractiveHandler,),
        {"sim": sim, "service": sim.service, "ui_dir": ui_dir},
    )


class InteractiveServer:
    def __init__(
        self,
        scenario: Scenario,
        host: str = "127.0.0.1",
        port: int = 8080,
        time_scale: float = 1.0,
        ui_dir: Optional[Path] = None,
    ):
        self.sim = InteractiveSim(scenario, time_scale)
        self.httpd = ThreadingHTTPServer((host, port), make_interactive_handler(self.sim, ui_dir))
        self._thread: Optional[threading.Thread] = None

    @property
    def port(self) -> int:
        return self.httpd.server_address[1]

    def start(self) -> None:
        self.sim.start()
        self._thread = threading.Thread(target=self.httpd.serve_forever, daemon=True)
        self._thread.start()

    def stop(self) -> None:
        self.httpd.shutdown()
        self.httpd.server_close()
        self.sim.stop()
        if self._thread is not None:
            self._thread.join()

    def serve_forever(self) -> None:
        self.sim.start()
        try:
            self.httpd.serve_forever()
        finally:
            self.sim.stop()

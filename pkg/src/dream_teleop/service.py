"""Live session host: real-time world stepping over a WebSocket wire protocol.

One JSON message per WebSocket frame, schema version tagged. Client input
messages land in last-writer-wins slots consumed at the next 100 Hz tick;
world snapshots are decimated to the broadcast rate (default 30 Hz) and
never contain the follower's instantaneous pose: operators see the phantom,
exactly as the link allows.
"""

from __future__ import annotations

import asyncio
import datetime
import json
import logging
import math
from dataclasses import dataclass
from pathlib import Path

from aiohttp import WSMsgType, web

from . import __version__
from .config import TICK_DT, ScenarioConfig
from .geometry import Pose
from .logstore import FlightLog, LogHeader, LogWriter, read_log
from .metaphor import speed_feedback
from .world import StickInput, World

log = logging.getLogger(__name__)

PROTOCOL_VERSION = 1
DEFAULT_BROADCAST_HZ = 30.0
INPUT_TYPES = ("hand", "sticks", "control")
CONTROL_ACTIONS = ("start", "stop", "reset", "mode")


def _pose_wire(p: Pose) -> dict:
    return {"x": p.x, "y": p.y, "z": p.z, "yaw": p.yaw}


def _parse_pose(d: object) -> Pose:
    if not isinstance(d, dict):
        raise ValueError(f"pose must be an object, got {d!r}")
    vals = []
    for key in ("x", "y", "z", "yaw"):
        v = d.get(key)
        if isinstance(v, bool) or not isinstance(v, (int, float)) or not math.isfinite(v):
            raise ValueError(f"pose.{key} must be a finite number, got {v!r}")
        vals.append(float(v))
    return Pose(*vals)


@dataclass
class SessionOptions:
    record_dir: Path | None = None
    broadcast_hz: float = DEFAULT_BROADCAST_HZ
    read_only: bool = False


class Session:
    """Synchronous session core: one world, input slots, recording, snapshots."""

    def __init__(self, session_id: str, config: ScenarioConfig, options: SessionOptions | None = None):
        self.id = session_id
        self.config = config
        self.options = options or SessionOptions()
        self.world = World(config)
        self.running = True
        self.read_only = self.options.read_only
        self._hand: tuple[Pose, bool] | None = None
        self._sticks: StickInput | None = None
        self._last_seq = {t: -1 for t in INPUT_TYPES}
        self._server_seq = 0
        self._recording_index = 0
        self._writer: LogWriter | None = None
        self._record_path: Path | None = None
        self._broadcast_acc = 0.0
        self._open_recorder()

    # -- recording ----------------------------------------------------------

    @property
    def recording(self) -> bool:
        return self._writer is not None

    @property
    def record_path(self) -> Path | None:
        return self._record_path

    def _open_recorder(self) -> None:
        if self.options.record_dir is None or self.read_only:
            return
        self.options.record_dir.mkdir(parents=True, exist_ok=True)
        self._recording_index += 1
        path = self.options.record_dir / f"session-{self.id}-{self._recording_index}.dreamlog"
        header = LogHeader(
            manifest={
                "config": self.config.to_dict(),
                "seed": self.config.seed,
                "version": __version__,
                "session": self.id,
            },
            geometry=self.config.geometry.to_dict(),
            start_walltime=datetime.datetime.now(datetime.timezone.utc).isoformat(),
        )
        self._writer = LogWriter(path, header)
        self._writer.add_sample(self.world.initial_sample())
        self._writer.flush()
        self._record_path = path

    def close(self) -> None:
        if self._writer is not None:
            self._writer.close()
            self._writer = None

    # -- message handling ---------------------------------------------------

    def _error(self, error: str, detail: str) -> dict:
        return {"v": PROTOCOL_VERSION, "type": "error", "sid": self.id, "error": error, "detail": detail}

    def _event(self, event: str, payload: dict, t: float | None = None) -> dict:
        return {
            "v": PROTOCOL_VERSION,
            "type": "event",
            "sid": self.id,
            "t": self.world.time if t is None else t,
            "event": event,
            "payload": payload,
        }

    def handle_message(self, msg: object) -> list[dict]:
        """Apply one client message; returns reply messages for that client."""
        if not isinstance(msg, dict):
            return [self._error("malformed", "message must be a JSON object")]
        if msg.get("v") != PROTOCOL_VERSION:
            return [self._error("version_mismatch", f"expected protocol v{PROTOCOL_VERSION}, got {msg.get('v')!r}")]
        if msg.get("sid") != self.id:
            return [self._error("bad_session", f"unknown session id {msg.get('sid')!r}")]
        kind = msg.get("type")
        if kind not in INPUT_TYPES:
            return [self._error("unknown_type", f"unknown message type {kind!r}")]

        seq = msg.get("seq")
        if not isinstance(seq, int) or isinstance(seq, bool) or seq < 0:
            return [self._error("malformed", f"seq must be a non-negative integer, got {seq!r}")]
        if seq <= self._last_seq[kind]:
            return [self._event("stale_input", {"type": kind, "seq": seq, "newest": self._last_seq[kind]})]
        self._last_seq[kind] = seq

        if kind == "control":
            return self._handle_control(msg)
        if self.read_only:
            return [self._error("read_only", "replay sessions do not accept input")]

        if kind == "hand":
            try:
                pose = _parse_pose(msg.get("pose"))
            except ValueError as exc:
                return [self._error("malformed", str(exc))]
            take = msg.get("take")
            if not isinstance(take, bool):
                return [self._error("malformed", f"take must be a boolean, got {take!r}")]
            self._hand = (pose, take)
            return []

        # sticks
        replies = []
        vals = []
        for key in ("lx", "ly", "ryaw"):
            v = msg.get(key)
            if isinstance(v, bool) or not isinstance(v, (int, float)) or not math.isfinite(v):
                return [self._error("malformed", f"{key} must be a finite number, got {v!r}")]
            vals.append(float(v))
        if any(abs(v) > 1.0 for v in vals):
            replies.append(self._event("input_clamped", {"lx": vals[0], "ly": vals[1], "ryaw": vals[2]}))
            vals = [min(max(v, -1.0), 1.0) for v in vals]
        self._sticks = StickInput(*vals)
        return replies

    def _handle_control(self, msg: dict) -> list[dict]:
        action = msg.get("action")
        if action not in CONTROL_ACTIONS:
            return [self._error("unknown_control", f"unknown control action {action!r}")]
        if action == "start":
            self.running = True
            return [self._event("started", {})]
        if action == "stop":
            self.running = False
            return [self._event("stopped", {})]
        if action == "mode":
            if self.read_only:
                return [self._error("read_only", "replay sessions do not accept input")]
            mode = msg.get("mode")
            if mode not in ("dream", "joystick"):
                return [self._error("malformed", f"mode must be dream or joystick, got {mode!r}")]
            from dataclasses import replace

            self.config = replace(self.config, mode=mode)
            self._reset_world()
            return [self._event("mode_changed", {"mode": mode})]
        # reset
        self._reset_world()
        return [self._event("reset", {})]

    def _reset_world(self) -> None:
        self.close()
        self.world = World(self.config)
        self._hand = None
        self._sticks = None
        self._broadcast_acc = 0.0
        self._open_recorder()

    # -- stepping and snapshots ----------------------------------------------

    def tick(self) -> list[dict]:
        """Advance one fixed step; returns event messages to broadcast."""
        if not self.running:
            return []
        if self.config.mode == "dream":
            hand, take = self._hand if self._hand is not None else (None, False)
            sample, events = self.world.step(hand=hand, take_pressed=take)
        else:
            sample, events = self.world.step(sticks=self._sticks or StickInput())
        if self._writer is not None:
            self._writer.add_sample(sample)
            for e in events:
                self._writer.add_event(e)
        return [self._event(e.event, e.payload, t=e.t) for e in events]

    def snapshot_due(self) -> bool:
        self._broadcast_acc += TICK_DT
        if self._broadcast_acc + 1e-12 >= 1.0 / self.options.broadcast_hz:
            self._broadcast_acc -= 1.0 / self.options.broadcast_hz
            return True
        return False

    def snapshot(self) -> dict:
        """The operator-facing world state. Never the follower's live pose."""
        w = self.world
        self._server_seq += 1
        return {
            "v": PROTOCOL_VERSION,
            "type": "snapshot",
            "sid": self.id,
            "seq": self._server_seq,
            "tick": w.tick,
            "t": w.time,
            "mode": self.config.mode,
            "vuav": _pose_wire(w.interaction.vuav),
            "phantom": _pose_wire(w.phantom.pose),
            "staleness_s": w.phantom.staleness,
            "visual": w.visual(),
            "speed": speed_feedback(w.uav.speed, self.config.limits.max_horizontal_speed),
            "recording": self.recording,
            "read_only": self.read_only,
        }

    def hello(self) -> dict:
        return {
            "v": PROTOCOL_VERSION,
            "type": "hello",
            "sid": self.id,
            "mode": self.config.mode,
            "read_only": self.read_only,
            "tick_rate_hz": round(1.0 / TICK_DT),
            "broadcast_hz": self.options.broadcast_hz,
            "version": __version__,
        }


class ReplaySession:
    """Read-only session replaying a recorded log over the same protocol."""

    def __init__(self, session_id: str, flight_log: FlightLog, speed: float = 1.0):
        if speed <= 0 or not math.isfinite(speed):
            raise ValueError(f"replay speed must be > 0, got {speed!r}")
        self.id = session_id
        self.log = flight_log
        self.speed = speed
        self._server_seq = 0

    def hello(self) -> dict:
        return {
            "v": PROTOCOL_VERSION,
            "type": "hello",
            "sid": self.id,
            "mode": self.log.header.manifest.get("config", {}).get("mode", "dream"),
            "read_only": True,
            "tick_rate_hz": round(1.0 / TICK_DT),
            "broadcast_hz": DEFAULT_BROADCAST_HZ,
            "version": __version__,
        }

    def handle_message(self, msg: object) -> list[dict]:
        if not isinstance(msg, dict):
            return [self._error("malformed", "message must be a JSON object")]
        if msg.get("v") != PROTOCOL_VERSION:
            return [self._error("version_mismatch", f"expected protocol v{PROTOCOL_VERSION}, got {msg.get('v')!r}")]
        return [self._error("read_only", "replay sessions do not accept input")]

    def _error(self, error: str, detail: str) -> dict:
        return {"v": PROTOCOL_VERSION, "type": "error", "sid": self.id, "error": error, "detail": detail}

    def snapshots(self):
        """(time-offset-within-log, snapshot) pairs in playback order."""
        taken = False
        events = sorted(self.log.events, key=lambda e: e.t)
        ei = 0
        t_first = self.log.samples[0].t if self.log.samples else 0.0
        for k, s in enumerate(self.log.samples):
            while ei < len(events) and events[ei].t <= s.t:
                if events[ei].event == "grab":
                    taken = True
                elif events[ei].event == "release":
                    taken = False
                ei += 1
            self._server_seq += 1
            pose = {"x": s.x, "y": s.y, "z": s.z, "yaw": s.yaw}
            speed = math.sqrt(s.vx**2 + s.vy**2 + s.vz**2)
            snap = {
                "v": PROTOCOL_VERSION,
                "type": "snapshot",
                "sid": self.id,
                "seq": self._server_seq,
                "tick": k,
                "t": s.t,
                "mode": self.hello()["mode"],
                "vuav": pose,
                "phantom": dict(pose),
                "staleness_s": 0.0,
                "visual": "is_taken" if taken else "cannot_be_taken",
                "speed": min(speed, 1.0),
                "recording": False,
                "read_only": True,
            }
            yield s.t - t_first, snap


# ---------------------------------------------------------------------------
# Async host.


class SessionHost:
    """Owns one session's stepping loop and its connected sockets."""

    def __init__(self, session: Session, pacing: bool = True):
        self.session = session
        self.pacing = pacing
        self.clients: set[web.WebSocketResponse] = set()
        self._stop = asyncio.Event()

    def stop(self) -> None:
        self._stop.set()

    async def broadcast(self, msg: dict) -> None:
        text = json.dumps(msg)
        dead = []
        for ws in self.clients:
            try:
                await ws.send_str(text)
            except (ConnectionError, RuntimeError):
                dead.append(ws)
        for ws in dead:
            self.clients.discard(ws)

    async def run(self) -> None:
        loop = asyncio.get_running_loop()
        t0 = loop.time()
        ticked = 0
        try:
            while not self._stop.is_set():
                event_msgs = self.session.tick()
                ticked += 1
                for m in event_msgs:
                    await self.broadcast(m)
                if self.session.snapshot_due():
                    await self.broadcast(self.session.snapshot())
                if self.pacing:
                    target = t0 + ticked * TICK_DT
                    delay = target - loop.time()
                    if delay > 0:
                        await asyncio.sleep(delay)
                elif ticked % 20 == 0:
                    await asyncio.sleep(0)  # let the socket handlers breathe
        finally:
            self.session.close()


HOST_KEY: web.AppKey["SessionHost"] = web.AppKey("host")
REPLAY_KEY: web.AppKey["ReplaySession"] = web.AppKey("replay")
LOOP_TASK_KEY: web.AppKey["asyncio.Task"] = web.AppKey("loop_task")


async def _ws_handler(request: web.Request) -> web.WebSocketResponse:
    host = request.app[HOST_KEY]
    ws = web.WebSocketResponse(heartbeat=30.0)
    await ws.prepare(request)
    host.clients.add(ws)
    await ws.send_str(json.dumps(host.session.hello()))
    try:
        async for msg in ws:
            if msg.type != WSMsgType.TEXT:
                continue
            try:
                data = json.loads(msg.data)
            except json.JSONDecodeError:
                await ws.send_str(json.dumps(host.session._error("malformed", "invalid JSON")))
                continue
            for reply in host.session.handle_message(data):
                await ws.send_str(json.dumps(reply))
    finally:
        host.clients.discard(ws)
    return ws


async def _replay_client(request: web.Request) -> web.WebSocketResponse:
    replay = request.app[REPLAY_KEY]
    ws = web.WebSocketResponse()
    await ws.prepare(request)
    await ws.send_str(json.dumps(replay.hello()))

    async def pump_input():
        async for msg in ws:
            if msg.type != WSMsgType.TEXT:
                continue
            try:
                data = json.loads(msg.data)
            except json.JSONDecodeError:
                data = None
            for reply in replay.handle_message(data):
                await ws.send_str(json.dumps(reply))

    pump = asyncio.create_task(pump_input())
    loop = asyncio.get_running_loop()
    start = loop.time()
    try:
        for t_rel, snap in replay.snapshots():
            # Absolute scheduling: late sends simply catch up, so per-sleep
            # overhead cannot accumulate into playback drift.
            target = start + t_rel / replay.speed
            delay = target - loop.time()
            if delay > 0.002:
                await asyncio.sleep(delay)
            if ws.closed:
                break
            await ws.send_str(json.dumps(snap))
    finally:
        pump.cancel()
        if not ws.closed:
            await ws.close()
    return ws


def build_app(host: SessionHost, ui_dir: Path | None = None) -> web.Application:
    app = web.Application()
    app[HOST_KEY] = host
    app.router.add_get("/ws", _ws_handler)
    _add_ui_routes(app, ui_dir)

    async def start_loop(app):
        app[LOOP_TASK_KEY] = asyncio.create_task(host.run())

    async def stop_loop(app):
        host.stop()
        task = app.get(LOOP_TASK_KEY)
        if task is not None:
            await task

    app.on_startup.append(start_loop)
    app.on_cleanup.append(stop_loop)
    return app


def build_replay_app(replay: ReplaySession, ui_dir: Path | None = None) -> web.Application:
    app = web.Application()
    app[REPLAY_KEY] = replay
    app.router.add_get("/ws", _replay_client)
    _add_ui_routes(app, ui_dir)
    return app


def _add_ui_routes(app: web.Application, ui_dir: Path | None) -> None:
    if ui_dir is None or not ui_dir.is_dir():
        return
    if (ui_dir / "index.html").is_file():
        async def serve_index(request):
            # Keep the bundle's relative imports rooted under /ui/.
            raise web.HTTPFound("/ui/index.html")

        app.router.add_get("/", serve_index)
    app.router.add_static("/ui", ui_dir)


def serve_forever(
    config: ScenarioConfig,
    port: int,
    record_dir: Path | None,
    ui_dir: Path | None = None,
    pacing: bool = True,
    session_id: str = "default",
) -> None:
    """Run the live service until interrupted. Raises OSError if the port is busy."""
    session = Session(session_id, config, SessionOptions(record_dir=record_dir))
    host = SessionHost(session, pacing=pacing)
    app = build_app(host, ui_dir=ui_dir)
    log.info("serving session %s on port %d (mode=%s)", session_id, port, config.mode)
    web.run_app(app, port=port, print=None, handle_signals=True)


def replay_forever(log_path: Path, port: int, speed: float, ui_dir: Path | None = None) -> None:
    """Serve a recorded log as a read-only session."""
    flight_log = read_log(log_path)
    replay = ReplaySession("replay", flight_log, speed=speed)
    app = build_replay_app(replay, ui_dir=ui_dir)
    web.run_app(app, port=port, print=None, handle_signals=True)

"""Flight-log persistence: the ``.dreamlog`` JSON-lines format.

Line 1 is a JSON header (schema version, scenario manifest, task geometry,
wall-clock start). Every further line is a row object: ``sample`` rows carry
the vehicle state, ``event`` rows carry grab/release/button interactions,
interleaved by timestamp. Floats are serialized in shortest round-trip form,
so write -> read -> write is byte-stable.
"""

from __future__ import annotations

import io
import json
import math
import os
from dataclasses import dataclass, field
from typing import IO

from .errors import LogFormatError, SchemaVersionError

SCHEMA_VERSION = "dreamlog/1"
EVENT_KINDS = ("grab", "release", "button")


@dataclass(frozen=True)
class LogSample:
    t: float
    x: float
    y: float
    z: float
    yaw: float
    vx: float
    vy: float
    vz: float
    yaw_rate: float
    thrust: tuple[float, float, float, float]

    @property
    def speed(self) -> float:
        return math.sqrt(self.vx * self.vx + self.vy * self.vy + self.vz * self.vz)

    @property
    def horizontal_speed(self) -> float:
        return math.hypot(self.vx, self.vy)


@dataclass(frozen=True)
class LogEvent:
    t: float
    event: str
    payload: dict = field(default_factory=dict)


@dataclass(frozen=True)
class LogHeader:
    manifest: dict = field(default_factory=dict)
    geometry: dict | None = None
    start_walltime: str | None = None
    schema_version: str = SCHEMA_VERSION


@dataclass
class FlightLog:
    header: LogHeader
    samples: list[LogSample] = field(default_factory=list)
    events: list[LogEvent] = field(default_factory=list)


def _dump(obj: dict) -> str:
    return json.dumps(obj, separators=(",", ":"), allow_nan=False)


def _sample_row(s: LogSample) -> dict:
    return {
        "type": "sample",
        "t": s.t,
        "x": s.x,
        "y": s.y,
        "z": s.z,
        "yaw": s.yaw,
        "vx": s.vx,
        "vy": s.vy,
        "vz": s.vz,
        "yaw_rate": s.yaw_rate,
        "thrust": list(s.thrust),
    }


def _event_row(e: LogEvent) -> dict:
    return {"type": "event", "t": e.t, "event": e.event, "payload": e.payload}


class LogWriter:
    """Single-owner append-only writer; rows must arrive in time order."""

    def __init__(self, destination: str | os.PathLike | IO[str], header: LogHeader):
        if hasattr(destination, "write"):
            self._fh: IO[str] = destination  # type: ignore[assignment]
            self._owns = False
        else:
            self._fh = open(destination, "w", encoding="utf-8")
            self._owns = True
        self._last_sample_t = -math.inf
        self._last_event_t = -math.inf
        self._fh.write(
            _dump(
                {
                    "schema_version": header.schema_version,
                    "manifest": header.manifest,
                    "geometry": header.geometry,
                    "start_walltime": header.start_walltime,
                }
            )
            + "\n"
        )

    def add_sample(self, sample: LogSample) -> None:
        if sample.t <= self._last_sample_t:
            raise ValueError(f"sample timestamps must be strictly increasing ({sample.t} after {self._last_sample_t})")
        self._last_sample_t = sample.t
        self._fh.write(_dump(_sample_row(sample)) + "\n")

    def add_event(self, event: LogEvent) -> None:
        if event.event not in EVENT_KINDS:
            raise ValueError(f"unknown event kind {event.event!r}")
        if event.t < self._last_event_t:
            raise ValueError(f"event timestamps must be non-decreasing ({event.t} after {self._last_event_t})")
        self._last_event_t = event.t
        self._fh.write(_dump(_event_row(event)) + "\n")

    def flush(self) -> None:
        self._fh.flush()

    def close(self) -> None:
        self._fh.flush()
        if self._owns:
            self._fh.close()


def write_log(log: FlightLog, destination: str | os.PathLike | IO[str]) -> None:
    """Write a complete log, merging samples and events by timestamp."""
    writer = LogWriter(destination, log.header)
    try:
        rows: list[tuple[float, int, int, object]] = []
        rows.extend((s.t, 0, i, s) for i, s in enumerate(log.samples))
        rows.extend((e.t, 1, i, e) for i, e in enumerate(log.events))
        rows.sort(key=lambda r: (r[0], r[1], r[2]))
        for _, kind, _, row in rows:
            if kind == 0:
                writer.add_sample(row)  # type: ignore[arg-type]
            else:
                writer.add_event(row)  # type: ignore[arg-type]
    finally:
        writer.close()


_SAMPLE_FIELDS = ("t", "x", "y", "z", "yaw", "vx", "vy", "vz", "yaw_rate")


def _parse_number(row: dict, name: str, line: int) -> float:
    v = row.get(name)
    if isinstance(v, bool) or not isinstance(v, (int, float)) or not math.isfinite(v):
        raise LogFormatError(f"field {name!r} must be a finite number, got {v!r}", line)
    return float(v)


def _parse_sample(row: dict, line: int) -> LogSample:
    missing = [f for f in _SAMPLE_FIELDS if f not in row] + (["thrust"] if "thrust" not in row else [])
    if missing:
        raise LogFormatError(f"sample row missing fields: {', '.join(missing)}", line)
    values = {f: _parse_number(row, f, line) for f in _SAMPLE_FIELDS}
    if not (-math.pi < values["yaw"] <= math.pi):
        raise LogFormatError(f"yaw out of (-pi, pi]: {values['yaw']!r}", line)
    thrust = row["thrust"]
    if not (isinstance(thrust, list) and len(thrust) == 4):
        raise LogFormatError(f"thrust must be a list of 4 values, got {thrust!r}", line)
    for v in thrust:
        if isinstance(v, bool) or not isinstance(v, (int, float)) or not math.isfinite(v) or not 0.0 <= v <= 1.0:
            raise LogFormatError(f"thrust values must be in [0, 1], got {v!r}", line)
    return LogSample(thrust=tuple(float(v) for v in thrust), **values)


def _parse_event(row: dict, line: int) -> LogEvent:
    t = _parse_number(row, "t", line)
    kind = row.get("event")
    if kind not in EVENT_KINDS:
        raise LogFormatError(f"unknown event kind {kind!r}", line)
    payload = row.get("payload", {})
    if not isinstance(payload, dict):
        raise LogFormatError(f"event payload must be an object, got {payload!r}", line)
    return LogEvent(t=t, event=kind, payload=payload)


def read_log(source: str | os.PathLike | IO[str]) -> FlightLog:
    """Parse and validate a ``.dreamlog`` file; errors carry line numbers."""
    if hasattr(source, "read"):
        fh: IO[str] = source  # type: ignore[assignment]
        close = False
    else:
        fh = open(source, "r", encoding="utf-8")
        close = True
    try:
        return _read_stream(fh)
    finally:
        if close:
            fh.close()


def _read_stream(fh: IO[str]) -> FlightLog:
    header_line = fh.readline()
    if not header_line.strip():
        raise LogFormatError("empty file: missing header", 1)
    try:
        head = json.loads(header_line)
    except json.JSONDecodeError as exc:
        raise LogFormatError(f"invalid JSON in header: {exc.msg}", 1) from exc
    if not isinstance(head, dict):
        raise LogFormatError("header must be a JSON object", 1)
    for key in ("schema_version", "manifest", "geometry", "start_walltime"):
        if key not in head:
            raise LogFormatError(f"header missing {key!r}", 1)
    if head["schema_version"] != SCHEMA_VERSION:
        raise SchemaVersionError(
            f"unsupported schema version {head['schema_version']!r} (expected {SCHEMA_VERSION!r})", 1
        )
    if not isinstance(head["manifest"], dict):
        raise LogFormatError("header manifest must be an object", 1)
    if head["geometry"] is not None and not isinstance(head["geometry"], dict):
        raise LogFormatError("header geometry must be an object or null", 1)

    header = LogHeader(
        manifest=head["manifest"],
        geometry=head["geometry"],
        start_walltime=head["start_walltime"],
        schema_version=head["schema_version"],
    )
    samples: list[LogSample] = []
    events: list[LogEvent] = []
    last_sample_t = -math.inf
    last_event_t = -math.inf
    for line_no, raw in enumerate(fh, start=2):
        if raw.strip() == "":
            raise LogFormatError("blank line inside log body", line_no)
        if not raw.endswith("\n"):
            raise LogFormatError("truncated final line (missing newline)", line_no)
        try:
            row = json.loads(raw)
        except json.JSONDecodeError as exc:
            raise LogFormatError(f"invalid JSON: {exc.msg}", line_no) from exc
        if not isinstance(row, dict):
            raise LogFormatError("row must be a JSON object", line_no)
        kind = row.get("type")
        if kind == "sample":
            sample = _parse_sample(row, line_no)
            if sample.t <= last_sample_t:
                raise LogFormatError(
                    f"sample timestamps must be strictly increasing ({sample.t} after {last_sample_t})", line_no
                )
            last_sample_t = sample.t
            samples.append(sample)
        elif kind == "event":
            event = _parse_event(row, line_no)
            if event.t < last_event_t:
                raise LogFormatError(
                    f"event timestamps must be non-decreasing ({event.t} after {last_event_t})", line_no
                )
            last_event_t = event.t
            events.append(event)
        else:
            raise LogFormatError(f"unknown row type {kind!r}", line_no)
    return FlightLog(header=header, samples=samples, events=events)


def dumps_log(log: FlightLog) -> str:
    """Serialize a log to the exact bytes ``write_log`` would produce."""
    buf = io.StringIO()
    write_log(log, buf)
    return buf.getvalue()


def loads_log(text: str) -> FlightLog:
    return read_log(io.StringIO(text))


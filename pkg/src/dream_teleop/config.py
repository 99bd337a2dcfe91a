"""Scenario configuration: the JSON schema driving headless runs and serving.

Required keys: ``mode`` ("dream" or "joystick") and ``geometry`` (start,
arrival, checkpoint, target). Everything else has documented defaults.
Validation errors name the offending dotted field.
"""

from __future__ import annotations

import json
import math
import os
from dataclasses import dataclass, field

from .errors import ConfigurationError
from .metrics import StopParams, TaskGeometry
from .uav import DEFAULT_TAU_S, AxisGains, FlightVolume, Limits, PidGains

TICK_DT = 0.01  # one global 100 Hz clock: plant, links, and command stream

MODES = ("dream", "joystick")


@dataclass(frozen=True)
class ChannelConfig:
    latency_s: float = 0.06
    jitter_s: float = 0.0
    drop: float = 0.0

    def to_dict(self) -> dict:
        return {"latency_s": self.latency_s, "jitter_s": self.jitter_s, "drop": self.drop}


@dataclass(frozen=True)
class DreamPilotConfig:
    """Scripted hand that shuttles the leader along the path."""

    cruise_speed: float = 0.8  # m/s along the path while dragging
    hold_s: float = 3.5  # dwell at each endpoint, enough for the follower to settle
    grab_lead_s: float = 1.0  # time spent hovering on the leader before/after grabbing
    keyframe_spacing_s: float = 0.25

    def to_dict(self) -> dict:
        return {
            "cruise_speed": self.cruise_speed,
            "hold_s": self.hold_s,
            "grab_lead_s": self.grab_lead_s,
            "keyframe_spacing_s": self.keyframe_spacing_s,
        }


@dataclass(frozen=True)
class JoystickPilotConfig:
    """Closed-loop stick pilot with a human-like reaction delay."""

    cruise_speed: float = 0.8
    pos_gain: float = 1.0  # (m/s) commanded per meter of distance to the waypoint
    yaw_gain: float = 1.5  # stick deflection per radian of heading error
    reaction_delay_s: float = 0.25
    settle_radius_m: float = 0.15
    settle_speed: float = 0.15
    hold_s: float = 1.5
    noise: float = 0.0  # std-dev of optional stick actuation noise

    def to_dict(self) -> dict:
        return {
            "cruise_speed": self.cruise_speed,
            "pos_gain": self.pos_gain,
            "yaw_gain": self.yaw_gain,
            "reaction_delay_s": self.reaction_delay_s,
            "settle_radius_m": self.settle_radius_m,
            "settle_speed": self.settle_speed,
            "hold_s": self.hold_s,
            "noise": self.noise,
        }


@dataclass(frozen=True)
class ScenarioConfig:
    mode: str
    geometry: TaskGeometry
    duration_s: float = 180.0
    seed: int = 0
    limits: Limits = field(default_factory=Limits)
    pid: PidGains = field(default_factory=PidGains)
    channel: ChannelConfig = field(default_factory=ChannelConfig)
    stop: StopParams = field(default_factory=StopParams)
    dream_pilot: DreamPilotConfig = field(default_factory=DreamPilotConfig)
    joystick_pilot: JoystickPilotConfig = field(default_factory=JoystickPilotConfig)
    tau_s: float = DEFAULT_TAU_S

    def __post_init__(self):
        if self.mode not in MODES:
            raise ConfigurationError(f"mode must be one of {MODES}, got {self.mode!r}")
        if not (math.isfinite(self.duration_s) and self.duration_s > 0):
            raise ConfigurationError(f"duration_s must be > 0, got {self.duration_s!r}")
        if not isinstance(self.seed, int):
            raise ConfigurationError(f"seed must be an integer, got {self.seed!r}")

    def to_dict(self) -> dict:
        return {
            "mode": self.mode,
            "duration_s": self.duration_s,
            "seed": self.seed,
            "geometry": self.geometry.to_dict(),
            "limits": {
                "max_horizontal_speed": self.limits.max_horizontal_speed,
                "max_vertical_speed": self.limits.max_vertical_speed,
                "max_yaw_rate": self.limits.max_yaw_rate,
                "volume": {
                    "x": [self.limits.volume.x_min, self.limits.volume.x_max],
                    "y": [self.limits.volume.y_min, self.limits.volume.y_max],
                    "z": [self.limits.volume.z_min, self.limits.volume.z_max],
                },
            },
            "pid": {
                "x": _gains_dict(self.pid.x),
                "y": _gains_dict(self.pid.y),
                "z": _gains_dict(self.pid.z),
                "yaw": _gains_dict(self.pid.yaw),
                "integral_limit": self.pid.integral_limit,
            },
            "channel": self.channel.to_dict(),
            "stop": self.stop.to_dict(),
            "dream_pilot": self.dream_pilot.to_dict(),
            "joystick_pilot": self.joystick_pilot.to_dict(),
            "tau_s": self.tau_s,
        }


def _gains_dict(g: AxisGains) -> dict:
    return {"kp": g.kp, "ki": g.ki, "kd": g.kd}


def _number(d: dict, key: str, where: str, default=None):
    if key not in d:
        if default is None:
            raise ConfigurationError(f"{where}.{key}: required")
        return default
    v = d[key]
    if isinstance(v, bool) or not isinstance(v, (int, float)) or not math.isfinite(v):
        raise ConfigurationError(f"{where}.{key} must be a finite number, got {v!r}")
    return float(v)


def _parse_gains(d: dict, where: str, default: AxisGains) -> AxisGains:
    if not isinstance(d, dict):
        raise ConfigurationError(f"{where} must be an object, got {d!r}")
    try:
        return AxisGains(
            kp=_number(d, "kp", where, default.kp),
            ki=_number(d, "ki", where, default.ki),
            kd=_number(d, "kd", where, default.kd),
        )
    except ConfigurationError:
        raise
    except ValueError as exc:
        raise ConfigurationError(f"{where}: {exc}") from exc


def _parse_limits(d: dict) -> Limits:
    if not isinstance(d, dict):
        raise ConfigurationError(f"limits must be an object, got {d!r}")
    defaults = Limits()
    volume = defaults.volume
    if "volume" in d:
        vd = d["volume"]
        if not isinstance(vd, dict):
            raise ConfigurationError(f"limits.volume must be an object, got {vd!r}")
        spans = {}
        for axis in ("x", "y", "z"):
            span = vd.get(axis)
            if not (isinstance(span, (list, tuple)) and len(span) == 2):
                raise ConfigurationError(f"limits.volume.{axis} must be [min, max], got {span!r}")
            spans[axis] = (float(span[0]), float(span[1]))
        try:
            volume = FlightVolume(
                x_min=spans["x"][0], x_max=spans["x"][1],
                y_min=spans["y"][0], y_max=spans["y"][1],
                z_min=spans["z"][0], z_max=spans["z"][1],
            )
        except ConfigurationError as exc:
            raise ConfigurationError(f"limits.volume: {exc}") from exc
    try:
        return Limits(
            max_horizontal_speed=_number(d, "max_horizontal_speed", "limits", defaults.max_horizontal_speed),
            max_vertical_speed=_number(d, "max_vertical_speed", "limits", defaults.max_vertical_speed),
            max_yaw_rate=_number(d, "max_yaw_rate", "limits", defaults.max_yaw_rate),
            volume=volume,
        )
    except ConfigurationError:
        raise


def scenario_from_dict(d: dict) -> ScenarioConfig:
    """Build a validated scenario from plain JSON data."""
    if not isinstance(d, dict):
        raise ConfigurationError(f"config must be an object, got {d!r}")
    if "mode" not in d:
        raise ConfigurationError("mode: required")
    if d["mode"] not in MODES:
        raise ConfigurationError(f"mode must be one of {MODES}, got {d['mode']!r}")
    if "geometry" not in d:
        raise ConfigurationError("geometry: required")
    geometry = TaskGeometry.from_dict(d["geometry"], where="geometry")

    kwargs: dict = {"mode": d["mode"], "geometry": geometry}
    kwargs["duration_s"] = _number(d, "duration_s", "config", ScenarioConfig.duration_s)
    if "seed" in d:
        if isinstance(d["seed"], bool) or not isinstance(d["seed"], int):
            raise ConfigurationError(f"seed must be an integer, got {d['seed']!r}")
        kwargs["seed"] = d["seed"]
    if "limits" in d:
        kwargs["limits"] = _parse_limits(d["limits"])
    if "pid" in d:
        pd = d["pid"]
        if not isinstance(pd, dict):
            raise ConfigurationError(f"pid must be an object, got {pd!r}")
        default = PidGains()
        kwargs["pid"] = PidGains(
            x=_parse_gains(pd.get("x", {}), "pid.x", default.x),
            y=_parse_gains(pd.get("y", {}), "pid.y", default.y),
            z=_parse_gains(pd.get("z", {}), "pid.z", default.z),
            yaw=_parse_gains(pd.get("yaw", {}), "pid.yaw", default.yaw),
            integral_limit=_number(pd, "integral_limit", "pid", default.integral_limit),
        )
    if "channel" in d:
        cd = d["channel"]
        if not isinstance(cd, dict):
            raise ConfigurationError(f"channel must be an object, got {cd!r}")
        default_ch = ChannelConfig()
        drop = _number(cd, "drop", "channel", default_ch.drop)
        if not 0.0 <= drop < 1.0:
            raise ConfigurationError(f"channel.drop must be in [0, 1), got {drop!r}")
        kwargs["channel"] = ChannelConfig(
            latency_s=_number(cd, "latency_s", "channel", default_ch.latency_s),
            jitter_s=_number(cd, "jitter_s", "channel", default_ch.jitter_s),
            drop=drop,
        )
    if "stop" in d:
        kwargs["stop"] = StopParams.from_dict(d["stop"], where="stop")
    if "dream_pilot" in d:
        pd = d["dream_pilot"]
        if not isinstance(pd, dict):
            raise ConfigurationError(f"dream_pilot must be an object, got {pd!r}")
        default_dp = DreamPilotConfig()
        kwargs["dream_pilot"] = DreamPilotConfig(
            cruise_speed=_number(pd, "cruise_speed", "dream_pilot", default_dp.cruise_speed),
            hold_s=_number(pd, "hold_s", "dream_pilot", default_dp.hold_s),
            grab_lead_s=_number(pd, "grab_lead_s", "dream_pilot", default_dp.grab_lead_s),
            keyframe_spacing_s=_number(pd, "keyframe_spacing_s", "dream_pilot", default_dp.keyframe_spacing_s),
        )
    if "joystick_pilot" in d:
        pd = d["joystick_pilot"]
        if not isinstance(pd, dict):
            raise ConfigurationError(f"joystick_pilot must be an object, got {pd!r}")
        default_jp = JoystickPilotConfig()
        kwargs["joystick_pilot"] = JoystickPilotConfig(
            cruise_speed=_number(pd, "cruise_speed", "joystick_pilot", default_jp.cruise_speed),
            pos_gain=_number(pd, "pos_gain", "joystick_pilot", default_jp.pos_gain),
            yaw_gain=_number(pd, "yaw_gain", "joystick_pilot", default_jp.yaw_gain),
            reaction_delay_s=_number(pd, "reaction_delay_s", "joystick_pilot", default_jp.reaction_delay_s),
            settle_radius_m=_number(pd, "settle_radius_m", "joystick_pilot", default_jp.settle_radius_m),
            settle_speed=_number(pd, "settle_speed", "joystick_pilot", default_jp.settle_speed),
            hold_s=_number(pd, "hold_s", "joystick_pilot", default_jp.hold_s),
            noise=_number(pd, "noise", "joystick_pilot", default_jp.noise),
        )
    if "tau_s" in d:
        tau = _number(d, "tau_s", "config")
        if tau <= 0:
            raise ConfigurationError(f"tau_s must be > 0, got {tau!r}")
        kwargs["tau_s"] = tau
    return ScenarioConfig(**kwargs)


def load_scenario(path: str | os.PathLike) -> ScenarioConfig:
    """Load and validate a scenario config file (JSON)."""
    try:
        with open(path, "r", encoding="utf-8") as fh:
            data = json.load(fh)
    except FileNotFoundError:
        raise ConfigurationError(f"config file not found: {path}") from None
    except json.JSONDecodeError as exc:
        raise ConfigurationError(f"config is not valid JSON: {exc}") from exc
    return scenario_from_dict(data)

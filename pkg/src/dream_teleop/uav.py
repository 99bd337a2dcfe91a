"""Simulated follower UAV: kinematic plant, position PID, and stick control.

The plant is a first-order velocity lag (time constant ``tau``) integrated
semi-implicitly at a fixed tick; pose is confined to a safety volume. Rotor
thrust values are synthesized from commanded acceleration for log fidelity
only.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field, replace

from .errors import ConfigurationError
from .geometry import BodyVector, Pose, body_to_inertial, inertial_to_body, wrap_angle

log = logging.getLogger(__name__)

DEFAULT_TAU_S = 0.25


@dataclass(frozen=True)
class FlightVolume:
    """Axis-aligned box the follower is never commanded or driven out of."""

    x_min: float = -2.5
    x_max: float = 2.5
    y_min: float = -2.5
    y_max: float = 2.5
    z_min: float = 0.2
    z_max: float = 2.0

    def __post_init__(self):
        if not (self.x_min < self.x_max and self.y_min < self.y_max and self.z_min < self.z_max):
            raise ConfigurationError("FlightVolume must be non-degenerate (min < max on every axis)")

    def contains(self, pose: Pose) -> bool:
        return (
            self.x_min <= pose.x <= self.x_max
            and self.y_min <= pose.y <= self.y_max
            and self.z_min <= pose.z <= self.z_max
        )

    def clamp(self, pose: Pose) -> Pose:
        return Pose(
            min(max(pose.x, self.x_min), self.x_max),
            min(max(pose.y, self.y_min), self.y_max),
            min(max(pose.z, self.z_min), self.z_max),
            pose.yaw,
        )


@dataclass(frozen=True)
class Limits:
    """Rate limits of the real vehicle (the virtual one is unconstrained)."""

    max_horizontal_speed: float = 1.0
    max_vertical_speed: float = 0.5
    max_yaw_rate: float = 1.5
    volume: FlightVolume = field(default_factory=FlightVolume)

    def __post_init__(self):
        for name in ("max_horizontal_speed", "max_vertical_speed", "max_yaw_rate"):
            v = getattr(self, name)
            if not (isinstance(v, (int, float)) and math.isfinite(v) and v > 0):
                raise ConfigurationError(f"Limits.{name} must be > 0, got {v!r}")


@dataclass(frozen=True)
class UavState:
    pose: Pose
    vx: float = 0.0
    vy: float = 0.0
    vz: float = 0.0
    yaw_rate: float = 0.0
    thrust: tuple[float, float, float, float] = (0.5, 0.5, 0.5, 0.5)

    @property
    def horizontal_speed(self) -> float:
        return math.hypot(self.vx, self.vy)

    @property
    def speed(self) -> float:
        return math.sqrt(self.vx * self.vx + self.vy * self.vy + self.vz * self.vz)

    @classmethod
    def hovering(cls, pose: Pose) -> "UavState":
        return cls(pose=pose)


@dataclass(frozen=True)
class VelocityCommand:
    vx: float = 0.0
    vy: float = 0.0
    vz: float = 0.0
    yaw_rate: float = 0.0


@dataclass(frozen=True)
class AxisGains:
    kp: float = 2.4
    ki: float = 1.2
    kd: float = 0.35

    def __post_init__(self):
        for name in ("kp", "ki", "kd"):
            v = getattr(self, name)
            if not (isinstance(v, (int, float)) and math.isfinite(v) and v >= 0):
                raise ConfigurationError(f"AxisGains.{name} must be >= 0, got {v!r}")


@dataclass(frozen=True)
class PidGains:
    x: AxisGains = AxisGains()
    y: AxisGains = AxisGains()
    z: AxisGains = AxisGains()
    yaw: AxisGains = AxisGains()
    integral_limit: float = 0.15

    def __post_init__(self):
        if not (math.isfinite(self.integral_limit) and self.integral_limit >= 0):
            raise ConfigurationError(f"PidGains.integral_limit must be >= 0, got {self.integral_limit!r}")

    @property
    def axes(self) -> tuple[AxisGains, AxisGains, AxisGains, AxisGains]:
        return (self.x, self.y, self.z, self.yaw)


@dataclass(frozen=True)
class PidState:
    """Controller memory: per-axis integral accumulators and previous errors."""

    gains: PidGains = PidGains()
    integrals: tuple[float, float, float, float] = (0.0, 0.0, 0.0, 0.0)
    prev_errors: tuple[float, float, float, float] | None = None


def _clamp(v: float, lo: float, hi: float) -> float:
    return min(max(v, lo), hi)


def pid_step(
    pid: PidState, setpoint: Pose, state: UavState, dt: float, limits: Limits
) -> tuple[VelocityCommand, PidState]:
    """One PID update on position error; returns the clamped velocity command."""
    if not (isinstance(dt, (int, float)) and math.isfinite(dt) and dt > 0):
        raise ValueError(f"dt must be > 0, got {dt!r}")

    errors = (
        setpoint.x - state.pose.x,
        setpoint.y - state.pose.y,
        setpoint.z - state.pose.z,
        wrap_angle(setpoint.yaw - state.pose.yaw),
    )
    bound = pid.gains.integral_limit
    candidates = tuple(_clamp(i + e * dt, -bound, bound) for i, e in zip(pid.integrals, errors))

    raw = []
    for k, (gains, e, i) in enumerate(zip(pid.gains.axes, errors, candidates)):
        if pid.prev_errors is None:
            de = 0.0
        else:
            delta = e - pid.prev_errors[k]
            if k == 3:  # yaw error lives on the circle
                delta = wrap_angle(delta)
            de = delta / dt
        raw.append(gains.kp * e + gains.ki * i + gains.kd * de)

    ux, uy, uz, uyaw = raw
    h = math.hypot(ux, uy)
    saturated = [False, False, False, False]
    if h > limits.max_horizontal_speed:
        scale = limits.max_horizontal_speed / h
        ux, uy = ux * scale, uy * scale
        saturated[0] = saturated[1] = True
    uz = _clamp(uz, -limits.max_vertical_speed, limits.max_vertical_speed)
    saturated[2] = uz != raw[2]
    uyaw = _clamp(uyaw, -limits.max_yaw_rate, limits.max_yaw_rate)
    saturated[3] = uyaw != raw[3]

    # Clamping anti-windup: while an axis output saturates in the direction
    # of its error, its accumulator keeps the previous value.
    integrals = tuple(
        pid.integrals[k] if (saturated[k] and errors[k] * raw[k] > 0) else candidates[k]
        for k in range(4)
    )

    new_pid = replace(pid, integrals=integrals, prev_errors=errors)
    return VelocityCommand(ux, uy, uz, uyaw), new_pid


def joystick_step(
    left_stick: tuple[float, float],
    right_stick: float,
    state: UavState,
    limits: Limits,
    z_pid: PidState,
    hold_z: float,
    dt: float,
) -> tuple[VelocityCommand, PidState]:
    """Body-frame stick control: left = (u, v) translation, right = yaw rate.

    Altitude is held by an internal z PID. Out-of-range stick values are
    clamped (with a warning), never rejected.
    """
    lu, lv = left_stick
    if not all(math.isfinite(v) for v in (lu, lv, right_stick)):
        raise ValueError("stick values must be finite")
    if abs(lu) > 1 or abs(lv) > 1 or abs(right_stick) > 1:
        log.warning("stick input out of range, clamping: left=(%.3f, %.3f) right=%.3f", lu, lv, right_stick)
    lu = _clamp(lu, -1.0, 1.0)
    lv = _clamp(lv, -1.0, 1.0)
    ry = _clamp(right_stick, -1.0, 1.0)

    vx, vy = body_to_inertial(
        BodyVector(lu * limits.max_horizontal_speed, lv * limits.max_horizontal_speed),
        state.pose.yaw,
    )
    h = math.hypot(vx, vy)
    if h > limits.max_horizontal_speed:
        scale = limits.max_horizontal_speed / h
        vx, vy = vx * scale, vy * scale

    z_setpoint = Pose(state.pose.x, state.pose.y, hold_z, state.pose.yaw)
    z_cmd, z_pid = pid_step(z_pid, z_setpoint, state, dt, limits)

    return VelocityCommand(vx, vy, z_cmd.vz, ry * limits.max_yaw_rate), z_pid


def _thrust_from_accel(ax: float, ay: float, az: float, ayaw: float, yaw: float) -> tuple[float, float, float, float]:
    # Log-fidelity mixer only: hover baseline plus small attitude/climb terms.
    body = inertial_to_body((ax, ay), yaw)
    base = 0.5 + 0.05 * az
    pitch = 0.05 * body.u
    roll = 0.05 * body.v
    yaw_t = 0.02 * ayaw
    mix = (
        base - pitch + roll + yaw_t,
        base - pitch - roll - yaw_t,
        base + pitch + roll - yaw_t,
        base + pitch - roll + yaw_t,
    )
    return tuple(_clamp(m, 0.0, 1.0) for m in mix)


def plant_step(
    state: UavState,
    cmd: VelocityCommand,
    dt: float,
    limits: Limits,
    tau: float = DEFAULT_TAU_S,
) -> UavState:
    """Advance the kinematic plant one tick toward the commanded velocity."""
    if not (isinstance(dt, (int, float)) and math.isfinite(dt) and dt > 0):
        raise ValueError(f"dt must be > 0, got {dt!r}")
    if not (math.isfinite(tau) and tau > 0):
        raise ConfigurationError(f"tau must be > 0, got {tau!r}")

    # Exact discrete first-order response so constant commands reproduce
    # v(t) = V (1 - exp(-t / tau)) to float precision.
    alpha = 1.0 - math.exp(-dt / tau)
    vx = state.vx + alpha * (cmd.vx - state.vx)
    vy = state.vy + alpha * (cmd.vy - state.vy)
    vz = state.vz + alpha * (cmd.vz - state.vz)
    yaw_rate = state.yaw_rate + alpha * (cmd.yaw_rate - state.yaw_rate)

    x = state.pose.x + vx * dt
    y = state.pose.y + vy * dt
    z = state.pose.z + vz * dt
    yaw = wrap_angle(state.pose.yaw + yaw_rate * dt)

    vol = limits.volume
    if x < vol.x_min:
        x, vx = vol.x_min, max(vx, 0.0)
    elif x > vol.x_max:
        x, vx = vol.x_max, min(vx, 0.0)
    if y < vol.y_min:
        y, vy = vol.y_min, max(vy, 0.0)
    elif y > vol.y_max:
        y, vy = vol.y_max, min(vy, 0.0)
    if z < vol.z_min:
        z, vz = vol.z_min, max(vz, 0.0)
    elif z > vol.z_max:
        z, vz = vol.z_max, min(vz, 0.0)

    thrust = _thrust_from_accel(
        (vx - state.vx) / dt,
        (vy - state.vy) / dt,
        (vz - state.vz) / dt,
        (yaw_rate - state.yaw_rate) / dt,
        yaw,
    )
    return UavState(pose=Pose(x, y, z, yaw), vx=vx, vy=vy, vz=vz, yaw_rate=yaw_rate, thrust=thrust)

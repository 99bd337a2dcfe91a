"""Scripted pilots that stand in for the human during headless runs.

The hand pilot plays back a keyframed hand trajectory through the grab
automaton (never writing setpoints directly); the joystick pilot is a
proportional controller with a configurable reaction delay, observing the
vehicle as a direct-view human would.
"""

from __future__ import annotations

import bisect
import math
import random
from collections import deque
from dataclasses import dataclass

from . import __version__
from .config import TICK_DT, DreamPilotConfig, JoystickPilotConfig, ScenarioConfig
from .errors import ConfigurationError
from .geometry import Pose, inertial_to_body, wrap_angle
from .logstore import FlightLog, LogHeader
from .metrics import TaskGeometry, reference_yaw
from .uav import Limits, UavState
from .world import StickInput, World


@dataclass(frozen=True)
class HandKeyframe:
    t: float
    pose: Pose
    take_pressed: bool


@dataclass(frozen=True)
class HandScript:
    """Keyframed hand trajectory; linear position, shortest-arc yaw."""

    keyframes: tuple[HandKeyframe, ...]

    def __post_init__(self):
        if not self.keyframes:
            raise ConfigurationError("hand script needs at least one keyframe")
        times = [k.t for k in self.keyframes]
        if any(b <= a for a, b in zip(times, times[1:])):
            raise ConfigurationError("hand script keyframe times must be strictly increasing")

    @property
    def span(self) -> tuple[float, float]:
        return (self.keyframes[0].t, self.keyframes[-1].t)


def hand_at(script: HandScript, t: float) -> tuple[Pose, bool]:
    """Interpolated hand pose and button level at time t (clamped at the ends)."""
    kfs = script.keyframes
    if t <= kfs[0].t:
        return kfs[0].pose, kfs[0].take_pressed
    if t >= kfs[-1].t:
        return kfs[-1].pose, kfs[-1].take_pressed
    times = [k.t for k in kfs]
    i = bisect.bisect_right(times, t) - 1
    a, b = kfs[i], kfs[i + 1]
    if t == a.t:
        return a.pose, a.take_pressed
    u = (t - a.t) / (b.t - a.t)
    pose = Pose(
        a.pose.x + u * (b.pose.x - a.pose.x),
        a.pose.y + u * (b.pose.y - a.pose.y),
        a.pose.z + u * (b.pose.z - a.pose.z),
        wrap_angle(a.pose.yaw + u * wrap_angle(b.pose.yaw - a.pose.yaw)),
    )
    return pose, a.take_pressed


def build_shuttle_script(
    geom: TaskGeometry, pilot: DreamPilotConfig, duration_s: float
) -> HandScript:
    """Grab the leader at the start point and shuttle it start<->arrival.

    The hand holds still at each endpoint long enough for the follower to
    settle into a detectable stop, and keeps the leader's nose on the target
    the whole way.
    """
    if pilot.cruise_speed <= 0:
        raise ConfigurationError(f"dream_pilot.cruise_speed must be > 0, got {pilot.cruise_speed!r}")
    sx, sy, _ = geom.start
    ax, ay, _ = geom.arrival
    alt = geom.start[2]
    leg = math.hypot(ax - sx, ay - sy)
    leg_time = leg / pilot.cruise_speed
    n_steps = max(2, int(math.ceil(leg_time / pilot.keyframe_spacing_s)))

    def pose_at(frac: float, origin, dest) -> Pose:
        x = origin[0] + frac * (dest[0] - origin[0])
        y = origin[1] + frac * (dest[1] - origin[1])
        return Pose(x, y, alt, reference_yaw((x, y), geom.target[:2]))

    kfs: list[HandKeyframe] = []
    start_pose = pose_at(0.0, (sx, sy), (ax, ay))
    t = 0.0
    kfs.append(HandKeyframe(t, start_pose, False))
    t += pilot.grab_lead_s / 2
    kfs.append(HandKeyframe(t, start_pose, True))  # press edge on the leader
    t += pilot.grab_lead_s / 2

    here, there = (sx, sy), (ax, ay)
    # Only legs that complete (including the settle hold) before the run ends.
    while t + leg_time + pilot.hold_s <= duration_s - 0.1:
        for k in range(n_steps + 1):
            frac = k / n_steps
            tt = t + frac * leg_time
            if tt <= kfs[-1].t:  # leg start coincides with the hold keyframe
                continue
            kfs.append(HandKeyframe(tt, pose_at(frac, here, there), True))
        t += leg_time
        kfs.append(HandKeyframe(t + pilot.hold_s, pose_at(1.0, here, there), True))
        t += pilot.hold_s
        here, there = there, here
    release_at = max(duration_s - 2 * TICK_DT, kfs[-1].t + TICK_DT)
    kfs.append(HandKeyframe(release_at, kfs[-1].pose, False))
    return HandScript(tuple(kfs))


class JoystickPilot:
    """Stick pilot: P-control toward the active waypoint in the body frame,
    yaw stick regulating the nose onto the target, inputs based on a
    reaction-delayed view of the vehicle."""

    def __init__(
        self,
        cfg: JoystickPilotConfig,
        geom: TaskGeometry,
        limits: Limits,
        seed: int | str = 0,
    ):
        if cfg.pos_gain < 0 or cfg.yaw_gain < 0:
            raise ConfigurationError("joystick pilot gains must be >= 0")
        if cfg.reaction_delay_s < 0:
            raise ConfigurationError("joystick pilot reaction delay must be >= 0")
        self.cfg = cfg
        self.geom = geom
        self.limits = limits
        self.waypoints = (geom.start[:2], geom.arrival[:2])
        # Hold at the start point first so the opening stop is detectable,
        # then the expiry flip targets the arrival.
        self.active = 0
        self.holding_until: float | None = cfg.hold_s
        self._history: deque[tuple[float, UavState]] = deque()
        self._rng = random.Random(f"{seed}/pilot") if cfg.noise > 0 else None

    def _observed(self, t: float, state: UavState) -> UavState:
        self._history.append((t, state))
        t_view = t - self.cfg.reaction_delay_s
        while len(self._history) > 1 and self._history[1][0] <= t_view:
            self._history.popleft()
        return self._history[0][1]

    def sticks_at(self, t: float, state: UavState) -> StickInput:
        obs = self._observed(t, state)
        cfg = self.cfg

        if self.holding_until is not None:
            if t < self.holding_until:
                return StickInput()
            self.holding_until = None
            self.active = 1 - self.active

        wx, wy = self.waypoints[self.active]
        dx, dy = wx - obs.pose.x, wy - obs.pose.y
        dist = math.hypot(dx, dy)
        if dist < cfg.settle_radius_m and obs.horizontal_speed < cfg.settle_speed:
            self.holding_until = t + cfg.hold_s
            return StickInput()

        vx_des, vy_des = cfg.pos_gain * dx, cfg.pos_gain * dy
        speed = math.hypot(vx_des, vy_des)
        if speed > cfg.cruise_speed:
            scale = cfg.cruise_speed / speed
            vx_des, vy_des = vx_des * scale, vy_des * scale
        body = inertial_to_body((vx_des, vy_des), obs.pose.yaw)
        lx = _clamp(body.u / self.limits.max_horizontal_speed)
        ly = _clamp(body.v / self.limits.max_horizontal_speed)

        bearing = reference_yaw((obs.pose.x, obs.pose.y), self.geom.target[:2])
        ryaw = _clamp(cfg.yaw_gain * wrap_angle(bearing - obs.pose.yaw))

        if self._rng is not None:
            lx = _clamp(lx + self._rng.gauss(0.0, cfg.noise))
            ly = _clamp(ly + self._rng.gauss(0.0, cfg.noise))
            ryaw = _clamp(ryaw + self._rng.gauss(0.0, cfg.noise))
        return StickInput(lx, ly, ryaw)


def _clamp(v: float) -> float:
    return min(max(v, -1.0), 1.0)


def run_scenario(config: ScenarioConfig, seed: int | None = None) -> FlightLog:
    """Run one deterministic scripted scenario and return its complete log."""
    if seed is not None:
        from dataclasses import replace

        config = replace(config, seed=seed)
    world = World(config)
    n_ticks = int(round(config.duration_s / TICK_DT))

    script = None
    pilot = None
    if config.mode == "dream":
        script = build_shuttle_script(config.geometry, config.dream_pilot, config.duration_s)
    else:
        pilot = JoystickPilot(config.joystick_pilot, config.geometry, config.limits, seed=config.seed)

    header = LogHeader(
        manifest={"config": config.to_dict(), "seed": config.seed, "version": __version__},
        geometry=config.geometry.to_dict(),
        start_walltime=None,  # headless runs stay byte-reproducible
    )
    log = FlightLog(header=header)
    log.samples.append(world.initial_sample())
    for _ in range(n_ticks):
        if config.mode == "dream":
            hand, take = hand_at(script, world.time)
            sample, events = world.step(hand=hand, take_pressed=take)
        else:
            sticks = pilot.sticks_at(world.time, world.uav)
            sample, events = world.step(sticks=sticks)
        log.samples.append(sample)
        log.events.extend(events)
    return log

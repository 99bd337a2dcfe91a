"""One fixed-step teleoperation world, shared by headless runs and the live service.

Tick order: operator input -> interaction automaton (or sticks) -> command
link -> follower plant -> feedback link -> phantom. Commands lost by the
link are zero-order held on the receiving side.
"""

from __future__ import annotations

from dataclasses import dataclass

from .config import TICK_DT, ScenarioConfig
from .geometry import Pose
from .logstore import LogEvent, LogSample
from .metaphor import HitBox, InteractionState, Mode, step_interaction, visual_state
from .metrics import reference_yaw
from .netlink import Channel, PhantomState, Stamped, update_phantom
from .uav import PidState, UavState, joystick_step, pid_step, plant_step


@dataclass(frozen=True)
class StickInput:
    lx: float = 0.0  # body u, forward
    ly: float = 0.0  # body v, left
    ryaw: float = 0.0


class World:
    """Simulation world owned by exactly one stepping loop."""

    def __init__(self, config: ScenarioConfig):
        self.config = config
        geom = config.geometry
        start_yaw = reference_yaw(geom.start[:2], geom.target[:2])
        self.start_pose = Pose(*geom.start, yaw=start_yaw)

        self.tick = 0
        self.uav = UavState.hovering(self.start_pose)
        self.interaction = InteractionState.initial(self.start_pose, HitBox())
        self.phantom = PhantomState.initial(self.start_pose, 0.0)
        self.pid = PidState(gains=config.pid)
        self.z_pid = PidState(gains=config.pid)
        ch = config.channel
        self.command_link = Channel(ch.latency_s, ch.jitter_s, ch.drop, seed=f"{config.seed}/cmd")
        self.feedback_link = Channel(ch.latency_s, ch.jitter_s, ch.drop, seed=f"{config.seed}/fb")
        # Zero-order-hold slots on the receiving side of the command link.
        self.setpoint = config.limits.volume.clamp(self.start_pose)
        self.sticks = StickInput()
        self.last_hand: Pose | None = None

    @property
    def time(self) -> float:
        return self.tick * TICK_DT

    def initial_sample(self) -> LogSample:
        return _sample(0.0, self.uav)

    def step(
        self,
        hand: Pose | None = None,
        take_pressed: bool = False,
        sticks: StickInput | None = None,
    ) -> tuple[LogSample, list[LogEvent]]:
        """Advance one tick; returns the new state sample and interaction events."""
        cfg = self.config
        now = self.time
        events: list[LogEvent] = []

        if cfg.mode == "dream":
            if hand is not None:
                prev = self.interaction
                self.interaction = step_interaction(prev, hand, take_pressed)
                self.last_hand = hand
                if take_pressed != prev.take_was_pressed:
                    events.append(LogEvent(now, "button", {"pressed": take_pressed}))
                if prev.mode is Mode.FREE and self.interaction.mode is Mode.TAKEN:
                    events.append(LogEvent(now, "grab", _pose_dict(self.interaction.vuav)))
                elif prev.mode is Mode.TAKEN and self.interaction.mode is Mode.FREE:
                    events.append(LogEvent(now, "release", _pose_dict(self.interaction.vuav)))
            self.command_link.send(Stamped(now, self.interaction.vuav), now)
        else:
            if sticks is not None:
                self.command_link.send(Stamped(now, sticks), now)

        delivered = self.command_link.poll(now)
        if delivered:
            payload = delivered[-1].payload
            if cfg.mode == "dream":
                # Safety envelope: the follower is never asked to leave the volume.
                self.setpoint = cfg.limits.volume.clamp(payload)
            else:
                self.sticks = payload

        if cfg.mode == "dream":
            cmd, self.pid = pid_step(self.pid, self.setpoint, self.uav, TICK_DT, cfg.limits)
        else:
            cmd, self.z_pid = joystick_step(
                (self.sticks.lx, self.sticks.ly),
                self.sticks.ryaw,
                self.uav,
                cfg.limits,
                self.z_pid,
                cfg.geometry.altitude,
                TICK_DT,
            )
        self.uav = plant_step(self.uav, cmd, TICK_DT, cfg.limits, cfg.tau_s)

        self.tick += 1
        t_new = self.time
        self.feedback_link.send(Stamped(t_new, self.uav.pose), t_new)
        self.phantom = update_phantom(self.phantom, self.feedback_link.poll(t_new), t_new)

        return _sample(t_new, self.uav), events

    def visual(self) -> str:
        """Current color-feedback state for the last seen hand."""
        if self.last_hand is None:
            if self.interaction.mode is Mode.TAKEN:
                return "is_taken"
            return "cannot_be_taken"
        return visual_state(self.interaction, self.last_hand).value


def _sample(t: float, uav: UavState) -> LogSample:
    p = uav.pose
    return LogSample(
        t=t, x=p.x, y=p.y, z=p.z, yaw=p.yaw,
        vx=uav.vx, vy=uav.vy, vz=uav.vz, yaw_rate=uav.yaw_rate,
        thrust=uav.thrust,
    )


def _pose_dict(p: Pose) -> dict:
    return {"x": p.x, "y": p.y, "z": p.z, "yaw": p.yaw}


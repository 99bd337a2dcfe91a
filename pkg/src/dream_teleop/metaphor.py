"""Grab-and-drag interaction automaton for the virtual leader UAV.

The operator's hand can take the virtual UAV only while inside its hit box;
while taken, the UAV moves rigidly with the hand. Releasing leaves it where
it is. A clamped-linear speed intensity feeds the UI's audio/meter feedback.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from enum import Enum

from .errors import ConfigurationError
from .geometry import GripOffset, Pose, grip_apply, grip_capture


class Mode(Enum):
    FREE = "free"
    TAKEN = "taken"


class VisualState(Enum):
    CAN_BE_TAKEN = "can_be_taken"
    CANNOT_BE_TAKEN = "cannot_be_taken"
    IS_TAKEN = "is_taken"


@dataclass(frozen=True)
class HitBox:
    """Axis-aligned grab region centered on the virtual UAV (half-extents, m)."""

    hx: float = 0.15
    hy: float = 0.15
    hz: float = 0.15

    def __post_init__(self):
        for name in ("hx", "hy", "hz"):
            v = getattr(self, name)
            if not (isinstance(v, (int, float)) and math.isfinite(v) and v > 0):
                raise ConfigurationError(f"HitBox.{name} must be > 0, got {v!r}")


def hit_test(hand: Pose, vuav: Pose, box: HitBox) -> bool:
    """True iff the hand position lies inside the box (boundary inclusive)."""
    return (
        abs(hand.x - vuav.x) <= box.hx
        and abs(hand.y - vuav.y) <= box.hy
        and abs(hand.z - vuav.z) <= box.hz
    )


@dataclass(frozen=True)
class InteractionState:
    """Snapshot of the grab automaton.

    `take_was_pressed` remembers the previous button level so a grab only
    happens on a press edge that occurs inside the hit box.
    """

    vuav: Pose
    box: HitBox = HitBox()
    mode: Mode = Mode.FREE
    grip: GripOffset | None = None
    take_was_pressed: bool = False

    def __post_init__(self):
        if (self.mode is Mode.TAKEN) != (self.grip is not None):
            raise ValueError("grip must be present exactly when taken")

    @classmethod
    def initial(cls, vuav: Pose, box: HitBox | None = None) -> "InteractionState":
        return cls(vuav=vuav, box=box or HitBox())


def step_interaction(state: InteractionState, hand: Pose, take_pressed: bool) -> InteractionState:
    """Advance the automaton one tick for the given hand pose and button level."""
    if state.mode is Mode.TAKEN:
        if take_pressed:
            return replace(state, vuav=grip_apply(hand, state.grip), take_was_pressed=True)
        return replace(state, mode=Mode.FREE, grip=None, take_was_pressed=False)

    press_edge = take_pressed and not state.take_was_pressed
    if press_edge and hit_test(hand, state.vuav, state.box):
        # The pose is left untouched at the grab instant: no teleport.
        return replace(
            state,
            mode=Mode.TAKEN,
            grip=grip_capture(hand, state.vuav),
            take_was_pressed=True,
        )
    return replace(state, take_was_pressed=take_pressed)


def visual_state(state: InteractionState, hand: Pose) -> VisualState:
    """Color-feedback state for the current hand position."""
    if state.mode is Mode.TAKEN:
        return VisualState.IS_TAKEN
    if hit_test(hand, state.vuav, state.box):
        return VisualState.CAN_BE_TAKEN
    return VisualState.CANNOT_BE_TAKEN


def speed_feedback(speed: float, max_speed: float) -> float:
    """Clamped linear intensity in [0, 1] for audio/meter speed feedback."""
    if not (isinstance(max_speed, (int, float)) and math.isfinite(max_speed)) or max_speed <= 0:
        raise ConfigurationError(f"max_speed must be > 0, got {max_speed!r}")
    if not (isinstance(speed, (int, float)) and math.isfinite(speed)) or speed < 0:
        raise ValueError(f"speed must be finite and >= 0, got {speed!r}")
    return min(speed / max_speed, 1.0)

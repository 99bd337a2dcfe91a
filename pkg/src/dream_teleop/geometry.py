"""Planar pose arithmetic shared by the whole stack.

The inertial frame is fixed; yaw is the counter-clockwise angle about +z,
zero along +x, kept in (-pi, pi]. Body axes (u, v) rotate with the vehicle.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

TWO_PI = 2.0 * math.pi


def wrap_angle(a: float) -> float:
    """Wrap an angle (radians) to (-pi, pi]."""
    if not math.isfinite(a):
        raise ValueError(f"angle must be finite, got {a!r}")
    r = a % TWO_PI  # [0, 2*pi), modulo rounding
    if r > math.pi:
        r -= TWO_PI
    return r


def _require_finite(owner: str, **fields: float) -> None:
    for name, value in fields.items():
        if not isinstance(value, (int, float)) or isinstance(value, bool) or not math.isfinite(value):
            raise ValueError(f"{owner}.{name} must be a finite number, got {value!r}")


@dataclass(frozen=True)
class Pose:
    """Position (m) plus heading (rad) in the inertial frame."""

    x: float
    y: float
    z: float
    yaw: float = 0.0

    def __post_init__(self):
        _require_finite("Pose", x=self.x, y=self.y, z=self.z, yaw=self.yaw)
        object.__setattr__(self, "x", float(self.x))
        object.__setattr__(self, "y", float(self.y))
        object.__setattr__(self, "z", float(self.z))
        object.__setattr__(self, "yaw", wrap_angle(float(self.yaw)))

    @property
    def position(self) -> tuple[float, float, float]:
        return (self.x, self.y, self.z)


@dataclass(frozen=True)
class BodyVector:
    """A vector along the vehicle's body axes (u forward, v left)."""

    u: float
    v: float

    def __post_init__(self):
        _require_finite("BodyVector", u=self.u, v=self.v)
        object.__setattr__(self, "u", float(self.u))
        object.__setattr__(self, "v", float(self.v))


def body_to_inertial(vec: BodyVector, yaw: float) -> tuple[float, float]:
    """Rotate a body-frame vector into the inertial frame."""
    if not math.isfinite(yaw):
        raise ValueError(f"yaw must be finite, got {yaw!r}")
    c, s = math.cos(yaw), math.sin(yaw)
    return (vec.u * c - vec.v * s, vec.u * s + vec.v * c)


def inertial_to_body(vec: tuple[float, float], yaw: float) -> BodyVector:
    """Rotate an inertial-frame (x, y) vector into the body frame."""
    if not math.isfinite(yaw):
        raise ValueError(f"yaw must be finite, got {yaw!r}")
    x, y = vec
    _require_finite("vector", x=x, y=y)
    c, s = math.cos(yaw), math.sin(yaw)
    return BodyVector(x * c + y * s, -x * s + y * c)


@dataclass(frozen=True)
class GripOffset:
    """Rigid offset of a held object, expressed in the hand frame at grab time."""

    dx: float
    dy: float
    dz: float
    dyaw: float

    def __post_init__(self):
        _require_finite("GripOffset", dx=self.dx, dy=self.dy, dz=self.dz, dyaw=self.dyaw)
        object.__setattr__(self, "dyaw", wrap_angle(float(self.dyaw)))


def grip_capture(hand: Pose, held: Pose) -> GripOffset:
    """Record the held object's pose relative to the hand."""
    rel = inertial_to_body((held.x - hand.x, held.y - hand.y), hand.yaw)
    return GripOffset(rel.u, rel.v, held.z - hand.z, wrap_angle(held.yaw - hand.yaw))


def grip_apply(hand: Pose, grip: GripOffset) -> Pose:
    """Place the held object rigidly relative to the current hand pose."""
    ox, oy = body_to_inertial(BodyVector(grip.dx, grip.dy), hand.yaw)
    return Pose(hand.x + ox, hand.y + oy, hand.z + grip.dz, wrap_angle(hand.yaw + grip.dyaw))

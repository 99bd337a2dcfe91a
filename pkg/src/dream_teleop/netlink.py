"""Simulated one-way message links between the control room and the flight room.

Each channel applies a base latency, optional seeded uniform jitter, and an
optional drop probability. Delivery is strictly in order (a late draw never
overtakes an earlier message). The phantom state tracks the last delivered
pose of the real vehicle and how stale it is.
"""

from __future__ import annotations

import math
import random
from collections import deque
from dataclasses import dataclass, replace
from typing import Any

from .errors import ConfigurationError
from .geometry import Pose


@dataclass(frozen=True)
class Stamped:
    """A payload tagged with the simulation time it was produced."""

    t: float
    payload: Any


class Channel:
    """Unidirectional latent pipe carrying stamped messages."""

    def __init__(
        self,
        latency: float = 0.06,
        jitter: float = 0.0,
        drop: float = 0.0,
        seed: int | str = 0,
    ):
        if not (math.isfinite(latency) and latency >= 0):
            raise ConfigurationError(f"latency must be >= 0, got {latency!r}")
        if not (math.isfinite(jitter) and jitter >= 0):
            raise ConfigurationError(f"jitter must be >= 0, got {jitter!r}")
        if not (math.isfinite(drop) and 0.0 <= drop < 1.0):
            raise ConfigurationError(f"drop must be in [0, 1), got {drop!r}")
        self.latency = latency
        self.jitter = jitter
        self.drop = drop
        self._rng = random.Random(seed)
        self._queue: deque[tuple[float, Stamped]] = deque()
        self._last_send = -math.inf
        self._last_poll = -math.inf
        self._last_deliver_at = -math.inf
        self.sent = 0
        self.dropped = 0
        self.delivered = 0

    def send(self, msg: Stamped, now: float) -> None:
        """Enqueue a message; it may be dropped or jittered, never reordered."""
        if not math.isfinite(now):
            raise ValueError(f"clock must be finite, got {now!r}")
        if now < self._last_send:
            raise ValueError(f"non-monotone clock: send at {now} after {self._last_send}")
        self._last_send = now
        self.sent += 1
        if self.drop > 0.0 and self._rng.random() < self.drop:
            self.dropped += 1
            return
        j = self._rng.uniform(-self.jitter, self.jitter) if self.jitter > 0.0 else 0.0
        deliver_at = max(now + self.latency + j, now, self._last_deliver_at)
        self._last_deliver_at = deliver_at
        self._queue.append((deliver_at, msg))

    def poll(self, now: float) -> list[Stamped]:
        """Return every message due by `now`, each exactly once, in send order."""
        if not math.isfinite(now):
            raise ValueError(f"clock must be finite, got {now!r}")
        if now < self._last_poll:
            raise ValueError(f"non-monotone clock: poll at {now} after {self._last_poll}")
        self._last_poll = now
        out: list[Stamped] = []
        while self._queue and self._queue[0][0] <= now:
            out.append(self._queue.popleft()[1])
        self.delivered += len(out)
        return out

    @property
    def pending(self) -> int:
        return len(self._queue)


@dataclass(frozen=True)
class PhantomState:
    """Last known pose of the real vehicle, as seen across the feedback link."""

    pose: Pose
    sample_time: float
    staleness: float = 0.0

    @classmethod
    def initial(cls, pose: Pose, t: float = 0.0) -> "PhantomState":
        return cls(pose=pose, sample_time=t, staleness=0.0)


def update_phantom(phantom: PhantomState, delivered: list[Stamped], now: float) -> PhantomState:
    """Advance the phantom with whatever feedback arrived this tick."""
    if delivered:
        latest = max(delivered, key=lambda m: m.t)
        return PhantomState(pose=latest.payload, sample_time=latest.t, staleness=now - latest.t)
    return replace(phantom, staleness=now - phantom.sample_time)

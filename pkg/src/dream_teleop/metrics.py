"""Navigation-task geometry and the journey evaluation pipeline.

A journey is one traversal between the two endpoints of the task path,
timed from the end of a detected stop at one endpoint to the start of the
sustained stop at the other. Per journey the pipeline reports the mean
unsigned cross-track distance to the path (lateral error), the mean
magnitude of the heading error against the bearing to the target, and the
stop-to-stop completion time; aggregates are unweighted means over journeys
(a sample-pooled mode is available).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .errors import ConfigurationError, EmptyReportError, UndefinedBearingError
from .geometry import wrap_angle
from .logstore import FlightLog, LogSample

Point = tuple[float, float, float]


@dataclass(frozen=True)
class TaskGeometry:
    """Endpoints, checkpoint, and yaw target of the navigation task."""

    start: Point = (0.0, -2.0, 1.0)
    arrival: Point = (0.0, 2.0, 1.0)
    checkpoint: Point = (0.0, 0.0, 1.0)
    target: Point = (5.0, 0.0, 1.0)
    altitude: float = 1.0
    window_halfwidth: float = 0.5

    def __post_init__(self):
        for name in ("start", "arrival", "checkpoint", "target"):
            p = getattr(self, name)
            if not (isinstance(p, tuple) and len(p) == 3 and all(math.isfinite(v) for v in p)):
                raise ConfigurationError(f"geometry.{name} must be 3 finite coordinates, got {p!r}")
        if not (math.isfinite(self.altitude) and self.altitude > 0):
            raise ConfigurationError(f"geometry.altitude must be > 0, got {self.altitude!r}")
        if not (math.isfinite(self.window_halfwidth) and self.window_halfwidth > 0):
            raise ConfigurationError(f"geometry.window_halfwidth must be > 0, got {self.window_halfwidth!r}")
        sx, sy, _ = self.start
        ax, ay, _ = self.arrival
        if math.hypot(ax - sx, ay - sy) <= 1e-9:
            raise ConfigurationError("geometry.start and geometry.arrival must differ in the horizontal plane")
        if self._point_to_segment_2d(self.target[:2]) <= 1e-9:
            raise ConfigurationError("geometry.target must not lie on the start-arrival segment")

    def _point_to_segment_2d(self, p: tuple[float, float]) -> float:
        sx, sy, _ = self.start
        ax, ay, _ = self.arrival
        dx, dy = ax - sx, ay - sy
        t = ((p[0] - sx) * dx + (p[1] - sy) * dy) / (dx * dx + dy * dy)
        t = min(max(t, 0.0), 1.0)
        return math.hypot(p[0] - (sx + t * dx), p[1] - (sy + t * dy))

    def to_dict(self) -> dict:
        return {
            "start": list(self.start),
            "arrival": list(self.arrival),
            "checkpoint": list(self.checkpoint),
            "target": list(self.target),
            "altitude": self.altitude,
            "window_halfwidth": self.window_halfwidth,
        }

    @classmethod
    def from_dict(cls, d: dict, where: str = "geometry") -> "TaskGeometry":
        if not isinstance(d, dict):
            raise ConfigurationError(f"{where} must be an object, got {d!r}")
        kwargs = {}
        for name in ("start", "arrival", "checkpoint", "target"):
            if name not in d:
                raise ConfigurationError(f"{where}.{name}: required")
            p = d[name]
            if not (isinstance(p, (list, tuple)) and len(p) == 3):
                raise ConfigurationError(f"{where}.{name} must have 3 coordinates, got {p!r}")
            kwargs[name] = tuple(float(v) for v in p)
        if "altitude" in d:
            kwargs["altitude"] = float(d["altitude"])
        if "window_halfwidth" in d:
            kwargs["window_halfwidth"] = float(d["window_halfwidth"])
        return cls(**kwargs)


@dataclass(frozen=True)
class StopParams:
    """What counts as a stop: slow enough, near an endpoint, long enough."""

    v_stop: float = 0.05
    dwell_s: float = 0.5
    radius_m: float = 0.3

    def __post_init__(self):
        for name in ("v_stop", "dwell_s", "radius_m"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v > 0):
                raise ConfigurationError(f"stop.{name} must be > 0, got {v!r}")

    def to_dict(self) -> dict:
        return {"v_stop": self.v_stop, "dwell_s": self.dwell_s, "radius_m": self.radius_m}

    @classmethod
    def from_dict(cls, d: dict, where: str = "stop") -> "StopParams":
        if not isinstance(d, dict):
            raise ConfigurationError(f"{where} must be an object, got {d!r}")
        kwargs = {k: float(d[k]) for k in ("v_stop", "dwell_s", "radius_m") if k in d}
        return cls(**kwargs)


def reference_yaw(p: tuple[float, float], target: tuple[float, float]) -> float:
    """Bearing from a point to the yaw target, in (-pi, pi]."""
    dx, dy = target[0] - p[0], target[1] - p[1]
    if dx == 0.0 and dy == 0.0:
        raise UndefinedBearingError(f"bearing undefined: point coincides with target {target!r}")
    return wrap_angle(math.atan2(dy, dx))


def lateral_error(
    p: tuple[float, float], start: tuple[float, float], arrival: tuple[float, float], signed: bool = False
) -> float:
    """Perpendicular distance (m) from a point to the infinite path line."""
    sx, sy = start[:2]
    ax, ay = arrival[:2]
    dx, dy = ax - sx, ay - sy
    norm = math.hypot(dx, dy)
    if norm <= 1e-12:
        raise ConfigurationError("path endpoints coincide; lateral error undefined")
    cross = dx * (p[1] - sy) - dy * (p[0] - sx)
    value = cross / norm
    return value if signed else abs(value)


def yaw_error(yaw_observed: float, p: tuple[float, float], target: tuple[float, float]) -> float:
    """|observed - reference| heading error in [0, pi]."""
    return abs(wrap_angle(yaw_observed - reference_yaw(p, target)))


@dataclass(frozen=True)
class Journey:
    """One stop-to-stop traversal of the task path."""

    direction: str  # "S->A" or "A->S"
    departure_s: float
    arrival_s: float
    samples: tuple[LogSample, ...]  # departure through dwell confirmation
    lateral_mean_m: float
    yaw_mean_rad: float
    n_metric_samples: int
    lateral_sum_m: float
    yaw_sum_rad: float

    @property
    def completion_s(self) -> float:
        return self.arrival_s - self.departure_s

    def to_dict(self) -> dict:
        return {
            "direction": self.direction,
            "departure_s": self.departure_s,
            "arrival_s": self.arrival_s,
            "completion_s": self.completion_s,
            "lateral_mean_m": self.lateral_mean_m,
            "yaw_mean_rad": self.yaw_mean_rad,
            "n_metric_samples": self.n_metric_samples,
        }


def _journey_metrics(
    samples: list[LogSample], departure: float, arrival: float, geom: TaskGeometry
) -> tuple[float, float, int, float, float]:
    lat_sum = 0.0
    yaw_sum = 0.0
    n = 0
    for s in samples:
        if departure <= s.t <= arrival:
            lat_sum += lateral_error((s.x, s.y), geom.start[:2], geom.arrival[:2])
            yaw_sum += yaw_error(s.yaw, (s.x, s.y), geom.target[:2])
            n += 1
    return (lat_sum / n, yaw_sum / n, n, lat_sum, yaw_sum)


def segment_journeys(log: FlightLog, geom: TaskGeometry, stop: StopParams | None = None) -> list[Journey]:
    """Extract completed stop-to-stop traversals from a flight log.

    Departure is the last at-rest sample before speed first exceeds the stop
    speed; arrival is the first sample of the sustained stop window at the
    other endpoint. Incomplete traversals (no confirmed closing stop, or a
    return to the origin endpoint) are discarded.
    """
    stop = stop or StopParams()
    samples = log.samples
    for i in range(1, len(samples)):
        if samples[i].t <= samples[i - 1].t:
            raise ValueError(f"log timestamps must be strictly increasing at index {i}")

    endpoints = {"S": geom.start[:2], "A": geom.arrival[:2]}

    def stopped_at(s: LogSample) -> str | None:
        if s.speed >= stop.v_stop:
            return None
        for name, (ex, ey) in endpoints.items():
            if math.hypot(s.x - ex, s.y - ey) <= stop.radius_m:
                return name
        return None

    journeys: list[Journey] = []
    armed_at: str | None = None  # endpoint with a confirmed stop, awaiting departure
    armed_window_idx = 0  # first sample of that confirmed stop window
    open_from: str | None = None  # origin endpoint of the traversal in progress
    open_window_idx = 0
    departure_t = 0.0
    window_endpoint: str | None = None
    window_start_t = 0.0
    window_start_idx = 0

    for i, s in enumerate(samples):
        here = stopped_at(s)
        if here is None:
            window_endpoint = None
            if armed_at is not None and open_from is None and s.speed > stop.v_stop:
                # Departure: the previous sample was the last one at rest.
                open_from = armed_at
                open_window_idx = armed_window_idx
                departure_t = samples[max(i - 1, 0)].t
                armed_at = None
            continue

        if window_endpoint != here:
            window_endpoint = here
            window_start_t = s.t
            window_start_idx = i
        if s.t - window_start_t >= stop.dwell_s:
            # Sustained stop confirmed at `here`, first confirmed at this sample.
            if open_from is not None:
                if here != open_from:
                    # Carry the opening stop window too, so the extracted
                    # journey re-segments to the same boundaries.
                    body = list(samples[open_window_idx : i + 1])
                    lat_mean, yaw_mean, n, lat_sum, yaw_sum = _journey_metrics(
                        body, departure_t, window_start_t, geom
                    )
                    journeys.append(
                        Journey(
                            direction=f"{open_from}->{here}",
                            departure_s=departure_t,
                            arrival_s=window_start_t,
                            samples=tuple(body),
                            lateral_mean_m=lat_mean,
                            yaw_mean_rad=yaw_mean,
                            n_metric_samples=n,
                            lateral_sum_m=lat_sum,
                            yaw_sum_rad=yaw_sum,
                        )
                    )
                open_from = None
            armed_at = here
            armed_window_idx = window_start_idx

    return journeys


@dataclass(frozen=True)
class JourneyReport:
    """Aggregate journey metrics; means are unweighted over journeys."""

    mle_m: float
    mye_rad: float
    mct_s: float
    n_journeys: int
    journeys: tuple[Journey, ...]
    label: str = ""
    pooled: bool = False

    def to_dict(self) -> dict:
        return {
            "label": self.label,
            "mle_m": self.mle_m,
            "mye_rad": self.mye_rad,
            "mct_s": self.mct_s,
            "n_journeys": self.n_journeys,
            "pooled": self.pooled,
            "per_journey": [j.to_dict() for j in self.journeys],
        }


def aggregate(journeys: list[Journey], label: str = "", pooled: bool = False) -> JourneyReport:
    """Combine per-journey metrics into one report."""
    if not journeys:
        raise EmptyReportError("no completed journeys to aggregate")
    n = len(journeys)
    if pooled:
        total = sum(j.n_metric_samples for j in journeys)
        mle = sum(j.lateral_sum_m for j in journeys) / total
        mye = sum(j.yaw_sum_rad for j in journeys) / total
    else:
        mle = sum(j.lateral_mean_m for j in journeys) / n
        mye = sum(j.yaw_mean_rad for j in journeys) / n
    mct = sum(j.completion_s for j in journeys) / n
    return JourneyReport(
        mle_m=mle, mye_rad=mye, mct_s=mct, n_journeys=n, journeys=tuple(journeys), label=label, pooled=pooled
    )


def analyze_log(
    log: FlightLog,
    geom: TaskGeometry | None = None,
    stop: StopParams | None = None,
    label: str = "",
    pooled: bool = False,
) -> JourneyReport:
    """Segment a log and aggregate its journeys in one call."""
    if geom is None:
        if log.header.geometry is None:
            raise ConfigurationError("log has no geometry header; pass one explicitly")
        geom = TaskGeometry.from_dict(log.header.geometry)
    return aggregate(segment_journeys(log, geom, stop), label=label, pooled=pooled)


_METRICS = ("mle_m", "mye_rad", "mct_s")


@dataclass(frozen=True)
class ConditionComparison:
    label_a: str
    label_b: str
    metrics: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {"a": self.label_a, "b": self.label_b, "metrics": self.metrics}


def compare_conditions(a: JourneyReport, b: JourneyReport) -> ConditionComparison:
    """Differences (a - b) and ratios (a / b) per metric."""
    if a.n_journeys == 0 or b.n_journeys == 0:
        raise EmptyReportError("cannot compare empty reports")
    metrics = {}
    for name in _METRICS:
        va, vb = getattr(a, name), getattr(b, name)
        metrics[name] = {
            "a": va,
            "b": vb,
            "difference": va - vb,
            "ratio": va / vb if vb != 0.0 else math.inf,
        }
    return ConditionComparison(label_a=a.label or "a", label_b=b.label or "b", metrics=metrics)

"""Rule hierarchy turning road features into a reference velocity profile."""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

from .route import DiscretizedRoute, RoadFeatures

EDGE_POSITION_EPS = 1e-6


class LimitType(Enum):
    DEFAULT = 1
    CURVE = 2
    STOP = 3


@dataclass(frozen=True)
class ReferencePoint:
    arc_length: float
    v_ref: float  # m/s
    limit_type: LimitType


@dataclass(frozen=True)
class RuleThresholds:
    heading_change_threshold: float = 60.0  # degrees
    # curvature is heading change per edge meter (deg/m); 2.0 puts a 90-degree
    # corner over a ~30 m urban edge above the line and gentle arcs below it
    curvature_threshold: float = 2.0
    stop_coalesce_window_m: float = 2.0

    def __post_init__(self):
        if self.heading_change_threshold <= 0 or self.curvature_threshold <= 0:
            raise ValueError("rule thresholds must be positive")


def classify_node(f: RoadFeatures, t: RuleThresholds) -> tuple[float, LimitType]:
    """Apply the priority rules to one node; first matching rule wins."""
    if f.traffic_signal or f.stop_sign or f.yield_sign:
        return 0.0, LimitType.STOP
    at_entry = abs(f.edge_position) <= EDGE_POSITION_EPS
    at_exit = abs(f.edge_position - 1.0) <= EDGE_POSITION_EPS
    if (at_entry or at_exit) and f.heading_change > t.heading_change_threshold:
        return 0.0, LimitType.STOP
    if f.curvature > t.curvature_threshold:
        return f.avg_edge_speed, LimitType.CURVE
    return f.speed_limit, LimitType.DEFAULT


def build_reference_profile(
    route: DiscretizedRoute, t: RuleThresholds
) -> list[ReferencePoint]:
    """One ReferencePoint per route step, straight from classify_node."""
    if not route.has_features():
        raise ValueError("route has no features attached")
    profile = []
    for step in route.steps:
        v_ref, limit_type = classify_node(step.features, t)
        profile.append(ReferencePoint(step.arc_length, v_ref, limit_type))
    return profile


def coalesce_stop_events(
    profile: list[ReferencePoint], window_m: float = 2.0
) -> list[ReferencePoint]:
    """Merge runs of Stop points closer than window_m into single stop events.

    One physical intersection usually marks several adjacent 1 m nodes; the
    controller should brake for it once.  The representative event sits at the
    centre of each run.
    """
    stops = [p for p in profile if p.limit_type is LimitType.STOP]
    if not stops:
        return []
    events = []
    cluster = [stops[0]]
    for p in stops[1:]:
        if p.arc_length - cluster[-1].arc_length <= window_m:
            cluster.append(p)
        else:
            events.append(_cluster_event(cluster))
            cluster = [p]
    events.append(_cluster_event(cluster))
    return events


def _cluster_event(cluster: list[ReferencePoint]) -> ReferencePoint:
    mid = 0.5 * (cluster[0].arc_length + cluster[-1].arc_length)
    return ReferencePoint(mid, 0.0, LimitType.STOP)


def curve_events(profile: list[ReferencePoint]) -> list[ReferencePoint]:
    """One event per contiguous Curve run, placed at the run entry.

    The event speed is the slowest reference inside the run, so the controller
    decelerates enough for the whole curve.
    """
    events = []
    in_run = False
    start = None
    v_min = float("inf")
    for p in profile:
        if p.limit_type is LimitType.CURVE:
            if not in_run:
                in_run, start, v_min = True, p.arc_length, p.v_ref
            else:
                v_min = min(v_min, p.v_ref)
        elif in_run:
            events.append(ReferencePoint(start, v_min, LimitType.CURVE))
            in_run = False
    if in_run:
        events.append(ReferencePoint(start, v_min, LimitType.CURVE))
    return events

"""Route geometry: GeoJSON parsing, 1 m discretization, feature attachment."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, replace
from enum import IntEnum
from typing import Optional, Sequence

import numpy as np

EARTH_RADIUS_M = 6371000.0

# Arc-length deltas are 1.0 m except possibly the final partial step.
STEP_M = 1.0
ARC_EPS = 1e-6


class RouteError(ValueError):
    """Raised for malformed route input or broken feature coverage."""


class EdgeClass(IntEnum):
    """Road class as reported by the routing engine, ordered by importance."""

    motorway = 0
    trunk = 1
    primary = 2
    secondary = 3
    tertiary = 4
    unclassified = 5
    residential = 6
    service_other = 7

    @classmethod
    def from_name(cls, name: str) -> "EdgeClass":
        try:
            return cls[name]
        except KeyError:
            return cls.unclassified


@dataclass(frozen=True)
class GeoPoint:
    lat: float  # degrees, [-90, 90]
    lon: float  # degrees, [-180, 180]

    def __post_init__(self):
        if not (math.isfinite(self.lat) and math.isfinite(self.lon)):
            raise RouteError(f"non-finite coordinate ({self.lat}, {self.lon})")
        if not (-90.0 <= self.lat <= 90.0):
            raise RouteError(f"latitude out of range: {self.lat}")
        if not (-180.0 <= self.lon <= 180.0):
            raise RouteError(f"longitude out of range: {self.lon}")


@dataclass(frozen=True)
class RoadFeatures:
    """Per-point road attributes, SI units (speeds in m/s, grade in percent)."""

    speed_limit: float = 0.0
    avg_edge_speed: float = 0.0
    curvature: float = 0.0  # heading change per meter of edge, deg/m
    grade: float = 0.0  # percent, signed
    elevation: float = 0.0  # m
    heading: float = 0.0  # degrees [0, 360)
    heading_change: float = 0.0  # degrees >= 0
    edge_position: float = 0.0  # fraction along matched edge [0, 1]
    traffic_signal: bool = False
    stop_sign: bool = False
    yield_sign: bool = False
    roundabout: bool = False
    link: bool = False
    edge_class: EdgeClass = EdgeClass.unclassified


@dataclass(frozen=True)
class RouteStep:
    position: GeoPoint
    arc_length: float  # m from route start
    features: Optional[RoadFeatures] = None


@dataclass
class DiscretizedRoute:
    steps: list[RouteStep]
    total_length: float

    def __len__(self) -> int:
        return len(self.steps)

    @property
    def arc_lengths(self) -> np.ndarray:
        return np.array([s.arc_length for s in self.steps])

    def has_features(self) -> bool:
        return all(s.features is not None for s in self.steps)


def parse_route_geojson(document: bytes | str) -> list[GeoPoint]:
    """Extract the first LineString from a GeoJSON Feature/FeatureCollection.

    GeoJSON stores [lon, lat]; the returned GeoPoints are (lat, lon).
    """
    try:
        obj = json.loads(document)
    except (json.JSONDecodeError, UnicodeDecodeError) as exc:
        raise RouteError(f"malformed GeoJSON document: {exc}") from exc
    if not isinstance(obj, dict):
        raise RouteError("malformed GeoJSON document: not an object")

    coords = _find_linestring(obj)
    if coords is None:
        raise RouteError("no LineString geometry in document")
    if len(coords) < 2:
        raise RouteError("LineString has fewer than 2 coordinates")
    points = []
    for c in coords:
        if not isinstance(c, (list, tuple)) or len(c) < 2:
            raise RouteError(f"malformed coordinate entry: {c!r}")
        lon, lat = float(c[0]), float(c[1])
        points.append(GeoPoint(lat=lat, lon=lon))
    return points


def _find_linestring(obj: dict) -> Optional[list]:
    kind = obj.get("type")
    if kind == "LineString":
        return obj.get("coordinates")
    if kind == "Feature":
        geom = obj.get("geometry") or {}
        if geom.get("type") == "LineString":
            return geom.get("coordinates")
        return None
    if kind == "FeatureCollection":
        for feature in obj.get("features", []):
            if isinstance(feature, dict):
                found = _find_linestring(feature)
                if found is not None:
                    return found
    return None


def haversine_distance(p: GeoPoint, q: GeoPoint) -> float:
    """Great-circle distance in meters, R = 6371000 m."""
    lat1, lat2 = math.radians(p.lat), math.radians(q.lat)
    dlat = lat2 - lat1
    dlon = math.radians(q.lon - p.lon)
    a = math.sin(dlat / 2) ** 2 + math.cos(lat1) * math.cos(lat2) * math.sin(dlon / 2) ** 2
    return 2.0 * EARTH_RADIUS_M * math.asin(min(1.0, math.sqrt(a)))


def discretize_route(polyline: Sequence[GeoPoint]) -> DiscretizedRoute:
    """Resample a polyline to steps at 0, 1, 2, ... m of arc length.

    Positions between vertices are linear in lat/lon; arc length is the
    haversine sum over the original segments.  A final partial step (< 1 m)
    is kept so total_length matches the polyline.
    """
    if len(polyline) < 2:
        raise RouteError("polyline needs at least 2 points")

    seg_len = [haversine_distance(polyline[i], polyline[i + 1]) for i in range(len(polyline) - 1)]
    cum = [0.0]
    for d in seg_len:
        cum.append(cum[-1] + d)
    total = cum[-1]
    if total < STEP_M:
        raise RouteError(f"degenerate polyline: total length {total:.3f} m < 1 m")

    targets = [float(k) for k in range(int(math.floor(total + ARC_EPS)) + 1)]
    if total - targets[-1] > ARC_EPS:
        targets.append(total)

    steps: list[RouteStep] = []
    seg = 0
    for target in targets:
        while seg < len(seg_len) - 1 and cum[seg + 1] < target:
            seg += 1
        length = seg_len[seg]
        frac = 0.0 if length <= 0 else (target - cum[seg]) / length
        frac = min(1.0, max(0.0, frac))
        a, b = polyline[seg], polyline[seg + 1]
        pos = GeoPoint(lat=a.lat + frac * (b.lat - a.lat), lon=a.lon + frac * (b.lon - a.lon))
        steps.append(RouteStep(position=pos, arc_length=min(target, total)))

    return DiscretizedRoute(steps=steps, total_length=total)


def _circular_interp(h0: float, h1: float, w: float) -> float:
    """Interpolate headings along the shortest angular path; result in [0, 360)."""
    delta = (h1 - h0 + 180.0) % 360.0 - 180.0
    return (h0 + w * delta) % 360.0


def circular_difference(h0: float, h1: float) -> float:
    """Absolute angular difference in degrees, always in [0, 180]."""
    return abs((h1 - h0 + 180.0) % 360.0 - 180.0)


_INTERPOLATED = ("elevation", "grade", "speed_limit", "avg_edge_speed", "curvature")


def attach_features(
    route: DiscretizedRoute,
    per_node_features: Sequence[tuple[float, RoadFeatures]],
    max_gap_m: float = 50.0,
) -> DiscretizedRoute:
    """Assign features to every step from sparse (arc_length, RoadFeatures) nodes.

    Continuous fields are linearly interpolated (heading on the circle);
    boolean flags and edge_class come from the nearest source node.
    """
    if not per_node_features:
        raise RouteError("empty feature list")
    arcs = [a for a, _ in per_node_features]
    if any(arcs[i] > arcs[i + 1] for i in range(len(arcs) - 1)):
        raise RouteError("per-node features not sorted by arc_length")

    gaps = [arcs[0] - 0.0] + [arcs[i + 1] - arcs[i] for i in range(len(arcs) - 1)]
    gaps.append(route.total_length - arcs[-1])
    worst = max(gaps)
    if worst > max_gap_m:
        raise RouteError(f"feature coverage gap {worst:.1f} m exceeds max {max_gap_m:.1f} m")

    feats = [f for _, f in per_node_features]
    new_steps = []
    j = 0
    for step in route.steps:
        s = step.arc_length
        while j < len(arcs) - 2 and arcs[j + 1] < s:
            j += 1
        lo, hi = j, min(j + 1, len(arcs) - 1)
        if s <= arcs[0]:
            merged = feats[0]
        elif s >= arcs[-1]:
            merged = feats[-1]
        else:
            span = arcs[hi] - arcs[lo]
            w = 0.0 if span <= 0 else (s - arcs[lo]) / span
            nearest = feats[lo] if w <= 0.5 else feats[hi]
            values = {
                name: (1.0 - w) * getattr(feats[lo], name) + w * getattr(feats[hi], name)
                for name in _INTERPOLATED
            }
            merged = replace(
                nearest,
                heading=_circular_interp(feats[lo].heading, feats[hi].heading, w),
                heading_change=(1.0 - w) * feats[lo].heading_change + w * feats[hi].heading_change,
                edge_position=(1.0 - w) * feats[lo].edge_position + w * feats[hi].edge_position,
                **values,
            )
        new_steps.append(RouteStep(position=step.position, arc_length=s, features=merged))

    return DiscretizedRoute(steps=new_steps, total_length=route.total_length)


def resample_trace_to_meters(
    distance: np.ndarray,
    velocity: np.ndarray,
    acceleration: np.ndarray,
    route: DiscretizedRoute,
) -> tuple[np.ndarray, np.ndarray]:
    """Sample a (distance, velocity, acceleration) trace at every route step.

    Linear interpolation in distance; where the trace revisits the same
    distance (standstill) the last sample wins.
    """
    distance = np.asarray(distance, dtype=float)
    velocity = np.asarray(velocity, dtype=float)
    acceleration = np.asarray(acceleration, dtype=float)
    if distance.size < 2:
        raise RouteError("trace too short to resample")
    if distance[-1] < route.total_length - ARC_EPS:
        raise RouteError(
            f"trace spans {distance[-1]:.2f} m, shorter than route {route.total_length:.2f} m"
        )

    # keep the last sample at each distinct distance so stops read as v = 0
    keep = np.ones(distance.size, dtype=bool)
    keep[:-1] = np.diff(distance) > 0
    d, v, a = distance[keep], velocity[keep], acceleration[keep]

    arcs = route.arc_lengths
    return np.interp(arcs, d, v), np.interp(arcs, d, a)

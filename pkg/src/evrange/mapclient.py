"""Road attribute retrieval from a Valhalla-compatible engine, plus an
offline fixture provider so tests and demo runs need no network.

Wire contract (see README): POST {base}/locate and {base}/trace_attributes
return a JSON array with one attribute object per request point; POST
{base}/height returns {"height": [...]}.  Speeds on the wire are km/h and
are converted to m/s on ingest.
"""

from __future__ import annotations

import json
import math
import os
import threading
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Optional, Sequence

import numpy as np
import requests

from .route import (
    EdgeClass,
    GeoPoint,
    RoadFeatures,
    circular_difference,
    haversine_distance,
)

KMH_TO_MS = 1.0 / 3.6

ENDPOINT_PATHS = {
    "locate": "/locate",
    "trace_attributes": "/trace_attributes",
    "height": "/height",
}

PRIMARY_URL_ENV = "EVRANGE_PRIMARY_URL"
FALLBACK_URL_ENV = "EVRANGE_FALLBACK_URL"


class MapClientError(RuntimeError):
    pass


@dataclass(frozen=True)
class EndpointConfig:
    primary_base_url: str = "http://localhost:8002"
    fallback_base_url: str = "https://valhalla1.openstreetmap.de"
    batch_size: int = 100
    max_parallel_requests: int = 4
    timeout: float = 30.0
    retry_count: int = 2

    def __post_init__(self):
        if not self.primary_base_url or not self.fallback_base_url:
            raise ValueError("endpoint URLs must be non-empty")
        if self.batch_size < 1 or self.max_parallel_requests < 1:
            raise ValueError("batch_size and max_parallel_requests must be >= 1")
        if self.timeout <= 0 or self.retry_count < 0:
            raise ValueError("timeout must be > 0 and retry_count >= 0")

    def with_env_overrides(self) -> "EndpointConfig":
        primary = os.environ.get(PRIMARY_URL_ENV, self.primary_base_url)
        fallback = os.environ.get(FALLBACK_URL_ENV, self.fallback_base_url)
        if primary == self.primary_base_url and fallback == self.fallback_base_url:
            return self
        return EndpointConfig(
            primary_base_url=primary,
            fallback_base_url=fallback,
            batch_size=self.batch_size,
            max_parallel_requests=self.max_parallel_requests,
            timeout=self.timeout,
            retry_count=self.retry_count,
        )


@dataclass
class RawAttributeRecord:
    lat: float
    lon: float
    attributes: dict = field(default_factory=dict)


def _default_transport(url: str, body: dict, timeout: float):
    return requests.post(url, json=body, timeout=timeout)


def _build_body(kind: str, points: Sequence[GeoPoint]) -> dict:
    coords = [{"lat": p.lat, "lon": p.lon} for p in points]
    if kind == "locate":
        return {"locations": coords, "verbose": True}
    if kind == "trace_attributes":
        return {"shape": coords, "shape_match": "map_snap", "costing": "auto"}
    if kind == "height":
        return {"shape": coords}
    raise MapClientError(f"unknown endpoint kind '{kind}'")


def _parse_response(kind: str, payload, points: Sequence[GeoPoint]) -> list[RawAttributeRecord]:
    if kind == "height":
        heights = payload.get("height") if isinstance(payload, dict) else None
        if heights is None or len(heights) != len(points):
            raise MapClientError("height response does not match request points")
        return [
            RawAttributeRecord(p.lat, p.lon, {"elevation": float(h)})
            for p, h in zip(points, heights)
        ]
    entries = payload.get("points") if isinstance(payload, dict) else payload
    if not isinstance(entries, list) or len(entries) != len(points):
        raise MapClientError(f"{kind} response does not match request points")
    records = []
    for p, entry in zip(points, entries):
        if not isinstance(entry, dict):
            raise MapClientError(f"{kind} response entry is not an object")
        attrs = dict(entry)
        lat = float(attrs.pop("lat", p.lat))
        lon = float(attrs.pop("lon", p.lon))
        records.append(RawAttributeRecord(lat, lon, attrs))
    return records


class HttpAttributeClient:
    """Batched, parallel attribute fetcher with retry and fallback."""

    def __init__(
        self,
        cfg: EndpointConfig,
        transport: Optional[Callable] = None,
    ):
        self.cfg = cfg.with_env_overrides()
        self._transport = transport or _default_transport
        self.diagnostics: list[dict] = []
        self._lock = threading.Lock()

    def _note(self, **event) -> None:
        with self._lock:
            self.diagnostics.append(event)

    def _post_batch(self, kind: str, points: Sequence[GeoPoint], batch_index: int):
        body = _build_body(kind, points)
        path = ENDPOINT_PATHS[kind]
        last_error: Optional[str] = None
        for role, base in (("primary", self.cfg.primary_base_url),
                           ("fallback", self.cfg.fallback_base_url)):
            url = base.rstrip("/") + path
            for attempt in range(self.cfg.retry_count + 1):
                try:
                    response = self._transport(url, body, self.cfg.timeout)
                    status = getattr(response, "status_code", 0)
                    if 200 <= status < 300:
                        if role == "fallback":
                            self._note(event="fallback_used", kind=kind, batch=batch_index)
                        return _parse_response(kind, response.json(), points)
                    last_error = f"HTTP {status} from {url}"
                except MapClientError:
                    raise
                except Exception as exc:  # connection errors, bad JSON
                    last_error = f"{type(exc).__name__}: {exc}"
                self._note(event="attempt_failed", kind=kind, batch=batch_index,
                           endpoint=role, attempt=attempt, error=last_error)
        raise MapClientError(
            f"{kind} batch {batch_index} failed on both endpoints: {last_error}"
        )

    def fetch(self, points: Sequence[GeoPoint], kind: str) -> list[RawAttributeRecord]:
        if not points:
            raise MapClientError("no points to fetch")
        if kind not in ENDPOINT_PATHS:
            raise MapClientError(f"unknown endpoint kind '{kind}'")
        size = self.cfg.batch_size
        batches = [points[i : i + size] for i in range(0, len(points), size)]
        results: list[Optional[list[RawAttributeRecord]]] = [None] * len(batches)
        with ThreadPoolExecutor(max_workers=self.cfg.max_parallel_requests) as pool:
            futures = {
                pool.submit(self._post_batch, kind, batch, i): i
                for i, batch in enumerate(batches)
            }
            for future, i in futures.items():
                results[i] = future.result()
        merged: list[RawAttributeRecord] = []
        for part in results:
            merged.extend(part)
        return merged


class FixtureAttributeClient:
    """Deterministic, network-free record source backed by a JSON fixture.

    The fixture is a JSON array of records {lat, lon, attributes}; each query
    point is answered by its nearest fixture record, so the same file serves
    all three endpoint kinds.
    """

    def __init__(self, path: str | Path, match_tolerance_m: float = 250.0):
        path = Path(path)
        if not path.exists():
            raise MapClientError(f"fixture not found: {path}")
        try:
            raw = json.loads(path.read_text())
        except json.JSONDecodeError as exc:
            raise MapClientError(f"corrupt fixture {path}: {exc}") from exc
        if not isinstance(raw, list) or not raw:
            raise MapClientError(f"fixture {path} must be a non-empty JSON array")
        self.records = [
            RawAttributeRecord(float(r["lat"]), float(r["lon"]), dict(r.get("attributes", {})))
            for r in raw
        ]
        self.match_tolerance_m = match_tolerance_m
        self.diagnostics: list[dict] = []

    def fetch(self, points: Sequence[GeoPoint], kind: str) -> list[RawAttributeRecord]:
        if kind not in ENDPOINT_PATHS:
            raise MapClientError(f"unknown endpoint kind '{kind}'")
        out = []
        for p in points:
            best = min(
                self.records,
                key=lambda r: haversine_distance(p, GeoPoint(r.lat, r.lon)),
            )
            dist = haversine_distance(p, GeoPoint(best.lat, best.lon))
            if dist > self.match_tolerance_m:
                raise MapClientError(
                    f"no fixture record within {self.match_tolerance_m} m of "
                    f"({p.lat:.5f}, {p.lon:.5f})"
                )
            out.append(RawAttributeRecord(p.lat, p.lon, dict(best.attributes)))
        return out


def fixture_provider(path: str | Path) -> FixtureAttributeClient:
    return FixtureAttributeClient(path)


def fetch_attributes(
    points: Sequence[GeoPoint],
    cfg: EndpointConfig,
    kind: str = "trace_attributes",
    transport: Optional[Callable] = None,
) -> list[RawAttributeRecord]:
    """One record per point from a single endpoint kind, order preserved."""
    return HttpAttributeClient(cfg, transport=transport).fetch(points, kind)


_FLAG_KEYS = ("traffic_signal", "stop_sign", "yield_sign", "roundabout", "link")


def merge_attribute_responses(
    locate: Sequence[RawAttributeRecord],
    trace: Sequence[RawAttributeRecord],
    height: Sequence[RawAttributeRecord],
    arc_lengths: Sequence[float],
) -> list[tuple[float, RoadFeatures]]:
    """Unify the three endpoint record streams into per-point RoadFeatures.

    Defaults for gaps: speed limit falls back to the average edge speed,
    missing elevation is interpolated from neighbours, missing flags are
    false, missing grade is derived from the elevation gradient.
    """
    n = len(arc_lengths)
    if not (len(locate) == len(trace) == len(height) == n):
        raise MapClientError(
            f"record length mismatch: locate={len(locate)} trace={len(trace)} "
            f"height={len(height)} arcs={n}"
        )
    if n == 0:
        raise MapClientError("no records to merge")

    combined = []
    for i in range(n):
        attrs: dict = {}
        attrs.update(locate[i].attributes)
        attrs.update(trace[i].attributes)
        attrs.update(height[i].attributes)
        combined.append(attrs)

    arcs = np.asarray(arc_lengths, dtype=float)
    elev = np.array([_as_float(a.get("elevation")) for a in combined])
    known = np.isfinite(elev)
    if known.any():
        elev = np.interp(arcs, arcs[known], elev[known])
    else:
        elev = np.zeros(n)

    grades = np.array([_as_float(a.get("grade")) for a in combined])
    if not np.isfinite(grades).all():
        derived = 100.0 * np.gradient(elev, arcs) if n > 1 else np.zeros(n)
        grades = np.where(np.isfinite(grades), grades, derived)

    merged: list[tuple[float, RoadFeatures]] = []
    prev_heading: Optional[float] = None
    for i, attrs in enumerate(combined):
        avg_speed = _as_float(attrs.get("speed"), 0.0) * KMH_TO_MS
        limit = _as_float(attrs.get("speed_limit"))
        limit = limit * KMH_TO_MS if math.isfinite(limit) else avg_speed
        heading = _as_float(attrs.get("heading"), 0.0) % 360.0
        change = 0.0 if prev_heading is None else circular_difference(prev_heading, heading)
        prev_heading = heading
        features = RoadFeatures(
            speed_limit=limit,
            avg_edge_speed=avg_speed,
            curvature=max(0.0, _as_float(attrs.get("curvature"), 0.0)),
            grade=float(grades[i]),
            elevation=float(elev[i]),
            heading=heading,
            heading_change=change,
            edge_position=min(1.0, max(0.0, _as_float(attrs.get("edge_position"), 0.5))),
            traffic_signal=bool(attrs.get("traffic_signal", False)),
            stop_sign=bool(attrs.get("stop_sign", False)),
            yield_sign=bool(attrs.get("yield_sign", False)),
            roundabout=bool(attrs.get("roundabout", False)),
            link=bool(attrs.get("link", False)),
            edge_class=EdgeClass.from_name(str(attrs.get("road_class", "unclassified"))),
        )
        merged.append((float(arcs[i]), features))
    return merged


def _as_float(value, default: float = math.nan) -> float:
    if value is None:
        return default
    try:
        out = float(value)
    except (TypeError, ValueError):
        return default
    return out if math.isfinite(out) else default

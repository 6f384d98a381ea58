import json
import math
import threading

import numpy as np
import pytest

from evrange.mapclient import (
    EndpointConfig,
    FixtureAttributeClient,
    HttpAttributeClient,
    MapClientError,
    RawAttributeRecord,
    fetch_attributes,
    fixture_provider,
    merge_attribute_responses,
)
from evrange.route import EdgeClass, GeoPoint


class StubResponse:
    def __init__(self, status_code, payload=None):
        self.status_code = status_code
        self._payload = payload

    def json(self):
        return self._payload


class StubTransport:
    """Scripted transport: answers per-URL, counts every request."""

    def __init__(self, script=None):
        self.requests = []
        self.script = script or {}
        self._lock = threading.Lock()

    def __call__(self, url, body, timeout):
        with self._lock:
            self.requests.append((url, len(body.get("shape", body.get("locations", [])))))
        responses = self.script.get(url)
        if responses is None:
            # default: echo one record per point
            n = len(body.get("shape", body.get("locations", [])))
            return StubResponse(200, [{"speed": 45.0} for _ in range(n)])
        if isinstance(responses, list):
            with self._lock:
                item = responses.pop(0) if len(responses) > 1 else responses[0]
        else:
            item = responses
        if isinstance(item, Exception):
            raise item
        return item


def points(n):
    return [GeoPoint(42.0 + i * 1e-5, -83.0) for i in range(n)]


class TestHttpClient:
    def test_batching_by_ceiling_division(self):
        transport = StubTransport()
        cfg = EndpointConfig(batch_size=100, max_parallel_requests=4)
        records = fetch_attributes(points(250), cfg, kind="trace_attributes",
                                   transport=transport)
        assert len(records) == 250
        assert len(transport.requests) == 3
        assert sorted(n for _, n in transport.requests) == [50, 100, 100]

    def test_order_preserved_across_batches(self):
        transport = StubTransport()
        cfg = EndpointConfig(batch_size=10, max_parallel_requests=4)
        pts = points(35)
        records = HttpAttributeClient(cfg, transport=transport).fetch(pts, "trace_attributes")
        assert [r.lat for r in records] == [p.lat for p in pts]

    def test_primary_failures_then_fallback(self):
        primary = "http://primary/trace_attributes"
        fallback = "http://fallback/trace_attributes"
        transport = StubTransport(
            script={
                primary: [StubResponse(503), StubResponse(503)],
                fallback: StubResponse(200, [{"speed": 45.0}]),
            }
        )
        cfg = EndpointConfig(
            primary_base_url="http://primary",
            fallback_base_url="http://fallback",
            retry_count=1,
        )
        client = HttpAttributeClient(cfg, transport=transport)
        records = client.fetch(points(1), "trace_attributes")
        assert len(records) == 1
        primary_hits = [u for u, _ in transport.requests if u == primary]
        assert len(primary_hits) == 2  # retry_count + 1 attempts before fallback
        assert any(d["event"] == "fallback_used" for d in client.diagnostics)

    def test_both_endpoints_down(self):
        boom = ConnectionError("refused")
        transport = StubTransport(
            script={
                "http://p/height": boom,
                "http://f/height": boom,
            }
        )
        cfg = EndpointConfig(primary_base_url="http://p", fallback_base_url="http://f",
                             retry_count=0)
        with pytest.raises(MapClientError, match="both endpoints"):
            HttpAttributeClient(cfg, transport=transport).fetch(points(2), "height")

    def test_height_endpoint_shape(self):
        url = "http://p/height"
        transport = StubTransport(script={url: StubResponse(200, {"height": [12.0, 13.0]})})
        cfg = EndpointConfig(primary_base_url="http://p", fallback_base_url="http://f")
        records = HttpAttributeClient(cfg, transport=transport).fetch(points(2), "height")
        assert [r.attributes["elevation"] for r in records] == [12.0, 13.0]

    def test_mismatched_response_is_an_error(self):
        url = "http://p/trace_attributes"
        transport = StubTransport(script={url: StubResponse(200, [{"speed": 1.0}])})
        cfg = EndpointConfig(primary_base_url="http://p", fallback_base_url="http://f")
        with pytest.raises(MapClientError, match="does not match"):
            HttpAttributeClient(cfg, transport=transport).fetch(points(2), "trace_attributes")

    def test_unknown_keys_retained(self):
        url = "http://p/locate"
        transport = StubTransport(
            script={url: StubResponse(200, [{"speed": 1.0, "exotic_key": "kept"}])}
        )
        cfg = EndpointConfig(primary_base_url="http://p", fallback_base_url="http://f")
        records = HttpAttributeClient(cfg, transport=transport).fetch(points(1), "locate")
        assert records[0].attributes["exotic_key"] == "kept"

    def test_env_override(self, monkeypatch):
        monkeypatch.setenv("EVRANGE_PRIMARY_URL", "http://from-env")
        cfg = EndpointConfig(primary_base_url="http://original")
        client = HttpAttributeClient(cfg)
        assert client.cfg.primary_base_url == "http://from-env"


class TestFixtureProvider:
    def test_valid_fixture_round_trip(self, tmp_path):
        fixture = [
            {"lat": 42.0, "lon": -83.0, "attributes": {"speed": 40.0}},
            {"lat": 42.0001, "lon": -83.0, "attributes": {"speed": 50.0}},
            {"lat": 42.0002, "lon": -83.0, "attributes": {"speed": 60.0}},
        ]
        path = tmp_path / "attrs.json"
        path.write_text(json.dumps(fixture))
        client = fixture_provider(path)
        pts = [GeoPoint(r["lat"], r["lon"]) for r in fixture]
        records = client.fetch(pts, "trace_attributes")
        assert [r.attributes["speed"] for r in records] == [40.0, 50.0, 60.0]

    def test_missing_file(self, tmp_path):
        with pytest.raises(MapClientError, match="not found"):
            fixture_provider(tmp_path / "absent.json")

    def test_corrupt_file(self, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text("{nope")
        with pytest.raises(MapClientError, match="corrupt"):
            fixture_provider(path)

    def test_far_away_point_rejected(self, tmp_path):
        path = tmp_path / "attrs.json"
        path.write_text(json.dumps([{"lat": 42.0, "lon": -83.0, "attributes": {}}]))
        client = FixtureAttributeClient(path, match_tolerance_m=100.0)
        with pytest.raises(MapClientError, match="no fixture record"):
            client.fetch([GeoPoint(43.0, -83.0)], "locate")

    def test_shipped_fixture_loads(self, fixtures_dir):
        client = fixture_provider(fixtures_dir / "attrs_mixed.json")
        assert len(client.records) == 81


def _rec(lat=42.0, lon=-83.0, **attrs):
    return RawAttributeRecord(lat, lon, attrs)


class TestMerge:
    def test_complete_inputs_copied_through(self):
        locate = [_rec(traffic_signal=True)]
        trace = [_rec(speed=36.0, speed_limit=54.0, heading=90.0, curvature=1.5,
                      edge_position=0.25, road_class="primary", link=True)]
        height = [_rec(elevation=120.0)]
        merged = merge_attribute_responses(locate, trace, height, [0.0])
        arc, f = merged[0]
        assert arc == 0.0
        assert f.speed_limit == pytest.approx(15.0)  # 54 km/h -> m/s
        assert f.avg_edge_speed == pytest.approx(10.0)
        assert f.elevation == 120.0
        assert f.traffic_signal is True
        assert f.link is True
        assert f.edge_class is EdgeClass.primary
        assert f.edge_position == 0.25

    def test_missing_speed_limit_falls_back_to_edge_speed(self):
        trace = [_rec(speed=36.0)]
        merged = merge_attribute_responses([_rec()], trace, [_rec(elevation=0.0)], [0.0])
        _, f = merged[0]
        assert f.speed_limit == pytest.approx(10.0)

    def test_heading_change_is_circular(self):
        trace = [_rec(heading=10.0), _rec(heading=350.0)]
        locate = [_rec(), _rec()]
        height = [_rec(elevation=0.0), _rec(elevation=0.0)]
        merged = merge_attribute_responses(locate, trace, height, [0.0, 10.0])
        assert merged[0][1].heading_change == 0.0
        assert merged[1][1].heading_change == pytest.approx(20.0)

    def test_missing_elevation_interpolated_from_neighbours(self):
        height = [_rec(elevation=100.0), _rec(), _rec(elevation=110.0)]
        trace = [_rec(), _rec(), _rec()]
        locate = [_rec(), _rec(), _rec()]
        merged = merge_attribute_responses(locate, trace, height, [0.0, 5.0, 10.0])
        assert merged[1][1].elevation == pytest.approx(105.0)

    def test_grade_derived_from_elevation_when_missing(self):
        height = [_rec(elevation=100.0), _rec(elevation=101.0), _rec(elevation=102.0)]
        merged = merge_attribute_responses(
            [_rec()] * 3, [_rec()] * 3, height, [0.0, 10.0, 20.0]
        )
        for _, f in merged:
            assert f.grade == pytest.approx(10.0)  # 1 m rise per 10 m

    def test_length_mismatch_rejected(self):
        with pytest.raises(MapClientError, match="mismatch"):
            merge_attribute_responses([_rec()], [_rec(), _rec()], [_rec()], [0.0])

    def test_never_emits_non_finite_values(self):
        # spartan inputs: no attributes at all
        n = 5
        arcs = list(np.linspace(0, 40, n))
        merged = merge_attribute_responses([_rec()] * n, [_rec()] * n, [_rec()] * n, arcs)
        for _, f in merged:
            for name in ("speed_limit", "avg_edge_speed", "curvature", "grade",
                         "elevation", "heading", "heading_change", "edge_position"):
                value = getattr(f, name)
                assert math.isfinite(value), name

#!/usr/bin/env python3
"""Generate the route and attribute fixtures used by tests and offline runs.

Routes are straight west-east segments near Detroit; the interesting behavior
(signals, curves, grade) lives in the attribute fixtures, matching how the
live map endpoints would annotate the same geometry.
"""

import json
import math
from pathlib import Path

LAT = 42.33
LON0 = -83.05
EARTH_RADIUS_M = 6371000.0

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"


def lon_at(meters: float) -> float:
    meters_per_deg = math.pi * EARTH_RADIUS_M / 180.0 * math.cos(math.radians(LAT))
    return LON0 + meters / meters_per_deg


def write_route(name: str, length_m: float) -> None:
    doc = {
        "type": "FeatureCollection",
        "features": [
            {
                "type": "Feature",
                "properties": {"name": name},
                "geometry": {
                    "type": "LineString",
                    "coordinates": [[LON0, LAT], [lon_at(length_m), LAT]],
                },
            }
        ],
    }
    (FIXTURES / f"{name}.geojson").write_text(json.dumps(doc, indent=1))


def record(arc: float, **attrs) -> dict:
    base = {
        "speed_limit": 50.0,  # km/h
        "speed": 45.0,  # km/h
        "curvature": 0.1,
        "grade": 0.0,
        "elevation": 200.0,
        "heading": 90.0,
        "edge_position": 0.5,
        "traffic_signal": False,
        "stop_sign": False,
        "yield_sign": False,
        "roundabout": False,
        "link": False,
        "road_class": "residential",
    }
    base.update(attrs)
    return {"lat": LAT, "lon": lon_at(arc), "attributes": base}


def write_attrs(name: str, records: list) -> None:
    (FIXTURES / f"{name}.json").write_text(json.dumps(records, indent=1))


def main():
    FIXTURES.mkdir(exist_ok=True)

    # 3-vertex parsing fixture
    (FIXTURES / "route_triangle_3pt.geojson").write_text(
        json.dumps(
            {
                "type": "Feature",
                "geometry": {
                    "type": "LineString",
                    "coordinates": [[-83.05, 42.33], [-83.045, 42.332], [-83.04, 42.33]],
                },
            },
            indent=1,
        )
    )

    # constant-reference 500 m, sparse records every 50 m
    write_route("route_straight_500m", 500.0)
    write_attrs("attrs_straight_500m", [record(a) for a in range(0, 501, 50)])

    # one traffic signal at 300 m, records every 10 m
    write_route("route_signal_300m", 500.0)
    write_attrs(
        "attrs_signal_300m",
        [record(a, traffic_signal=(a == 300)) for a in range(0, 501, 10)],
    )

    # mixed: plain / signal at 300 / high-curvature 450-550 / plain, 800 m
    write_route("route_mixed", 800.0)
    mixed = []
    for a in range(0, 801, 10):
        if 450 <= a <= 550:
            mixed.append(record(a, curvature=3.0, speed=25.0))
        else:
            mixed.append(record(a, traffic_signal=(a == 300)))
    write_attrs("attrs_mixed", mixed)

    # slow flat town road (limit below the synthetic scaler's mean speed, so
    # a constant-mean predictor never decelerates after the ramp-in)
    write_attrs(
        "attrs_straight_town",
        [record(a, speed_limit=30.0, speed=28.0) for a in range(0, 501, 50)],
    )

    # hilly: descend 8% for 500 m, climb 8% for 500 m, 60 km/h
    write_route("route_hilly", 1000.0)
    hilly = []
    for a in range(0, 1001, 25):
        if a <= 500:
            elev, grade = 300.0 - 0.08 * a, -8.0
        else:
            elev, grade = 260.0 + 0.08 * (a - 500), 8.0
        hilly.append(record(a, grade=grade, elevation=elev, speed_limit=60.0, speed=55.0))
    write_attrs("attrs_hilly", hilly)

    # offline pipeline config used by the CLI demo and tests; relative paths
    # resolve against this file's directory
    config = {
        "weights_path": "weights_synthetic.json",
        "offline_mode": True,
        "fixture_path": "attrs_mixed.json",
        "initial_soc": 0.8,
    }
    (FIXTURES / "config_default.json").write_text(json.dumps(config, indent=1))
    print(f"fixtures written to {FIXTURES}")


if __name__ == "__main__":
    main()

"""End-to-end orchestration: route bytes in, per-meter forecast out.

Every stage failure is re-raised as PipelineStageError naming the module
that broke, so callers (CLI, service) can attribute errors.
"""

from __future__ import annotations

import json
from contextlib import contextmanager
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np

from . import energy, mapclient, pidsim, predictor, rules, route as route_mod
from .config import PipelineConfig
from .filtering import zero_phase_filter


class PipelineStageError(RuntimeError):
    def __init__(self, stage: str, cause: BaseException):
        self.stage = stage
        self.cause = cause
        super().__init__(f"[{stage}] {cause}")


@contextmanager
def _stage(name: str):
    try:
        yield
    except PipelineStageError:
        raise
    except Exception as exc:
        raise PipelineStageError(name, exc) from exc


@dataclass(frozen=True)
class WeightsBundle:
    dims: predictor.ModelDims
    weights: predictor.ModelWeights
    scaler: predictor.ScalerParams
    feature_list: dict


def load_weights_bundle(path: str | Path) -> WeightsBundle:
    with _stage("driver-lstm"):
        document = Path(path).read_bytes()
        dims, weights, scaler, features = predictor.load_weights(document)
    return WeightsBundle(dims=dims, weights=weights, scaler=scaler, feature_list=features)


@dataclass
class EstimateResult:
    distance_m: np.ndarray
    velocity_pred: np.ndarray  # m/s
    velocity_ref: np.ndarray  # m/s
    accel: np.ndarray  # m/s^2
    p_wheels: np.ndarray  # W
    p_motor: np.ndarray  # W
    p_batt: np.ndarray  # W
    energy_wh: np.ndarray
    soc: np.ndarray
    annotations: list[dict]
    route_length_m: float
    step_count: int
    ec_wh_per_km: float
    sim_summary: dict = field(default_factory=dict)


def _make_client(cfg: PipelineConfig):
    if cfg.offline_mode:
        if not cfg.fixture_path:
            raise mapclient.MapClientError("offline mode requires fixture_path")
        return mapclient.FixtureAttributeClient(cfg.fixture_path)
    return mapclient.HttpAttributeClient(cfg.endpoints)


def _query_indices(n_steps: int, total: float, sample_m: float) -> list[int]:
    step = max(1, int(round(sample_m)))
    idx = list(range(0, n_steps, step))
    if idx[-1] != n_steps - 1:
        idx.append(n_steps - 1)
    return idx


def run_pipeline(
    route_document: bytes,
    cfg: PipelineConfig,
    weights: Optional[WeightsBundle] = None,
) -> EstimateResult:
    """Parse, enrich, simulate, predict, filter, and integrate one route."""
    with _stage("route-model"):
        polyline = route_mod.parse_route_geojson(route_document)
        route = route_mod.discretize_route(polyline)
    n = len(route.steps)

    with _stage("map-client"):
        client = _make_client(cfg)
        idx = _query_indices(n, route.total_length, cfg.attribute_sample_m)
        points = [route.steps[i].position for i in idx]
        arcs = [route.steps[i].arc_length for i in idx]
        locate = client.fetch(points, "locate")
        trace = client.fetch(points, "trace_attributes")
        height = client.fetch(points, "height")
        per_node = mapclient.merge_attribute_responses(locate, trace, height, arcs)

    with _stage("route-model"):
        route = route_mod.attach_features(route, per_node)

    with _stage("velocity-rules"):
        profile = rules.build_reference_profile(route, cfg.thresholds)
        stop_events = rules.coalesce_stop_events(
            profile, cfg.thresholds.stop_coalesce_window_m
        )
        curve_evs = rules.curve_events(profile)

    with _stage("pid-sim"):
        lut = pidsim.build_stopping_lut(cfg.controller)
        trace_sim = pidsim.simulate(
            profile,
            cfg.controller,
            lut=lut,
            stop_window_m=cfg.thresholds.stop_coalesce_window_m,
        )

    with _stage("route-model"):
        v_sim, a_sim = route_mod.resample_trace_to_meters(
            trace_sim.s, trace_sim.v, trace_sim.a, route
        )

    if weights is None:
        if not cfg.weights_path:
            raise PipelineStageError(
                "driver-lstm", ValueError("no weights loaded and no weights_path configured")
            )
        weights = load_weights_bundle(cfg.weights_path)

    with _stage("driver-lstm"):
        past = np.column_stack([v_sim, a_sim])
        inference = predictor.batch_inference(
            route,
            past,
            weights.weights,
            weights.dims,
            weights.scaler,
            weights.feature_list,
            stop_arcs=[e.arc_length for e in stop_events],
            closed_loop=cfg.closed_loop,
        )
        v_pred = zero_phase_filter(inference.velocity, cfg.filter)
        v_pred = np.maximum(v_pred, 0.0)  # the energy model needs v >= 0

    with _stage("energy-model"):
        grade = np.array([s.features.grade for s in route.steps])
        result = energy.run_energy_model(v_pred, grade, cfg.initial_soc, cfg.vehicle)

    annotations = [
        {"type": "stop", "distance_m": round(e.arc_length, 3)} for e in stop_events
    ]
    annotations += [
        {"type": "curve", "distance_m": round(e.arc_length, 3), "v_ref": round(e.v_ref, 3)}
        for e in curve_evs
    ]
    if n > 1:
        hi, lo = int(np.argmax(grade)), int(np.argmin(grade))
        annotations.append(
            {"type": "grade_max", "distance_m": float(route.steps[hi].arc_length),
             "grade_percent": round(float(grade[hi]), 3)}
        )
        annotations.append(
            {"type": "grade_min", "distance_m": float(route.steps[lo].arc_length),
             "grade_percent": round(float(grade[lo]), 3)}
        )
    annotations += [
        {"type": "battery_limit", "distance_m": float(route.steps[ev["index"]].arc_length),
         "limit": ev["limit"]}
        for ev in result.clamp_events
    ]

    return EstimateResult(
        distance_m=route.arc_lengths,
        velocity_pred=v_pred,
        velocity_ref=np.array([p.v_ref for p in profile]),
        accel=result.acceleration,
        p_wheels=result.p_wheels,
        p_motor=result.p_motor,
        p_batt=result.p_batt,
        energy_wh=result.cumulative_wh,
        soc=result.soc,
        annotations=annotations,
        route_length_m=route.total_length,
        step_count=n,
        ec_wh_per_km=result.ec_wh_per_km,
        sim_summary={
            "duration_s": float(trace_sim.t[-1]),
            "samples": len(trace_sim),
            "stops_honored": [
                {"distance_m": o.arc_length, "min_velocity": o.min_velocity,
                 "honored": o.honored}
                for o in trace_sim.stop_outcomes
            ],
        },
    )


_SERIES_KEYS = (
    "distance_m",
    "velocity_pred",
    "velocity_ref",
    "accel",
    "p_wheels",
    "p_motor",
    "p_batt",
    "energy_wh",
    "soc",
)


def result_to_dict(result: EstimateResult) -> dict:
    out = {key: [float(x) for x in getattr(result, key)] for key in _SERIES_KEYS}
    out["annotations"] = result.annotations
    out["meta"] = {
        "route_length_m": result.route_length_m,
        "step_count": result.step_count,
        "ec_wh_per_km": result.ec_wh_per_km,
        "sim_summary": result.sim_summary,
    }
    return out


def result_to_json(result: EstimateResult) -> bytes:
    return json.dumps(result_to_dict(result), separators=(",", ":")).encode()


def export_result(result: EstimateResult, path: str | Path) -> None:
    """Write the columnar JSON export (schema in README)."""
    Path(path).write_bytes(result_to_json(result))


def parse_exported_result(document: bytes | str) -> dict:
    """Validate and load a file produced by export_result."""
    data = json.loads(document)
    missing = [k for k in _SERIES_KEYS + ("annotations",) if k not in data]
    if missing:
        raise ValueError(f"export missing keys: {missing}")
    lengths = {k: len(data[k]) for k in _SERIES_KEYS}
    if len(set(lengths.values())) != 1:
        raise ValueError(f"export series lengths differ: {lengths}")
    return data

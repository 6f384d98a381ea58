"""Encoder-decoder velocity predictor: weight loading, scaling, forward pass,
and windowed batch inference over a discretized route.

Weights come from a JSON container (see README for the schema); the network
is evaluated with plain numpy.  Gate order everywhere is (input, forget,
candidate, output).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .route import DiscretizedRoute


class WeightsError(ValueError):
    """Raised when the weight container is malformed or inconsistent."""


@dataclass(frozen=True)
class ModelDims:
    past_steps: int = 50  # s_P
    future_steps: int = 100  # s_F
    vehicle_features: int = 2  # n_v
    road_features: int = 13  # n_r
    predicted_features: int = 1  # q_v
    encoder_units: int = 32  # u_e
    decoder_units: int = 64  # u_d
    stride: int = 10
    retain: int = 10

    def __post_init__(self):
        if not (self.retain <= self.stride <= self.future_steps):
            raise WeightsError("dims must satisfy retain <= stride <= future_steps")
        if self.predicted_features > self.vehicle_features:
            raise WeightsError("cannot predict more states than vehicle inputs")


@dataclass(frozen=True)
class LSTMParams:
    kernel: np.ndarray  # (n_in, 4u)
    recurrent: np.ndarray  # (u, 4u)
    bias: np.ndarray  # (4u,)

    @property
    def units(self) -> int:
        return self.recurrent.shape[0]


@dataclass(frozen=True)
class DenseParams:
    weight: np.ndarray  # (n_in, n_out)
    bias: np.ndarray  # (n_out,)


@dataclass(frozen=True)
class ModelWeights:
    past_fwd: LSTMParams
    past_bwd: LSTMParams
    future_fwd: LSTMParams
    future_bwd: LSTMParams
    fuse_hidden_1: DenseParams
    fuse_hidden_2: DenseParams
    fuse_cell_1: DenseParams
    fuse_cell_2: DenseParams
    decoder: LSTMParams
    out_fwd: LSTMParams
    out_bwd: LSTMParams
    head: DenseParams


@dataclass(frozen=True)
class ScalerParams:
    """Per-feature standard-score parameters; categorical columns pass through."""

    names: tuple[str, ...]
    means: np.ndarray
    stds: np.ndarray
    scaled: np.ndarray  # bool mask

    def __post_init__(self):
        if np.any(self.stds[self.scaled] <= 0):
            raise WeightsError("degenerate scaler: std must be > 0 for scaled features")

    def subset(self, names: list[str]) -> "ScalerParams":
        idx = [self.names.index(n) for n in names]
        return ScalerParams(
            names=tuple(names),
            means=self.means[idx],
            stds=self.stds[idx],
            scaled=self.scaled[idx],
        )


def scale(features: np.ndarray, params: ScalerParams) -> np.ndarray:
    """(x - mean) / std on scaled columns, identity on categorical ones."""
    x = np.asarray(features, dtype=float)
    if x.shape[-1] != len(params.names):
        raise WeightsError(
            f"feature count {x.shape[-1]} does not match scaler ({len(params.names)})"
        )
    out = x.copy()
    m = params.scaled
    out[..., m] = (x[..., m] - params.means[m]) / params.stds[m]
    return out


def inverse_scale(features: np.ndarray, params: ScalerParams) -> np.ndarray:
    x = np.asarray(features, dtype=float)
    if x.shape[-1] != len(params.names):
        raise WeightsError(
            f"feature count {x.shape[-1]} does not match scaler ({len(params.names)})"
        )
    out = x.copy()
    m = params.scaled
    out[..., m] = x[..., m] * params.stds[m] + params.means[m]
    return out


def _sigmoid(z: np.ndarray) -> np.ndarray:
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


def lstm_cell_step(
    x: np.ndarray, h: np.ndarray, c: np.ndarray, params: LSTMParams
) -> tuple[np.ndarray, np.ndarray]:
    """Standard LSTM cell update, gate order (i, f, g, o)."""
    u = params.units
    z = x @ params.kernel + h @ params.recurrent + params.bias
    i = _sigmoid(z[0 * u : 1 * u])
    f = _sigmoid(z[1 * u : 2 * u])
    g = np.tanh(z[2 * u : 3 * u])
    o = _sigmoid(z[3 * u : 4 * u])
    c_new = f * c + i * g
    h_new = o * np.tanh(c_new)
    return h_new, c_new


def _lstm_run(seq: np.ndarray, params: LSTMParams) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    u = params.units
    h = np.zeros(u)
    c = np.zeros(u)
    outputs = np.empty((seq.shape[0], u))
    for t in range(seq.shape[0]):
        h, c = lstm_cell_step(seq[t], h, c, params)
        outputs[t] = h
    return outputs, h, c


def bilstm_layer(
    seq: np.ndarray, fwd: LSTMParams, bwd: LSTMParams
) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """Run the sequence both ways; per-step outputs are [forward; backward].

    Returns (outputs T x 2u, h_fwd, c_fwd, h_bwd, c_bwd) with the final states
    of each direction.
    """
    seq = np.asarray(seq, dtype=float)
    if seq.ndim != 2 or seq.shape[0] < 1:
        raise WeightsError("bilstm input must be a non-empty T x n matrix")
    out_f, h_f, c_f = _lstm_run(seq, fwd)
    out_b_rev, h_b, c_b = _lstm_run(seq[::-1], bwd)
    outputs = np.concatenate([out_f, out_b_rev[::-1]], axis=1)
    return outputs, h_f, c_f, h_b, c_b


@dataclass(frozen=True)
class InferenceWindow:
    x_vp: np.ndarray  # (s_P + 1) x n_v, past vehicle states
    x_rp: np.ndarray  # (s_P + 1) x n_r, past road features
    x_rf: np.ndarray  # s_F x n_r, future road features
    origin: int  # route step index k

    def validate(self, dims: ModelDims) -> None:
        expect = {
            "x_vp": (dims.past_steps + 1, dims.vehicle_features),
            "x_rp": (dims.past_steps + 1, dims.road_features),
            "x_rf": (dims.future_steps, dims.road_features),
        }
        for name, shape in expect.items():
            got = getattr(self, name).shape
            if got != shape:
                raise WeightsError(f"window {name} has shape {got}, expected {shape}")


def model_forward(window: InferenceWindow, w: ModelWeights, dims: ModelDims) -> np.ndarray:
    """Full encoder-decoder pass; returns s_F x q_v predictions in scaled space."""
    window.validate(dims)

    past_in = np.concatenate([window.x_vp, window.x_rp], axis=1)
    _, h_f, c_f, h_b, c_b = bilstm_layer(past_in, w.past_fwd, w.past_bwd)
    h_p = np.concatenate([h_f, h_b])
    c_p = np.concatenate([c_f, c_b])

    _, h_f, c_f, h_b, c_b = bilstm_layer(window.x_rf, w.future_fwd, w.future_bwd)
    h_fut = np.concatenate([h_f, h_b])
    c_fut = np.concatenate([c_f, c_b])

    h_pf = np.concatenate([h_p, h_fut])
    c_pf = np.concatenate([c_p, c_fut])
    h_d = (h_pf @ w.fuse_hidden_1.weight + w.fuse_hidden_1.bias) @ w.fuse_hidden_2.weight
    h_d = h_d + w.fuse_hidden_2.bias
    c_d = (c_pf @ w.fuse_cell_1.weight + w.fuse_cell_1.bias) @ w.fuse_cell_2.weight
    c_d = c_d + w.fuse_cell_2.bias

    # autoregressive decoder: first input is the fused hidden state, then the
    # previous step's own output
    h, c = h_d, c_d
    x = h_d
    dec = np.empty((dims.future_steps, dims.decoder_units))
    for t in range(dims.future_steps):
        h, c = lstm_cell_step(x, h, c, w.decoder)
        dec[t] = h
        x = h

    out, *_ = bilstm_layer(dec, w.out_fwd, w.out_bwd)
    return out @ w.head.weight + w.head.bias


# ---------------------------------------------------------------------------
# weight container
# ---------------------------------------------------------------------------

_DIM_KEYS = (
    "past_steps",
    "future_steps",
    "vehicle_features",
    "road_features",
    "predicted_features",
    "encoder_units",
    "decoder_units",
    "stride",
    "retain",
)


def _expected_tensor_shapes(d: ModelDims) -> dict[str, tuple[int, ...]]:
    n_past_in = d.vehicle_features + d.road_features
    ue, ud = d.encoder_units, d.decoder_units
    shapes: dict[str, tuple[int, ...]] = {}
    for direction in ("forward", "backward"):
        shapes[f"past_encoder.{direction}.kernel"] = (n_past_in, 4 * ue)
        shapes[f"past_encoder.{direction}.recurrent"] = (ue, 4 * ue)
        shapes[f"past_encoder.{direction}.bias"] = (4 * ue,)
        shapes[f"future_encoder.{direction}.kernel"] = (d.road_features, 4 * ue)
        shapes[f"future_encoder.{direction}.recurrent"] = (ue, 4 * ue)
        shapes[f"future_encoder.{direction}.bias"] = (4 * ue,)
        shapes[f"output_bilstm.{direction}.kernel"] = (ud, 4 * ud)
        shapes[f"output_bilstm.{direction}.recurrent"] = (ud, 4 * ud)
        shapes[f"output_bilstm.{direction}.bias"] = (4 * ud,)
    for path in ("hidden", "cell"):
        shapes[f"fusion.{path}.dense1.weight"] = (4 * ue, 2 * ue)
        shapes[f"fusion.{path}.dense1.bias"] = (2 * ue,)
        shapes[f"fusion.{path}.dense2.weight"] = (2 * ue, ud)
        shapes[f"fusion.{path}.dense2.bias"] = (ud,)
    shapes["decoder.kernel"] = (ud, 4 * ud)
    shapes["decoder.recurrent"] = (ud, 4 * ud)
    shapes["decoder.bias"] = (4 * ud,)
    shapes["head.weight"] = (2 * ud, d.predicted_features)
    shapes["head.bias"] = (d.predicted_features,)
    return shapes


def load_weights(document: bytes | str) -> tuple[ModelDims, ModelWeights, ScalerParams, dict]:
    """Parse and validate the JSON weight container.

    Returns (dims, weights, scaler, feature_list); feature_list carries the
    vehicle/road/predicted feature name ordering the tensors were built for.
    """
    try:
        doc = json.loads(document)
    except (json.JSONDecodeError, UnicodeDecodeError) as exc:
        raise WeightsError(f"malformed weight container: {exc}") from exc

    for key in ("dims", "feature_list", "scaler", "tensors"):
        if key not in doc:
            raise WeightsError(f"weight container missing '{key}'")

    missing = [k for k in _DIM_KEYS if k not in doc["dims"]]
    if missing:
        raise WeightsError(f"dims missing keys: {missing}")
    dims = ModelDims(**{k: int(doc["dims"][k]) for k in _DIM_KEYS})

    features = doc["feature_list"]
    for key in ("vehicle", "road", "predicted"):
        if key not in features:
            raise WeightsError(f"feature_list missing '{key}'")
    if len(features["vehicle"]) != dims.vehicle_features:
        raise WeightsError("vehicle feature list does not match dims")
    if len(features["road"]) != dims.road_features:
        raise WeightsError("road feature list does not match dims")
    if len(features["predicted"]) != dims.predicted_features:
        raise WeightsError("predicted feature list does not match dims")
    if any(name not in features["vehicle"] for name in features["predicted"]):
        raise WeightsError("predicted features must be a subset of vehicle features")

    all_names = list(features["vehicle"]) + list(features["road"])
    means = np.zeros(len(all_names))
    stds = np.ones(len(all_names))
    scaled = np.zeros(len(all_names), dtype=bool)
    for i, name in enumerate(all_names):
        if name not in doc["scaler"]:
            raise WeightsError(f"missing scaler entry for feature '{name}'")
        entry = doc["scaler"][name]
        if entry is None:
            continue  # categorical, unscaled
        std = float(entry["std"])
        if std <= 0:
            raise WeightsError(f"degenerate scaler for '{name}': std={std}")
        means[i], stds[i], scaled[i] = float(entry["mean"]), std, True
    scaler = ScalerParams(names=tuple(all_names), means=means, stds=stds, scaled=scaled)

    expected = _expected_tensor_shapes(dims)
    tensors: dict[str, np.ndarray] = {}
    for name, spec in doc["tensors"].items():
        if name not in expected:
            raise WeightsError(f"unknown tensor '{name}'")
        shape = tuple(spec["shape"])
        arr = np.asarray(spec["values"], dtype=float).reshape(-1)
        if int(np.prod(shape)) != arr.size:
            raise WeightsError(f"tensor '{name}' has {arr.size} values for shape {shape}")
        if shape != expected[name]:
            raise WeightsError(f"tensor '{name}' has shape {shape}, expected {expected[name]}")
        if not np.all(np.isfinite(arr)):
            raise WeightsError(f"tensor '{name}' contains non-finite values")
        tensors[name] = arr.reshape(shape)
    absent = sorted(set(expected) - set(tensors))
    if absent:
        raise WeightsError(f"weight container missing tensors: {absent[:4]}")

    def lstm(prefix: str) -> LSTMParams:
        return LSTMParams(
            kernel=tensors[f"{prefix}.kernel"],
            recurrent=tensors[f"{prefix}.recurrent"],
            bias=tensors[f"{prefix}.bias"],
        )

    def dense(prefix: str) -> DenseParams:
        return DenseParams(weight=tensors[f"{prefix}.weight"], bias=tensors[f"{prefix}.bias"])

    weights = ModelWeights(
        past_fwd=lstm("past_encoder.forward"),
        past_bwd=lstm("past_encoder.backward"),
        future_fwd=lstm("future_encoder.forward"),
        future_bwd=lstm("future_encoder.backward"),
        fuse_hidden_1=dense("fusion.hidden.dense1"),
        fuse_hidden_2=dense("fusion.hidden.dense2"),
        fuse_cell_1=dense("fusion.cell.dense1"),
        fuse_cell_2=dense("fusion.cell.dense2"),
        decoder=lstm("decoder"),
        out_fwd=lstm("output_bilstm.forward"),
        out_bwd=lstm("output_bilstm.backward"),
        head=dense("head"),
    )
    return dims, weights, scaler, features


# ---------------------------------------------------------------------------
# route-level inference
# ---------------------------------------------------------------------------

STOP_INDICATOR_RANGE_M = 20.0


def road_feature_matrix(
    route: DiscretizedRoute,
    feature_names: list[str],
    stop_arcs: Optional[list[float]] = None,
) -> np.ndarray:
    """Per-step road feature matrix in the weight container's column order.

    stop_ahead / stop_behind are the engineered indicators: within 20 m before
    (after) a stop location.  When stop_arcs is not given, stops are taken
    from the traffic-control flags on the route itself.
    """
    if not route.has_features():
        raise ValueError("route has no features attached")
    if stop_arcs is None:
        stop_arcs = [
            s.arc_length
            for s in route.steps
            if s.features.traffic_signal or s.features.stop_sign or s.features.yield_sign
        ]
    arcs = route.arc_lengths
    n = len(route.steps)
    cols = {}
    feats = [s.features for s in route.steps]
    getters = {
        "elevation": lambda f: f.elevation,
        "heading": lambda f: f.heading,
        "speed_limit": lambda f: f.speed_limit,
        "avg_edge_speed": lambda f: f.avg_edge_speed,
        "curvature": lambda f: f.curvature,
        "grade": lambda f: f.grade,
        "traffic_signal": lambda f: float(f.traffic_signal),
        "stop_sign": lambda f: float(f.stop_sign),
        "yield_sign": lambda f: float(f.yield_sign),
        "roundabout": lambda f: float(f.roundabout),
        "link": lambda f: float(f.link),
        "edge_class": lambda f: float(f.edge_class),
    }
    stop_ahead = np.zeros(n)
    stop_behind = np.zeros(n)
    for arc in stop_arcs:
        stop_ahead[(arcs >= arc - STOP_INDICATOR_RANGE_M) & (arcs <= arc)] = 1.0
        stop_behind[(arcs > arc) & (arcs <= arc + STOP_INDICATOR_RANGE_M)] = 1.0
    cols["stop_ahead"] = stop_ahead
    cols["stop_behind"] = stop_behind

    matrix = np.empty((n, len(feature_names)))
    for col, name in enumerate(feature_names):
        if name in cols:
            matrix[:, col] = cols[name]
        elif name in getters:
            matrix[:, col] = [getters[name](f) for f in feats]
        else:
            raise WeightsError(f"unknown road feature '{name}' in weight container")
    return matrix


@dataclass
class InferenceResult:
    velocity: np.ndarray  # m/s per route step
    window_origins: list[int]


def batch_inference(
    route: DiscretizedRoute,
    past_states: np.ndarray,
    weights: ModelWeights,
    dims: ModelDims,
    scaler: ScalerParams,
    feature_list: dict,
    stop_arcs: Optional[list[float]] = None,
    closed_loop: bool = False,
) -> InferenceResult:
    """Predict per-step velocity over the whole route with strided windows.

    Windows start at k = s_P and advance by the stride; the first `retain`
    predictions of each window land in the output.  The first s_P + 1 steps
    copy the simulated velocities.  By default each window's past states come
    from the simulator trace (open loop); with closed_loop=True the model's
    own retained predictions replace the velocity column as it advances.
    """
    n = len(route.steps)
    s_p, s_f = dims.past_steps, dims.future_steps
    if n < s_p + dims.stride + 1:
        raise ValueError(f"route too short for inference: {n} steps, need {s_p + dims.stride + 1}")
    past_states = np.asarray(past_states, dtype=float)
    if past_states.shape != (n, dims.vehicle_features):
        raise ValueError(f"past_states must be {n} x {dims.vehicle_features}")

    road = road_feature_matrix(route, list(feature_list["road"]), stop_arcs)
    road_scaled = scale(road, scaler.subset(list(feature_list["road"])))
    veh_scaler = scaler.subset(list(feature_list["vehicle"]))
    veh_scaled = scale(past_states, veh_scaler)
    pred_scaler = scaler.subset(list(feature_list["predicted"]))
    v_col = list(feature_list["vehicle"]).index(feature_list["predicted"][0])

    out = past_states[:, v_col].copy()
    origins = []
    for k in range(s_p, n - 1, dims.stride):
        x_vp = veh_scaled[k - s_p : k + 1]
        x_rp = road_scaled[k - s_p : k + 1]
        x_rf = road_scaled[k + 1 : k + 1 + s_f]
        if x_rf.shape[0] < s_f:  # route tail: hold the last row
            pad = np.repeat(x_rf[-1:], s_f - x_rf.shape[0], axis=0)
            x_rf = np.concatenate([x_rf, pad], axis=0)
        window = InferenceWindow(x_vp=x_vp, x_rp=x_rp, x_rf=x_rf, origin=k)
        pred = model_forward(window, weights, dims)
        take = min(dims.retain, n - 1 - k)
        values = inverse_scale(pred[:take], pred_scaler)[:, 0]
        out[k + 1 : k + 1 + take] = values
        origins.append(k)
        if closed_loop:
            veh_scaled[k + 1 : k + 1 + take, v_col] = scale(
                values.reshape(-1, 1), pred_scaler
            )[:, 0]
    return InferenceResult(velocity=out, window_origins=origins)

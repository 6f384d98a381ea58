import json
import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))  # for the oracle helpers

from evrange.pidsim import ControllerConfig, build_stopping_lut
from evrange.pipeline import load_weights_bundle

REPO = Path(__file__).resolve().parent.parent
FIXTURES = REPO / "fixtures"


@pytest.fixture(scope="session")
def fixtures_dir() -> Path:
    return FIXTURES


@pytest.fixture(scope="session")
def weights_bundle():
    return load_weights_bundle(FIXTURES / "weights_synthetic.json")


@pytest.fixture(scope="session")
def weights_document() -> dict:
    return json.loads((FIXTURES / "weights_synthetic.json").read_text())


@pytest.fixture(scope="session")
def default_controller() -> ControllerConfig:
    return ControllerConfig()


@pytest.fixture(scope="session")
def default_lut(default_controller):
    # one LUT for the whole session; building it is the expensive part
    return build_stopping_lut(default_controller)


def straight_route_geojson(length_m: float = 500.0, lat: float = 42.33) -> bytes:
    import math

    meters_per_deg = math.pi * 6371000.0 / 180.0 * math.cos(math.radians(lat))
    doc = {
        "type": "Feature",
        "geometry": {
            "type": "LineString",
            "coordinates": [[-83.05, lat], [-83.05 + length_m / meters_per_deg, lat]],
        },
    }
    return json.dumps(doc).encode()


def tiny_dims():
    from evrange.predictor import ModelDims

    return ModelDims(
        past_steps=3,
        future_steps=4,
        vehicle_features=2,
        road_features=3,
        predicted_features=1,
        encoder_units=2,
        decoder_units=3,
        stride=2,
        retain=2,
    )


def random_weights(dims, rng, scale=0.4):
    """Matching (ModelWeights, oracle params dict) pair from one RNG stream."""
    from evrange.predictor import DenseParams, LSTMParams, ModelWeights

    def lstm(n_in, units):
        return LSTMParams(
            kernel=rng.normal(0, scale, (n_in, 4 * units)),
            recurrent=rng.normal(0, scale, (units, 4 * units)),
            bias=rng.normal(0, scale, 4 * units),
        )

    def dense(n_in, n_out):
        return DenseParams(
            weight=rng.normal(0, scale, (n_in, n_out)),
            bias=rng.normal(0, scale, n_out),
        )

    ue, ud = dims.encoder_units, dims.decoder_units
    n_past = dims.vehicle_features + dims.road_features
    w = ModelWeights(
        past_fwd=lstm(n_past, ue),
        past_bwd=lstm(n_past, ue),
        future_fwd=lstm(dims.road_features, ue),
        future_bwd=lstm(dims.road_features, ue),
        fuse_hidden_1=dense(4 * ue, 2 * ue),
        fuse_hidden_2=dense(2 * ue, ud),
        fuse_cell_1=dense(4 * ue, 2 * ue),
        fuse_cell_2=dense(2 * ue, ud),
        decoder=lstm(ud, ud),
        out_fwd=lstm(ud, ud),
        out_bwd=lstm(ud, ud),
        head=dense(2 * ud, dims.predicted_features),
    )

    def lstm_dict(p):
        return {
            "kernel": p.kernel.tolist(),
            "recurrent": p.recurrent.tolist(),
            "bias": p.bias.tolist(),
        }

    def dense_dict(p):
        return {"weight": p.weight.tolist(), "bias": p.bias.tolist()}

    oracle = {
        "past_fwd": lstm_dict(w.past_fwd),
        "past_bwd": lstm_dict(w.past_bwd),
        "future_fwd": lstm_dict(w.future_fwd),
        "future_bwd": lstm_dict(w.future_bwd),
        "fuse_hidden_1": dense_dict(w.fuse_hidden_1),
        "fuse_hidden_2": dense_dict(w.fuse_hidden_2),
        "fuse_cell_1": dense_dict(w.fuse_cell_1),
        "fuse_cell_2": dense_dict(w.fuse_cell_2),
        "decoder": lstm_dict(w.decoder),
        "out_fwd": lstm_dict(w.out_fwd),
        "out_bwd": lstm_dict(w.out_bwd),
        "head": dense_dict(w.head),
    }
    return w, oracle


def zero_weights(dims):
    from evrange.predictor import DenseParams, LSTMParams, ModelWeights

    def lstm(n_in, units):
        return LSTMParams(
            kernel=np.zeros((n_in, 4 * units)),
            recurrent=np.zeros((units, 4 * units)),
            bias=np.zeros(4 * units),
        )

    def dense(n_in, n_out):
        return DenseParams(weight=np.zeros((n_in, n_out)), bias=np.zeros(n_out))

    ue, ud = dims.encoder_units, dims.decoder_units
    n_past = dims.vehicle_features + dims.road_features
    return ModelWeights(
        past_fwd=lstm(n_past, ue),
        past_bwd=lstm(n_past, ue),
        future_fwd=lstm(dims.road_features, ue),
        future_bwd=lstm(dims.road_features, ue),
        fuse_hidden_1=dense(4 * ue, 2 * ue),
        fuse_hidden_2=dense(2 * ue, ud),
        fuse_cell_1=dense(4 * ue, 2 * ue),
        fuse_cell_2=dense(2 * ue, ud),
        decoder=lstm(ud, ud),
        out_fwd=lstm(ud, ud),
        out_bwd=lstm(ud, ud),
        head=dense(2 * ud, dims.predicted_features),
    )

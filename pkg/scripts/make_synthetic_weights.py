#!/usr/bin/env python3
"""Generate the synthetic weight container shipped for tests.

The values are small random numbers from a fixed seed; they exercise every
tensor of the architecture but encode no trained behavior.  Re-running this
script reproduces fixtures/weights_synthetic.json byte for byte.
"""

import json
from pathlib import Path

import numpy as np

SEED = 20260809
SCALE = 0.08

DIMS = {
    "past_steps": 50,
    "future_steps": 100,
    "vehicle_features": 2,
    "road_features": 13,
    "predicted_features": 1,
    "encoder_units": 32,
    "decoder_units": 64,
    "stride": 10,
    "retain": 10,
}

FEATURES = {
    "vehicle": ["velocity", "acceleration"],
    "road": [
        "elevation",
        "heading",
        "speed_limit",
        "avg_edge_speed",
        "curvature",
        "traffic_signal",
        "stop_sign",
        "yield_sign",
        "roundabout",
        "edge_class",
        "link",
        "stop_ahead",
        "stop_behind",
    ],
    "predicted": ["velocity"],
}

# synthetic standard-score parameters for the continuous features;
# categorical features are unscaled (null)
SCALER = {
    "velocity": {"mean": 12.0, "std": 7.5},
    "acceleration": {"mean": 0.0, "std": 0.9},
    "elevation": {"mean": 220.0, "std": 120.0},
    "heading": {"mean": 180.0, "std": 100.0},
    "speed_limit": {"mean": 14.0, "std": 7.0},
    "avg_edge_speed": {"mean": 12.0, "std": 6.0},
    "curvature": {"mean": 0.8, "std": 1.2},
    "traffic_signal": None,
    "stop_sign": None,
    "yield_sign": None,
    "roundabout": None,
    "edge_class": None,
    "link": None,
    "stop_ahead": None,
    "stop_behind": None,
}


def tensor_shapes(d):
    n_past_in = d["vehicle_features"] + d["road_features"]
    ue, ud = d["encoder_units"], d["decoder_units"]
    shapes = {}
    for direction in ("forward", "backward"):
        shapes[f"past_encoder.{direction}.kernel"] = (n_past_in, 4 * ue)
        shapes[f"past_encoder.{direction}.recurrent"] = (ue, 4 * ue)
        shapes[f"past_encoder.{direction}.bias"] = (4 * ue,)
        shapes[f"future_encoder.{direction}.kernel"] = (d["road_features"], 4 * ue)
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
    shapes["head.weight"] = (2 * ud, d["predicted_features"])
    shapes["head.bias"] = (d["predicted_features"],)
    return shapes


def main():
    rng = np.random.default_rng(SEED)
    tensors = {}
    for name, shape in sorted(tensor_shapes(DIMS).items()):
        if name.endswith(".bias"):
            values = np.zeros(int(np.prod(shape)))
        else:
            values = rng.normal(0.0, SCALE, size=int(np.prod(shape)))
        tensors[name] = {
            "shape": list(shape),
            "values": [float(f"{v:.7g}") for v in values],
        }

    container = {
        "dims": DIMS,
        "feature_list": FEATURES,
        "scaler": SCALER,
        "tensors": tensors,
    }
    out = Path(__file__).resolve().parent.parent / "fixtures" / "weights_synthetic.json"
    out.write_text(json.dumps(container, separators=(",", ":")))
    print(f"wrote {out} ({out.stat().st_size / 1e6:.2f} MB)")


if __name__ == "__main__":
    main()

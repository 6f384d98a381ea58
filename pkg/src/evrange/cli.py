"""Command line entry points: estimate a route to a file, or serve over HTTP."""

from __future__ import annotations

import argparse
import dataclasses
import sys
from pathlib import Path

from .config import ConfigError, PipelineConfig, load_config
from .pipeline import PipelineStageError, export_result, load_weights_bundle, run_pipeline


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="evrange",
        description="Route-aware BEV velocity, power, energy and SOC forecasting",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    est = sub.add_parser("estimate", help="run the pipeline on a GeoJSON route")
    est.add_argument("--route", required=True, help="GeoJSON file with a LineString route")
    est.add_argument("--config", help="pipeline config JSON")
    est.add_argument("--weights", help="weight container JSON (overrides config)")
    est.add_argument("--out", required=True, help="output file for the result series")
    est.add_argument("--offline", action="store_true",
                     help="use the configured fixture instead of live map endpoints")

    srv = sub.add_parser("serve", help="serve the pipeline over HTTP")
    srv.add_argument("--config", required=True, help="pipeline config JSON")
    srv.add_argument("--bind", default="127.0.0.1:8000", help="host:port to listen on")
    return parser


def _load_cfg(args) -> PipelineConfig:
    cfg = load_config(args.config) if args.config else PipelineConfig()
    updates = {}
    if getattr(args, "weights", None):
        updates["weights_path"] = args.weights
    if getattr(args, "offline", False):
        updates["offline_mode"] = True
    if updates:
        cfg = dataclasses.replace(cfg, **updates)
    return cfg


def _run_estimate(args) -> int:
    cfg = _load_cfg(args)
    try:
        document = Path(args.route).read_bytes()
    except OSError as exc:
        print(f"[route-model] cannot read route file: {exc}", file=sys.stderr)
        return 1
    try:
        result = run_pipeline(document, cfg)
        export_result(result, args.out)
    except PipelineStageError as exc:
        print(str(exc), file=sys.stderr)
        return 1
    print(
        f"{args.out}: {result.step_count} steps over {result.route_length_m:.0f} m, "
        f"{result.ec_wh_per_km:.1f} Wh/km, final SOC {result.soc[-1]:.3f}"
    )
    return 0


def _run_serve(args) -> int:
    import uvicorn

    from .service import create_app

    cfg = _load_cfg(args)
    host, _, port = args.bind.rpartition(":")
    app = create_app(cfg)
    uvicorn.run(app, host=host or "127.0.0.1", port=int(port))
    return 0


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        if args.command == "estimate":
            return _run_estimate(args)
        return _run_serve(args)
    except ConfigError as exc:
        print(f"[service-cli] {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())

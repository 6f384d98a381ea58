"""HTTP front end: POST /estimate, GET /health, GET /config."""

from __future__ import annotations

import json
from typing import Optional

from fastapi import FastAPI, Request, Response
from fastapi.middleware.cors import CORSMiddleware

from .config import ConfigError, PipelineConfig, apply_overrides, config_to_dict
from .pipeline import (
    PipelineStageError,
    WeightsBundle,
    load_weights_bundle,
    result_to_json,
    run_pipeline,
)


def _error_response(status: int, stage: str, message: str) -> Response:
    body = json.dumps({"stage": stage, "error": message}, separators=(",", ":"))
    return Response(content=body, status_code=status, media_type="application/json")


def create_app(cfg: PipelineConfig, weights: Optional[WeightsBundle] = None) -> FastAPI:
    """Build the service; weights load once and are shared across requests."""
    if weights is None and cfg.weights_path:
        weights = load_weights_bundle(cfg.weights_path)

    app = FastAPI(title="evrange", version="0.1.0")
    # the browser console is served from its own origin
    app.add_middleware(
        CORSMiddleware, allow_origins=["*"], allow_methods=["*"], allow_headers=["*"]
    )
    app.state.config = cfg
    app.state.weights = weights

    @app.get("/health")
    def health():
        return {"status": "ok", "weights_loaded": app.state.weights is not None}

    @app.get("/config")
    def active_config():
        return config_to_dict(app.state.config)

    @app.post("/estimate")
    async def estimate(request: Request) -> Response:
        raw = await request.body()
        try:
            body = json.loads(raw)
        except json.JSONDecodeError as exc:
            return _error_response(400, "service-cli", f"request body is not JSON: {exc}")
        if not isinstance(body, dict):
            return _error_response(400, "service-cli", "request body must be an object")

        # either {"route": <geojson>, "overrides": {...}} or a bare GeoJSON object
        if "route" in body:
            route_obj = body["route"]
            overrides = body.get("overrides") or {}
        else:
            route_obj, overrides = body, {}

        try:
            run_cfg = apply_overrides(app.state.config, overrides)
        except ConfigError as exc:
            return _error_response(400, "service-cli", str(exc))

        try:
            result = run_pipeline(
                json.dumps(route_obj).encode(), run_cfg, weights=app.state.weights
            )
        except PipelineStageError as exc:
            return _error_response(400, exc.stage, str(exc.cause))
        return Response(content=result_to_json(result), media_type="application/json")

    return app

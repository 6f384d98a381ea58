// Thin client for the evrange HTTP API. All numbers shown in the UI come
// from these responses untouched; the console does no physics of its own.

import {
  EstimateResult,
  RouteGeometry,
  ScenarioOverrides,
  validateEstimateResult,
} from "./types.js";

export class ApiError extends Error {
  stage: string;

  constructor(stage: string, message: string) {
    super(message);
    this.stage = stage;
  }
}

type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

export class ApiClient {
  private baseUrl: string;
  private fetchFn: FetchLike;

  constructor(baseUrl: string, fetchFn?: FetchLike) {
    this.baseUrl = baseUrl.replace(/\/+$/, "");
    this.fetchFn = fetchFn ?? ((url, init) => fetch(url, init));
  }

  async health(): Promise<{ status: string; weights_loaded: boolean }> {
    const response = await this.fetchFn(`${this.baseUrl}/health`);
    if (!response.ok) throw new ApiError("service-cli", `health check failed (${response.status})`);
    return response.json();
  }

  async config(): Promise<Record<string, unknown>> {
    const response = await this.fetchFn(`${this.baseUrl}/config`);
    if (!response.ok) throw new ApiError("service-cli", `config fetch failed (${response.status})`);
    return response.json();
  }

  async estimate(
    route: RouteGeometry | Record<string, unknown>,
    overrides: ScenarioOverrides = {},
  ): Promise<EstimateResult> {
    const response = await this.fetchFn(`${this.baseUrl}/estimate`, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify({ route, overrides }),
    });
    const body = await response.json().catch(() => null);
    if (!response.ok) {
      const stage = (body && typeof body.stage === "string" && body.stage) || "service-cli";
      const message =
        (body && typeof body.error === "string" && body.error) || `HTTP ${response.status}`;
      throw new ApiError(stage, message);
    }
    return validateEstimateResult(body);
  }
}

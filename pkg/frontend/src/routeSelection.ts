// Route acquisition: two map clicks, a GeoJSON upload, or an external
// routing request. Only geometry handling lives here; no estimation.

import { GeoPointLL, RouteGeometry } from "./types.js";

export type RouteSource = "clicks" | "upload" | "routing";

export interface RouteSelectionState {
  origin: GeoPointLL | null;
  destination: GeoPointLL | null;
  geometry: RouteGeometry | null;
  source: RouteSource | null;
  error: string | null;
}

type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

export class RouteSelection {
  origin: GeoPointLL | null = null;
  destination: GeoPointLL | null = null;
  geometry: RouteGeometry | null = null;
  source: RouteSource | null = null;
  error: string | null = null;

  get state(): RouteSelectionState {
    return {
      origin: this.origin,
      destination: this.destination,
      geometry: this.geometry,
      source: this.source,
      error: this.error,
    };
  }

  reset(): void {
    this.origin = null;
    this.destination = null;
    this.geometry = null;
    this.source = null;
    this.error = null;
  }

  /** Handle one map click: first sets the origin, second the destination. */
  place(point: GeoPointLL): RouteSelectionState {
    this.error = null;
    if (this.origin === null || this.destination !== null) {
      this.reset();
      this.origin = point;
      return this.state;
    }
    if (point.lat === this.origin.lat && point.lon === this.origin.lon) {
      this.error = "origin and destination must be distinct points";
      return this.state;
    }
    this.destination = point;
    // straight-segment preview until a routed geometry or upload replaces it
    this.geometry = {
      type: "LineString",
      coordinates: [
        [this.origin.lon, this.origin.lat],
        [point.lon, point.lat],
      ],
    };
    this.source = "clicks";
    return this.state;
  }

  /** Load an uploaded GeoJSON document containing a LineString route. */
  setFromUpload(text: string): RouteSelectionState {
    this.error = null;
    let parsed: unknown;
    try {
      parsed = JSON.parse(text);
    } catch {
      this.error = "uploaded file is not valid JSON";
      return this.state;
    }
    const coords = findLineString(parsed);
    if (coords === null) {
      this.error = "uploaded GeoJSON contains no LineString route";
      return this.state;
    }
    if (coords.length < 2) {
      this.error = "route needs at least 2 coordinates";
      return this.state;
    }
    for (const pair of coords) {
      if (!Array.isArray(pair) || pair.length < 2) {
        this.error = "malformed coordinate entry in route";
        return this.state;
      }
      const [lon, lat] = pair;
      if (typeof lon !== "number" || typeof lat !== "number" ||
          lon < -180 || lon > 180 || lat < -90 || lat > 90) {
        this.error = `coordinate out of range: [${lon}, ${lat}]`;
        return this.state;
      }
    }
    const line = coords as [number, number][];
    this.geometry = { type: "LineString", coordinates: line };
    this.origin = { lat: line[0][1], lon: line[0][0] };
    const last = line[line.length - 1];
    this.destination = { lat: last[1], lon: last[0] };
    this.source = "upload";
    return this.state;
  }

  /** Fetch a road-following geometry from an OSRM-style routing endpoint. */
  async requestRoute(routingBaseUrl: string, fetchFn?: FetchLike): Promise<RouteSelectionState> {
    if (this.origin === null || this.destination === null) {
      this.error = "pick origin and destination first";
      return this.state;
    }
    const doFetch = fetchFn ?? ((url: string, init?: RequestInit) => fetch(url, init));
    const base = routingBaseUrl.replace(/\/+$/, "");
    const path =
      `${base}/route/v1/driving/` +
      `${this.origin.lon},${this.origin.lat};${this.destination.lon},${this.destination.lat}` +
      `?overview=full&geometries=geojson`;
    try {
      const response = await doFetch(path);
      if (!response.ok) {
        this.error = `routing request failed (HTTP ${response.status})`;
        return this.state;
      }
      const body = await response.json();
      const geometry = body?.routes?.[0]?.geometry;
      if (!geometry || geometry.type !== "LineString" || !Array.isArray(geometry.coordinates)) {
        this.error = "routing response carries no LineString geometry";
        return this.state;
      }
      this.geometry = geometry as RouteGeometry;
      this.source = "routing";
      this.error = null;
    } catch (err) {
      this.error = `routing request failed: ${err instanceof Error ? err.message : err}`;
    }
    return this.state;
  }

  /** A submittable selection: an uploaded/routed line, or two distinct clicks. */
  isComplete(): boolean {
    return this.geometry !== null && this.error === null;
  }
}

function findLineString(obj: unknown): unknown[] | null {
  if (typeof obj !== "object" || obj === null) return null;
  const node = obj as Record<string, unknown>;
  if (node.type === "LineString" && Array.isArray(node.coordinates)) {
    return node.coordinates;
  }
  if (node.type === "Feature") {
    return findLineString(node.geometry);
  }
  if (node.type === "FeatureCollection" && Array.isArray(node.features)) {
    for (const feature of node.features) {
      const found = findLineString(feature);
      if (found !== null) return found;
    }
  }
  return null;
}

// Types mirroring the evrange service wire formats.

export interface GeoPointLL {
  lat: number;
  lon: number;
}

export interface RouteGeometry {
  type: "LineString";
  coordinates: [number, number][]; // [lon, lat] pairs, GeoJSON order
}

export interface EstimateAnnotation {
  type: string;
  distance_m: number;
  [key: string]: unknown;
}

export interface EstimateMeta {
  route_length_m: number;
  step_count: number;
  ec_wh_per_km: number;
  sim_summary?: Record<string, unknown>;
}

export interface EstimateResult {
  distance_m: number[];
  velocity_pred: number[];
  velocity_ref: number[];
  accel: number[];
  p_wheels: number[];
  p_motor: number[];
  p_batt: number[];
  energy_wh: number[];
  soc: number[];
  annotations: EstimateAnnotation[];
  meta: EstimateMeta;
}

export const SERIES_KEYS = [
  "distance_m",
  "velocity_pred",
  "velocity_ref",
  "accel",
  "p_wheels",
  "p_motor",
  "p_batt",
  "energy_wh",
  "soc",
] as const;

export type SeriesKey = (typeof SERIES_KEYS)[number];

/** Validate a service response against the documented result schema. */
export function validateEstimateResult(data: unknown): EstimateResult {
  if (typeof data !== "object" || data === null) {
    throw new Error("estimate result must be an object");
  }
  const obj = data as Record<string, unknown>;
  let length: number | null = null;
  for (const key of SERIES_KEYS) {
    const series = obj[key];
    if (!Array.isArray(series)) {
      throw new Error(`estimate result missing series '${key}'`);
    }
    if (length === null) {
      length = series.length;
    } else if (series.length !== length) {
      throw new Error(`series '${key}' has length ${series.length}, expected ${length}`);
    }
  }
  if (!Array.isArray(obj.annotations)) {
    throw new Error("estimate result missing 'annotations'");
  }
  return data as EstimateResult;
}

// Scenario overrides the service accepts per request; paths and endpoint
// URLs stay server-side.
export interface ScenarioOverrides {
  initial_soc?: number;
  vehicle?: {
    m?: number;
    P_aux?: number;
    C_W?: number;
    C_D?: number;
    A_f?: number;
    eta_rb_max?: number;
  };
  filter?: { cutoff?: number };
}

/** Client-side range checks matching the service's documented limits. */
export function validateOverrides(o: ScenarioOverrides): string[] {
  const errors: string[] = [];
  if (o.initial_soc !== undefined && (o.initial_soc < 0.2 || o.initial_soc > 0.95)) {
    errors.push("initial SOC must be within [0.20, 0.95]");
  }
  const v = o.vehicle ?? {};
  if (v.m !== undefined && v.m <= 0) errors.push("vehicle mass must be positive");
  if (v.P_aux !== undefined && v.P_aux < 0) errors.push("auxiliary load cannot be negative");
  if (v.C_W !== undefined && v.C_W <= 0) errors.push("battery capacity must be positive");
  if (v.C_D !== undefined && v.C_D <= 0) errors.push("drag coefficient must be positive");
  if (v.A_f !== undefined && v.A_f <= 0) errors.push("frontal area must be positive");
  if (v.eta_rb_max !== undefined && (v.eta_rb_max <= 0 || v.eta_rb_max > 1)) {
    errors.push("max regen efficiency must be in (0, 1]");
  }
  const cutoff = o.filter?.cutoff;
  if (cutoff !== undefined && (cutoff <= 0 || cutoff >= 1)) {
    errors.push("filter cutoff must be in (0, 1)");
  }
  return errors;
}

// Pure mappings from estimate results to chart-ready structures. Values are
// passed through exactly as the service reported them.

import { Scenario } from "./scenarios.js";
import { EstimateAnnotation, EstimateResult, SeriesKey } from "./types.js";

export interface PanelSpec {
  key: string;
  title: string;
  unit: string;
  fields: { field: SeriesKey; label: string; dashed?: boolean }[];
}

export const PANELS: PanelSpec[] = [
  {
    key: "velocity",
    title: "Velocity",
    unit: "m/s",
    fields: [
      { field: "velocity_pred", label: "predicted" },
      { field: "velocity_ref", label: "reference", dashed: true },
    ],
  },
  {
    key: "acceleration",
    title: "Acceleration",
    unit: "m/s²",
    fields: [{ field: "accel", label: "accel" }],
  },
  {
    key: "power",
    title: "Power",
    unit: "W",
    fields: [
      { field: "p_wheels", label: "wheels" },
      { field: "p_motor", label: "motor" },
      { field: "p_batt", label: "battery" },
    ],
  },
  {
    key: "energy",
    title: "Cumulative energy",
    unit: "Wh",
    fields: [{ field: "energy_wh", label: "energy" }],
  },
  {
    key: "soc",
    title: "State of charge",
    unit: "fraction",
    fields: [{ field: "soc", label: "SOC" }],
  },
];

export interface PanelSeries {
  label: string; // "<scenario>: <field>" once several scenarios overlay
  dashed: boolean;
  values: number[]; // the service's array, untransformed
}

export interface PanelData {
  spec: PanelSpec;
  distance: number[];
  series: PanelSeries[];
}

/** Assemble one panel's overlay across scenarios (all share the x-axis). */
export function panelData(scenarios: readonly Scenario[], spec: PanelSpec): PanelData {
  if (scenarios.length === 0) {
    return { spec, distance: [], series: [] };
  }
  const distance = scenarios[0].result.distance_m as number[];
  const series: PanelSeries[] = [];
  for (const scenario of scenarios) {
    for (const f of spec.fields) {
      const prefix = scenarios.length > 1 ? `${scenario.label}: ` : "";
      series.push({
        label: `${prefix}${f.label}`,
        dashed: f.dashed ?? false,
        values: scenario.result[f.field] as number[],
      });
    }
  }
  return { spec, distance, series };
}

/** Nearest sample index for a distance along the route (binary search). */
export function indexForDistance(distance: number[], d: number): number {
  if (distance.length === 0) return -1;
  let lo = 0;
  let hi = distance.length - 1;
  if (d <= distance[0]) return 0;
  if (d >= distance[hi]) return hi;
  while (hi - lo > 1) {
    const mid = (lo + hi) >> 1;
    if (distance[mid] <= d) lo = mid;
    else hi = mid;
  }
  return d - distance[lo] <= distance[hi] - d ? lo : hi;
}

/** Exact per-field readout at one sample index. */
export function valuesAt(result: EstimateResult, index: number): Record<string, number> {
  const out: Record<string, number> = {};
  for (const spec of PANELS) {
    for (const f of spec.fields) {
      out[f.field] = (result[f.field] as number[])[index];
    }
  }
  out.distance_m = result.distance_m[index];
  return out;
}

export interface AnnotationMark {
  distance_m: number;
  type: string;
  label: string;
}

const ANNOTATION_GLYPHS: Record<string, string> = {
  stop: "STOP",
  curve: "CURVE",
  grade_max: "GRADE+",
  grade_min: "GRADE-",
  battery_limit: "BATT",
};

export function annotationMarks(annotations: EstimateAnnotation[]): AnnotationMark[] {
  return annotations
    .filter((a) => typeof a.distance_m === "number")
    .map((a) => ({
      distance_m: a.distance_m,
      type: a.type,
      label: ANNOTATION_GLYPHS[a.type] ?? a.type.toUpperCase(),
    }));
}

// Scenario snapshots: each submitted estimate is frozen so later
// comparisons can never mutate an earlier result.

import { EstimateResult, ScenarioOverrides } from "./types.js";

export interface Scenario {
  id: number;
  label: string;
  overrides: ScenarioOverrides;
  result: EstimateResult;
}

export function deepFreeze<T>(value: T): T {
  if (value !== null && typeof value === "object" && !Object.isFrozen(value)) {
    for (const key of Object.keys(value as object)) {
      deepFreeze((value as Record<string, unknown>)[key]);
    }
    Object.freeze(value);
  }
  return value;
}

export class ScenarioStore {
  private items: Scenario[] = [];
  private nextId = 1;

  /** Snapshot a result; rejects results whose distance axis does not match
   *  the scenarios already on screen (overlays share one route). */
  add(label: string, overrides: ScenarioOverrides, result: EstimateResult): Scenario {
    if (this.items.length > 0) {
      const axis = this.items[0].result.distance_m;
      if (result.distance_m.length !== axis.length) {
        throw new Error(
          "scenario runs a different route; clear existing scenarios first",
        );
      }
    }
    const scenario: Scenario = {
      id: this.nextId++,
      label: label || `scenario ${this.nextId - 1}`,
      overrides: deepFreeze(structuredClone(overrides)),
      result: deepFreeze(result),
    };
    this.items.push(scenario);
    return scenario;
  }

  list(): readonly Scenario[] {
    return this.items;
  }

  remove(id: number): void {
    this.items = this.items.filter((s) => s.id !== id);
  }

  clear(): void {
    this.items = [];
  }
}

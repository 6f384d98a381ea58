import { readFileSync } from "node:fs";
import { join } from "node:path";

import { describe, expect, it } from "vitest";

import { ScenarioStore, deepFreeze } from "../src/scenarios.js";
import { EstimateResult, validateEstimateResult } from "../src/types.js";

function loadResult(): EstimateResult {
  const raw = readFileSync(join(__dirname, "fixtures", "estimate_result.json"), "utf-8");
  return validateEstimateResult(JSON.parse(raw));
}

describe("scenario store", () => {
  it("stores immutable snapshots", () => {
    const store = new ScenarioStore();
    const scenario = store.add("baseline", { initial_soc: 0.8 }, loadResult());
    expect(Object.isFrozen(scenario.result)).toBe(true);
    expect(Object.isFrozen(scenario.result.soc)).toBe(true);
    expect(Object.isFrozen(scenario.result.meta)).toBe(true);
    expect(() => {
      (scenario.result.soc as number[])[0] = 999;
    }).toThrow(TypeError);
  });

  it("a second scenario never mutates the first", () => {
    const store = new ScenarioStore();
    const first = store.add("baseline", {}, loadResult());
    const before = JSON.stringify(first.result);

    const second = store.add("heavy", { vehicle: { m: 2400 } }, loadResult());
    expect(store.list()).toHaveLength(2);
    expect(JSON.stringify(first.result)).toBe(before);
    expect(second.id).not.toBe(first.id);
  });

  it("labels default when blank", () => {
    const store = new ScenarioStore();
    const scenario = store.add("", {}, loadResult());
    expect(scenario.label).toMatch(/^scenario \d+$/);
  });

  it("rejects a result from a different route", () => {
    const store = new ScenarioStore();
    store.add("baseline", {}, loadResult());
    const other = loadResult();
    const truncated = {
      ...other,
      distance_m: other.distance_m.slice(0, 10),
      velocity_pred: other.velocity_pred.slice(0, 10),
      velocity_ref: other.velocity_ref.slice(0, 10),
      accel: other.accel.slice(0, 10),
      p_wheels: other.p_wheels.slice(0, 10),
      p_motor: other.p_motor.slice(0, 10),
      p_batt: other.p_batt.slice(0, 10),
      energy_wh: other.energy_wh.slice(0, 10),
      soc: other.soc.slice(0, 10),
    };
    expect(() => store.add("short", {}, truncated)).toThrow(/different route/);
  });

  it("remove and clear manage the overlay set", () => {
    const store = new ScenarioStore();
    const a = store.add("a", {}, loadResult());
    store.add("b", {}, loadResult());
    store.remove(a.id);
    expect(store.list().map((s) => s.label)).toEqual(["b"]);
    store.clear();
    expect(store.list()).toHaveLength(0);
  });
});

describe("deepFreeze", () => {
  it("freezes nested objects and arrays", () => {
    const obj = deepFreeze({ a: [1, 2, { b: 3 }], c: { d: 4 } });
    expect(Object.isFrozen(obj.a)).toBe(true);
    expect(Object.isFrozen(obj.a[2])).toBe(true);
    expect(Object.isFrozen(obj.c)).toBe(true);
  });
});

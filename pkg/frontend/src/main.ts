// DOM wiring for the what-if console: map pane, scenario form, panels.

import { ApiClient, ApiError } from "./api.js";
import { DEFAULT_VIEWPORT, Viewport, project, unproject, viewportFor } from "./geo.js";
import { renderPanels } from "./panels.js";
import { RouteSelection } from "./routeSelection.js";
import { ScenarioStore } from "./scenarios.js";
import { ScenarioOverrides, validateOverrides } from "./types.js";

const $ = <T extends HTMLElement>(id: string): T => {
  const el = document.getElementById(id);
  if (!el) throw new Error(`missing element #${id}`);
  return el as T;
};

const selection = new RouteSelection();
const store = new ScenarioStore();
let viewport: Viewport = { ...DEFAULT_VIEWPORT };

function setStatus(message: string, isError = false): void {
  const el = $("status");
  el.textContent = message;
  el.className = isError ? "status error" : "status";
}

function drawMap(): void {
  const svg = $("map") as unknown as SVGSVGElement;
  svg.innerHTML = "";
  const ns = "http://www.w3.org/2000/svg";

  // graticule
  for (let i = 1; i < 6; i++) {
    for (const [x1, y1, x2, y2] of [
      [(viewport.width / 6) * i, 0, (viewport.width / 6) * i, viewport.height],
      [0, (viewport.height / 6) * i, viewport.width, (viewport.height / 6) * i],
    ]) {
      const line = document.createElementNS(ns, "line");
      line.setAttribute("x1", String(x1));
      line.setAttribute("y1", String(y1));
      line.setAttribute("x2", String(x2));
      line.setAttribute("y2", String(y2));
      line.setAttribute("class", "graticule");
      svg.appendChild(line);
    }
  }

  if (selection.geometry) {
    const points = selection.geometry.coordinates
      .map(([lon, lat]) => project(viewport, { lat, lon }))
      .map((p) => `${p.x.toFixed(1)},${p.y.toFixed(1)}`)
      .join(" ");
    const poly = document.createElementNS(ns, "polyline");
    poly.setAttribute("points", points);
    poly.setAttribute("class", "route-line");
    svg.appendChild(poly);
  }

  const markers: [typeof selection.origin, string][] = [
    [selection.origin, "marker origin"],
    [selection.destination, "marker destination"],
  ];
  for (const [point, cls] of markers) {
    if (!point) continue;
    const { x, y } = project(viewport, point);
    const dot = document.createElementNS(ns, "circle");
    dot.setAttribute("cx", String(x));
    dot.setAttribute("cy", String(y));
    dot.setAttribute("r", "6");
    dot.setAttribute("class", cls);
    svg.appendChild(dot);
  }

  const label = $("map-caption");
  label.textContent =
    `lat ${viewport.minLat.toFixed(3)}..${viewport.maxLat.toFixed(3)}, ` +
    `lon ${viewport.minLon.toFixed(3)}..${viewport.maxLon.toFixed(3)}`;
}

function readOverrides(): ScenarioOverrides {
  const overrides: ScenarioOverrides = {};
  const soc = parseFloat(($("initial-soc") as HTMLInputElement).value);
  if (!Number.isNaN(soc)) overrides.initial_soc = soc;
  const vehicle: NonNullable<ScenarioOverrides["vehicle"]> = {};
  const mass = parseFloat(($("vehicle-mass") as HTMLInputElement).value);
  if (!Number.isNaN(mass)) vehicle.m = mass;
  const aux = parseFloat(($("aux-load") as HTMLInputElement).value);
  if (!Number.isNaN(aux)) vehicle.P_aux = aux;
  const capacity = parseFloat(($("battery-wh") as HTMLInputElement).value);
  if (!Number.isNaN(capacity)) vehicle.C_W = capacity;
  if (Object.keys(vehicle).length > 0) overrides.vehicle = vehicle;
  const cutoff = parseFloat(($("filter-cutoff") as HTMLInputElement).value);
  if (!Number.isNaN(cutoff)) overrides.filter = { cutoff };
  return overrides;
}

function refreshScenarioList(): void {
  const list = $("scenario-list");
  list.textContent = "";
  for (const scenario of store.list()) {
    const item = document.createElement("li");
    const ec = scenario.result.meta.ec_wh_per_km;
    const socEnd = scenario.result.soc[scenario.result.soc.length - 1];
    item.textContent =
      `${scenario.label}: ${String(ec)} Wh/km, final SOC ${String(socEnd)}`;
    list.appendChild(item);
  }
}

async function submitScenario(): Promise<void> {
  if (!selection.isComplete() || !selection.geometry) {
    setStatus(selection.error ?? "select or upload a route first", true);
    return;
  }
  const overrides = readOverrides();
  const problems = validateOverrides(overrides);
  if (problems.length > 0) {
    setStatus(problems.join("; "), true);
    return;
  }
  const api = new ApiClient(($("service-url") as HTMLInputElement).value);
  const label = ($("scenario-label") as HTMLInputElement).value.trim();
  setStatus("estimating…");
  try {
    const result = await api.estimate(selection.geometry, overrides);
    store.add(label, overrides, result);
    renderPanels($("panels"), store.list());
    refreshScenarioList();
    setStatus(
      `${store.list().length} scenario(s), route ${result.meta.route_length_m} m, ` +
      `${result.meta.step_count} steps`,
    );
  } catch (err) {
    if (err instanceof ApiError) {
      setStatus(`[${err.stage}] ${err.message}`, true);
    } else {
      setStatus(String(err), true);
    }
  }
}

function wire(): void {
  drawMap();

  ($("map") as unknown as SVGSVGElement).addEventListener("click", (event) => {
    const svg = event.currentTarget as SVGSVGElement;
    const rect = svg.getBoundingClientRect();
    const point = unproject(viewport, event.clientX - rect.left, event.clientY - rect.top);
    selection.place(point);
    if (selection.error) setStatus(selection.error, true);
    else setStatus(selection.destination ? "route previewed; submit a scenario" : "now pick the destination");
    drawMap();
  });

  $("route-file").addEventListener("change", async (event) => {
    const input = event.target as HTMLInputElement;
    const file = input.files?.[0];
    if (!file) return;
    selection.setFromUpload(await file.text());
    if (selection.error) {
      setStatus(selection.error, true);
    } else if (selection.geometry) {
      viewport = viewportFor(selection.geometry, viewport.width, viewport.height);
      setStatus(`uploaded route with ${selection.geometry.coordinates.length} vertices`);
    }
    drawMap();
  });

  $("route-request").addEventListener("click", async () => {
    const base = ($("routing-url") as HTMLInputElement).value.trim();
    if (!base) {
      setStatus("set a routing endpoint URL to request road geometry", true);
      return;
    }
    await selection.requestRoute(base);
    if (selection.error) setStatus(selection.error, true);
    else if (selection.geometry) {
      viewport = viewportFor(selection.geometry, viewport.width, viewport.height);
      setStatus("routed geometry loaded");
    }
    drawMap();
  });

  $("submit").addEventListener("click", () => void submitScenario());
  $("clear-scenarios").addEventListener("click", () => {
    store.clear();
    renderPanels($("panels"), store.list());
    refreshScenarioList();
    setStatus("scenarios cleared");
  });
  $("reset-route").addEventListener("click", () => {
    selection.reset();
    viewport = { ...DEFAULT_VIEWPORT };
    drawMap();
    setStatus("route cleared");
  });
}

wire();

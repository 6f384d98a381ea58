// Lat/lon <-> pixel transforms for the click-to-pick map pane. Display
// geometry only; route physics lives server-side.

import { GeoPointLL, RouteGeometry } from "./types.js";

export interface Viewport {
  minLat: number;
  maxLat: number;
  minLon: number;
  maxLon: number;
  width: number;
  height: number;
}

export const DEFAULT_VIEWPORT: Viewport = {
  // downtown Detroit area, matching the shipped demo fixtures
  minLat: 42.30,
  maxLat: 42.36,
  minLon: -83.09,
  maxLon: -83.00,
  width: 560,
  height: 380,
};

export function project(vp: Viewport, p: GeoPointLL): { x: number; y: number } {
  const x = ((p.lon - vp.minLon) / (vp.maxLon - vp.minLon)) * vp.width;
  const y = (1 - (p.lat - vp.minLat) / (vp.maxLat - vp.minLat)) * vp.height;
  return { x, y };
}

export function unproject(vp: Viewport, x: number, y: number): GeoPointLL {
  const lon = vp.minLon + (x / vp.width) * (vp.maxLon - vp.minLon);
  const lat = vp.minLat + (1 - y / vp.height) * (vp.maxLat - vp.minLat);
  return { lat, lon };
}

/** Viewport framing a geometry with a relative margin, aspect preserved
 *  loosely (plain lat/lon box, good enough for a schematic pane). */
export function viewportFor(geometry: RouteGeometry, width: number, height: number,
                            margin = 0.15): Viewport {
  const lons = geometry.coordinates.map((c) => c[0]);
  const lats = geometry.coordinates.map((c) => c[1]);
  let minLon = Math.min(...lons);
  let maxLon = Math.max(...lons);
  let minLat = Math.min(...lats);
  let maxLat = Math.max(...lats);
  const padLon = Math.max((maxLon - minLon) * margin, 1e-4);
  const padLat = Math.max((maxLat - minLat) * margin, 1e-4);
  minLon -= padLon;
  maxLon += padLon;
  minLat -= padLat;
  maxLat += padLat;
  return { minLat, maxLat, minLon, maxLon, width, height };
}

// uPlot panel construction: five distance-aligned charts with one synced
// cursor, annotation markers, and exact-value legends.

import uPlot from "uplot";

import { Scenario } from "./scenarios.js";
import { AnnotationMark, PANELS, annotationMarks, panelData } from "./seriesView.js";

const SERIES_COLORS = [
  "#2563eb", "#dc2626", "#16a34a", "#9333ea", "#ea580c",
  "#0891b2", "#ca8a04", "#db2777", "#4b5563", "#65a30d",
];

const ANNOTATION_COLORS: Record<string, string> = {
  stop: "#dc2626",
  curve: "#d97706",
  grade_max: "#16a34a",
  grade_min: "#0891b2",
  battery_limit: "#9333ea",
};

const SYNC_KEY = "evrange-distance";

let charts: uPlot[] = [];

export function destroyPanels(): void {
  for (const chart of charts) chart.destroy();
  charts = [];
}

function drawMarks(marks: AnnotationMark[], withLabels: boolean) {
  return (u: uPlot) => {
    const ctx = u.ctx;
    ctx.save();
    for (const mark of marks) {
      const x = u.valToPos(mark.distance_m, "x", true);
      if (x < u.bbox.left || x > u.bbox.left + u.bbox.width) continue;
      ctx.strokeStyle = ANNOTATION_COLORS[mark.type] ?? "#6b7280";
      ctx.setLineDash([4, 4]);
      ctx.beginPath();
      ctx.moveTo(x, u.bbox.top);
      ctx.lineTo(x, u.bbox.top + u.bbox.height);
      ctx.stroke();
      if (withLabels) {
        ctx.setLineDash([]);
        ctx.fillStyle = ANNOTATION_COLORS[mark.type] ?? "#6b7280";
        ctx.font = "10px sans-serif";
        ctx.fillText(mark.label, x + 3, u.bbox.top + 12);
      }
    }
    ctx.restore();
  };
}

/** Render all five panels for the current scenario overlay. */
export function renderPanels(container: HTMLElement, scenarios: readonly Scenario[]): void {
  destroyPanels();
  container.textContent = "";
  if (scenarios.length === 0) return;

  const marks = annotationMarks(scenarios[0].result.annotations);
  const width = Math.max(480, container.clientWidth - 16);

  PANELS.forEach((spec, panelIndex) => {
    const data = panelData(scenarios, spec);
    const host = document.createElement("div");
    host.className = "panel";
    container.appendChild(host);

    const series: uPlot.Series[] = [
      {
        label: "distance (m)",
        // legend shows the exact number the service sent
        value: (_u, v) => (v == null ? "" : String(v)),
      },
    ];
    data.series.forEach((s, i) => {
      series.push({
        label: `${s.label} (${spec.unit})`,
        stroke: SERIES_COLORS[i % SERIES_COLORS.length],
        width: 1.25,
        dash: s.dashed ? [6, 4] : undefined,
        value: (_u, v) => (v == null ? "" : String(v)),
      });
    });

    const options: uPlot.Options = {
      title: spec.title,
      width,
      height: 190,
      cursor: { sync: { key: SYNC_KEY } },
      scales: { x: { time: false } },
      axes: [
        { label: panelIndex === PANELS.length - 1 ? "distance (m)" : "" },
        { label: spec.unit, size: 70 },
      ],
      series,
      hooks: { drawAxes: [drawMarks(marks, panelIndex === 0)] },
    };

    const aligned: uPlot.AlignedData = [
      data.distance,
      ...data.series.map((s) => s.values),
    ] as uPlot.AlignedData;
    charts.push(new uPlot(options, aligned, host));
  });
}

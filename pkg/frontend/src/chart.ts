/** Dependency-free SVG bar chart for the aggregation panel. */
import type { AggregateRowDto } from "./api.js";

const SVG_NS = "http://www.w3.org/2000/svg";

function svgEl(name: string, attrs: Record<string, string | number>): SVGElement {
  const el = document.createElementNS(SVG_NS, name);
  for (const [key, value] of Object.entries(attrs)) {
    el.setAttribute(key, String(value));
  }
  return el;
}

export interface ChartTotals {
  documents: number;
  mentions: number;
}

export function chartTotals(rows: AggregateRowDto[]): ChartTotals {
  return {
    documents: rows.reduce((sum, row) => sum + row.documents, 0),
    mentions: rows.reduce((sum, row) => sum + row.mentions, 0),
  };
}

export function renderBarChart(container: HTMLElement, rows: AggregateRowDto[]): void {
  container.textContent = "";
  if (rows.length === 0) {
    const empty = document.createElement("p");
    empty.className = "chart-empty";
    empty.textContent = "No matching documents for the current query.";
    container.appendChild(empty);
    return;
  }
  const width = 640;
  const height = 260;
  const margin = { top: 12, right: 8, bottom: 48, left: 36 };
  const plotW = width - margin.left - margin.right;
  const plotH = height - margin.top - margin.bottom;
  const maxValue = Math.max(1, ...rows.map((r) => Math.max(r.documents, r.mentions)));
  const band = plotW / rows.length;
  const barW = Math.max(2, Math.min(18, band * 0.35));

  const svg = svgEl("svg", {
    viewBox: `0 0 ${width} ${height}`,
    width: "100%",
    role: "img",
  }) as SVGSVGElement;
  svg.classList.add("aggregate-chart");

  const yOf = (value: number) => margin.top + plotH - (value / maxValue) * plotH;

  for (const fraction of [0, 0.5, 1]) {
    const y = yOf(maxValue * fraction);
    svg.appendChild(svgEl("line", {
      x1: margin.left, x2: width - margin.right, y1: y, y2: y, class: "gridline",
    }));
    const label = svgEl("text", {
      x: margin.left - 6, y: y + 4, "text-anchor": "end", class: "axis-label",
    });
    label.textContent = String(Math.round(maxValue * fraction));
    svg.appendChild(label);
  }

  rows.forEach((row, i) => {
    const center = margin.left + band * (i + 0.5);
    const docBar = svgEl("rect", {
      x: center - barW, y: yOf(row.documents),
      width: barW, height: margin.top + plotH - yOf(row.documents),
      class: "bar-documents",
      "data-documents": row.documents,
    });
    const mentionBar = svgEl("rect", {
      x: center, y: yOf(row.mentions),
      width: barW, height: margin.top + plotH - yOf(row.mentions),
      class: "bar-mentions",
      "data-mentions": row.mentions,
    });
    svg.appendChild(docBar);
    svg.appendChild(mentionBar);
    const tick = svgEl("text", {
      x: center, y: height - margin.bottom + 16,
      "text-anchor": "end", class: "axis-label",
      transform: `rotate(-40 ${center} ${height - margin.bottom + 16})`,
    });
    tick.textContent = String(row.key);
    svg.appendChild(tick);
  });

  const legend = svgEl("text", {
    x: width - margin.right, y: margin.top, "text-anchor": "end", class: "axis-label",
  });
  legend.textContent = "documents | mentions";
  svg.appendChild(legend);
  container.appendChild(svg);
}

// Six metric panels as pure data series, fed either from live snapshots or a
// parsed metrics export. Values are carried through untouched so chart data
// can be compared 1:1 against the server's delimited file.

import { MetricsRow } from "./protocol.js";

export interface ChartSeries {
  key: keyof MetricsRow;
  title: string;
  steps: number[];
  values: number[];
}

export const CHART_PANELS: { key: keyof MetricsRow; title: string }[] = [
  { key: "mean_qol", title: "Quality of life" },
  { key: "bankruptcies", title: "Bankruptcies" },
  { key: "mean_material_price", title: "Material prices" },
  { key: "mean_wage", title: "Wage" },
  { key: "consumer_profit", title: "Consumer goods profit" },
  { key: "mean_consumer_price", title: "Consumer goods price" },
];

export function chartSeries(history: MetricsRow[]): ChartSeries[] {
  const steps = history.map((row) => row.step);
  return CHART_PANELS.map(({ key, title }) => ({
    key,
    title,
    steps,
    values: history.map((row) => row[key] as number),
  }));
}

// header of the server's metrics export, in column order
const METRICS_COLUMNS = [
  "step",
  "mean_qol",
  "bankruptcies",
  "mean_material_price",
  "mean_wage",
  "consumer_profit",
  "mean_consumer_price",
  "population",
  "sick",
  "unemployment",
] as const;

export function parseMetricsCsv(text: string): MetricsRow[] {
  const lines = text.trim().split(/\r?\n/);
  if (lines.length === 0 || lines[0] !== METRICS_COLUMNS.join(",")) {
    throw new Error("unrecognized metrics header");
  }
  return lines.slice(1).map((line) => {
    const cells = line.split(",");
    if (cells.length !== METRICS_COLUMNS.length) {
      throw new Error(`bad metrics row: ${line}`);
    }
    const row = {} as Record<string, number>;
    METRICS_COLUMNS.forEach((column, i) => {
      row[column] = Number(cells[i]);
    });
    return row as unknown as MetricsRow;
  });
}

export interface Polyline {
  title: string;
  points: { x: number; y: number }[];
  yMin: number;
  yMax: number;
}

// scale a series into a drawing box; pure so it is testable without a DOM
export function toPolyline(series: ChartSeries, width: number, height: number): Polyline {
  const n = series.values.length;
  let yMin = Math.min(...series.values);
  let yMax = Math.max(...series.values);
  if (!isFinite(yMin) || !isFinite(yMax)) {
    yMin = 0;
    yMax = 1;
  }
  if (yMax === yMin) {
    yMax = yMin + 1;
  }
  const xStep = n > 1 ? width / (n - 1) : 0;
  const points = series.values.map((v, i) => ({
    x: i * xStep,
    y: height - ((v - yMin) / (yMax - yMin)) * height,
  }));
  return { title: series.title, points, yMin, yMax };
}

// Thin DOM layer: draws scene descriptions and chart polylines as SVG.
// Everything interesting happens in the pure modules; this file only paints.

import { ChartSeries, toPolyline } from "./charts.js";
import { CitizenGlyph, SceneDescription, SceneError, isSceneError } from "./scene.js";
import { BallotControl, PanelState } from "./panel.js";

const SVG_NS = "http://www.w3.org/2000/svg";

function svgElement(tag: string, attrs: Record<string, string>): SVGElement {
  const el = document.createElementNS(SVG_NS, tag);
  for (const [k, v] of Object.entries(attrs)) {
    el.setAttribute(k, v);
  }
  return el;
}

function glyphNode(glyph: CitizenGlyph): SVGElement {
  const size = 12;
  const { x, y } = glyph;
  let node: SVGElement;
  if (glyph.shape === "pyramid") {
    node = svgElement("polygon", {
      points: `${x + size / 2},${y} ${x},${y + size} ${x + size},${y + size}`,
      fill: glyph.color,
    });
  } else if (glyph.shape === "cube") {
    node = svgElement("rect", {
      x: String(x), y: String(y), width: String(size), height: String(size),
      fill: glyph.color,
    });
  } else {
    node = svgElement("circle", {
      cx: String(x + size / 2), cy: String(y + size / 2), r: String(size / 2),
      fill: glyph.color,
    });
  }
  const group = svgElement("g", {});
  group.appendChild(node);
  if (glyph.sickMarker) {
    group.appendChild(svgElement("circle", {
      cx: String(x + size), cy: String(y), r: "3",
      fill: "#000000", stroke: "#ffffff", "stroke-width": "1",
    }));
  }
  return group;
}

export function drawScene(container: HTMLElement, scene: SceneDescription | SceneError): void {
  container.replaceChildren();
  if (isSceneError(scene)) {
    const panel = document.createElement("div");
    panel.className = "error-panel";
    panel.textContent = `cannot render: ${scene.error}`;
    container.appendChild(panel);
    return;
  }
  const width = 480;
  const citizenRows = Math.ceil(scene.glyphs.length / 25) * 18 + 20;
  const svg = svgElement("svg", {
    width: String(width),
    height: String(citizenRows + 140),
    viewBox: `0 0 ${width} ${citizenRows + 140}`,
  });
  for (const glyph of scene.glyphs) {
    svg.appendChild(glyphNode(glyph));
  }
  // buildings: stacked slices growing upward from the baseline
  const base = citizenRows + 120;
  for (const building of scene.buildings) {
    building.slices.forEach((slice, i) => {
      svg.appendChild(svgElement("rect", {
        x: String(building.x), y: String(base - (i + 1) * 14),
        width: "28", height: "12", fill: slice.color,
        stroke: "#333333", "stroke-width": "0.5",
      }));
    });
    svg.appendChild(svgElement("rect", {
      x: String(building.x), y: String(base), width: "28", height: "3",
      fill: "#555555",
    }));
  }
  container.appendChild(svg);
}

export function drawCharts(container: HTMLElement, series: ChartSeries[]): void {
  container.replaceChildren();
  const width = 220;
  const height = 90;
  for (const s of series) {
    const line = toPolyline(s, width, height - 20);
    const box = document.createElement("div");
    box.className = "chart";
    const title = document.createElement("div");
    title.className = "chart-title";
    title.textContent = s.title;
    box.appendChild(title);
    const svg = svgElement("svg", {
      width: String(width), height: String(height),
      viewBox: `0 0 ${width} ${height}`,
    });
    if (line.points.length > 0) {
      svg.appendChild(svgElement("polyline", {
        points: line.points.map((p) => `${p.x.toFixed(2)},${(p.y + 10).toFixed(2)}`).join(" "),
        fill: "none", stroke: "#0072B2", "stroke-width": "1.5",
      }));
    }
    box.appendChild(svg);
    const range = document.createElement("div");
    range.className = "chart-range";
    range.textContent = `${line.yMin.toPrecision(4)} … ${line.yMax.toPrecision(4)}`;
    box.appendChild(range);
    container.appendChild(box);
  }
}

export interface PanelHandlers {
  onPropose: (kind: string, sector: string | null, increments: number) => void;
  onVote: (ballot: number, choice: "yes" | "no") => void;
  onJoin: () => void;
}

export function drawPanel(container: HTMLElement, panel: PanelState,
                          handlers: PanelHandlers): void {
  container.replaceChildren();

  const status = document.createElement("div");
  status.className = "citizen-card";
  if (panel.citizen) {
    const c = panel.citizen;
    status.textContent =
      `${c.name} — ${c.status}, cash ${c.cash}, health ${c.health.toFixed(2)}, ` +
      `food ${c.food_stock}, quality of life ${c.qol.toFixed(1)}` +
      (c.sick ? " (sick)" : "");
  } else {
    status.textContent = "Not joined.";
    const joinBtn = document.createElement("button");
    joinBtn.textContent = "Join";
    joinBtn.onclick = handlers.onJoin;
    status.appendChild(joinBtn);
  }
  container.appendChild(status);

  for (const notice of panel.notices) {
    const div = document.createElement("div");
    div.className = "notice";
    div.textContent = notice;
    container.appendChild(div);
  }

  const proposeBox = document.createElement("div");
  proposeBox.className = "propose-box";
  const kindSelect = document.createElement("select");
  for (const kind of panel.proposalKinds) {
    const opt = document.createElement("option");
    opt.value = kind;
    opt.textContent = kind;
    kindSelect.appendChild(opt);
  }
  const sectorSelect = document.createElement("select");
  for (const sector of ["", "hospital", "capital_equipment", "consumer_good", "raw_material"]) {
    const opt = document.createElement("option");
    opt.value = sector;
    opt.textContent = sector || "(no sector)";
    sectorSelect.appendChild(opt);
  }
  const increments = document.createElement("input");
  increments.type = "number";
  increments.value = "1";
  const proposeBtn = document.createElement("button");
  proposeBtn.textContent = panel.myTurn ? "Propose" : "Not your turn";
  proposeBtn.disabled = !panel.myTurn;
  proposeBtn.onclick = () =>
    handlers.onPropose(kindSelect.value, sectorSelect.value || null,
                       Number(increments.value));
  proposeBox.append(kindSelect, sectorSelect, increments, proposeBtn);
  container.appendChild(proposeBox);

  const list = document.createElement("div");
  list.className = "ballots";
  for (const control of panel.ballots) {
    list.appendChild(ballotNode(control, handlers));
  }
  container.appendChild(list);
}

function ballotNode(control: BallotControl, handlers: PanelHandlers): HTMLElement {
  const b = control.ballot;
  const row = document.createElement("div");
  row.className = "ballot";
  const label = document.createElement("span");
  label.textContent =
    `#${b.id} ${b.kind}${b.sector ? " " + b.sector : ""} ` +
    `${b.increments > 0 ? "+" : ""}${b.increments || ""} ` +
    `(yes ${b.yes} / no ${b.no}, closes step ${b.deadline})`;
  row.appendChild(label);
  for (const choice of ["yes", "no"] as const) {
    const btn = document.createElement("button");
    btn.textContent = choice;
    btn.disabled = !control.canVote;
    btn.onclick = () => handlers.onVote(b.id, choice);
    row.appendChild(btn);
  }
  return row;
}

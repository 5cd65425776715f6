// Entry point: connect to the service (same origin, or ?server=http://...),
// stream snapshots, and keep the three views current.

import { chartSeries } from "./charts.js";
import { ServiceClient, ServiceError } from "./client.js";
import { drawCharts, drawPanel, drawScene } from "./dom.js";
import { buildPanel, validateProposal } from "./panel.js";
import { CitizenState, MetricsRow, ServerMessage, Snapshot } from "./protocol.js";
import { renderCity } from "./scene.js";

const params = new URLSearchParams(window.location.search);
const base = params.get("server") ?? window.location.origin;
const client = new ServiceClient(base);

let session: string | null = null;
let citizen: CitizenState | null = null;
let latest: Snapshot | null = null;
const history: MetricsRow[] = [];
const voted = new Set<number>();

const cityEl = document.getElementById("city")!;
const chartsEl = document.getElementById("charts")!;
const panelEl = document.getElementById("panel")!;
const statusEl = document.getElementById("status")!;

function flash(text: string): void {
  statusEl.textContent = text;
  setTimeout(() => {
    if (statusEl.textContent === text) statusEl.textContent = "";
  }, 4000);
}

function redraw(): void {
  if (latest) {
    drawScene(cityEl, renderCity(latest));
    drawCharts(chartsEl, chartSeries(history));
  }
  drawPanel(panelEl, buildPanel(session, citizen, latest, voted), {
    onJoin: join,
    onPropose: propose,
    onVote: vote,
  });
}

async function join(): Promise<void> {
  try {
    const doc = await client.join();
    session = doc.session;
    citizen = doc.citizen;
    flash(`joined as ${doc.citizen.name}`);
  } catch (err) {
    flash(String(err));
  }
  redraw();
}

async function propose(kind: string, sector: string | null, increments: number): Promise<void> {
  if (!session) return;
  try {
    const req = validateProposal(session, kind, sector, increments);
    await client.propose(req);
    flash("proposal submitted");
  } catch (err) {
    flash(err instanceof ServiceError ? `${err.code}: ${err.detail}` : String(err));
  }
  redraw();
}

async function vote(ballot: number, choice: "yes" | "no"): Promise<void> {
  if (!session) return;
  try {
    await client.vote({ session, ballot, choice });
    voted.add(ballot); // disable further clicks only once the server acked
    flash(`voted ${choice} on #${ballot}`);
  } catch (err) {
    flash(err instanceof ServiceError ? `${err.code}: ${err.detail}` : String(err));
  }
  redraw();
}

async function refreshCitizen(): Promise<void> {
  if (!session) return;
  try {
    const doc = await client.citizen(session);
    citizen = doc.citizen;
  } catch (err) {
    if (err instanceof ServiceError && err.status === 404) {
      citizen = citizen ? { ...citizen, alive: false } : null;
      session = null; // ended session: the player may rejoin
    }
  }
}

client.connectLive(async (message: ServerMessage) => {
  if (message.type === "snapshot") {
    latest = message;
    if (message.metrics && (history.length === 0 ||
        history[history.length - 1].step < message.metrics.step)) {
      history.push(message.metrics);
    }
    await refreshCitizen();
  } else if (message.type === "ballot") {
    if (latest && !latest.ballots.some((b) => b.id === message.ballot.id)) {
      latest.ballots.push(message.ballot);
    }
  } else if (message.type === "error" && message.session === session) {
    flash(`your citizen died`);
    session = null;
  }
  redraw();
});

redraw();

// Pure scene construction: snapshot in, drawable description out.
// Shape encodes employment status (pyramid = unemployed, cube = employed,
// sphere = owner), color encodes race, a marker flags sickness. Buildings
// are stacks of slices, one per resident firm, colored by industry.

import { EmploymentStatus, Snapshot } from "./protocol.js";
import { raceColor, sectorColor } from "./palette.js";

export type GlyphShape = "pyramid" | "cube" | "sphere";

export interface CitizenGlyph {
  personId: number;
  shape: GlyphShape;
  color: string;
  sickMarker: boolean;
  x: number;
  y: number;
}

export interface BuildingView {
  buildingId: number;
  x: number;
  slices: { firm: number; color: string; sector: string }[];
}

export interface SceneDescription {
  step: number;
  glyphs: CitizenGlyph[];
  buildings: BuildingView[];
}

export interface SceneError {
  error: string;
}

const STATUS_SHAPE: Record<EmploymentStatus, GlyphShape> = {
  unemployed: "pyramid",
  employed: "cube",
  owner: "sphere",
};

export function shapeForStatus(status: EmploymentStatus): GlyphShape {
  return STATUS_SHAPE[status];
}

// grid layout constants for the isometric floor
const COLUMNS = 25;
const CELL = 18;

export function renderCity(snapshot: Snapshot): SceneDescription | SceneError {
  if (!snapshot || snapshot.type !== "snapshot" || !Array.isArray(snapshot.persons)) {
    return { error: "malformed snapshot" };
  }
  const glyphs: CitizenGlyph[] = [];
  let slot = 0;
  for (const person of snapshot.persons) {
    if (!person.alive) {
      continue; // the dead leave the scene; they are never drawn as employable
    }
    const shape = STATUS_SHAPE[person.status];
    if (shape === undefined) {
      return { error: `unknown employment status ${String(person.status)}` };
    }
    glyphs.push({
      personId: person.id,
      shape,
      color: raceColor(person.race),
      sickMarker: person.sick,
      x: (slot % COLUMNS) * CELL,
      y: Math.floor(slot / COLUMNS) * CELL,
    });
    slot += 1;
  }
  const buildings: BuildingView[] = (snapshot.buildings ?? []).map((b, i) => ({
    buildingId: b.id,
    x: i * 2 * CELL,
    slices: b.slices.map((s) => ({
      firm: s.firm,
      sector: s.sector,
      color: sectorColor(s.sector),
    })),
  }));
  return { step: snapshot.step, glyphs, buildings };
}

export function isSceneError(scene: SceneDescription | SceneError): scene is SceneError {
  return (scene as SceneError).error !== undefined;
}

export function countShapes(scene: SceneDescription): Record<GlyphShape, number> {
  const counts: Record<GlyphShape, number> = { pyramid: 0, cube: 0, sphere: 0 };
  for (const glyph of scene.glyphs) {
    counts[glyph.shape] += 1;
  }
  return counts;
}

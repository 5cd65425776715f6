// Fixed, documented color tables (Okabe-Ito colorblind-safe palette).
// Census race categories and industry sectors each get a stable color;
// unknown categories fall back to gray so a new census table cannot crash
// rendering.

const OKABE_ITO = [
  "#E69F00", // orange
  "#56B4E9", // sky blue
  "#009E73", // bluish green
  "#F0E442", // yellow
  "#0072B2", // blue
  "#D55E00", // vermillion
  "#CC79A7", // reddish purple
];

export const RACE_COLORS: Record<string, string> = {
  white: OKABE_ITO[1],
  black: OKABE_ITO[0],
  asian: OKABE_ITO[2],
  hispanic: OKABE_ITO[6],
  other: OKABE_ITO[3],
};

export const SECTOR_COLORS: Record<string, string> = {
  hospital: OKABE_ITO[5],
  capital_equipment: OKABE_ITO[4],
  consumer_good: OKABE_ITO[2],
  raw_material: OKABE_ITO[0],
};

export const FALLBACK_COLOR = "#999999";

export function raceColor(race: string): string {
  return RACE_COLORS[race] ?? FALLBACK_COLOR;
}

export function sectorColor(sector: string): string {
  return SECTOR_COLORS[sector] ?? FALLBACK_COLOR;
}

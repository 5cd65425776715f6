// Wire types for the citysim governance service. The client is a pure
// projection of these messages: it never computes world state locally.

export const PROTOCOL_VERSION = 1;

export type EmploymentStatus = "unemployed" | "employed" | "owner";

export interface PersonGlyphData {
  id: number;
  status: EmploymentStatus;
  race: string;
  sick: boolean;
  alive: boolean;
}

export interface BuildingSlice {
  firm: number;
  sector: string;
}

export interface BuildingData {
  id: number;
  slices: BuildingSlice[];
}

export interface MetricsRow {
  step: number;
  mean_qol: number;
  bankruptcies: number;
  mean_material_price: number;
  mean_wage: number;
  consumer_profit: number;
  mean_consumer_price: number;
  population: number;
  sick: number;
  unemployment: number;
}

export interface BallotData {
  id: number;
  kind: string;
  sector: string | null;
  increments: number;
  proposer_session: string;
  opened_step: number;
  deadline: number;
  yes: number;
  no: number;
  status: "open" | "passed" | "failed";
}

export interface Snapshot {
  type: "snapshot";
  protocol: number;
  step: number;
  persons: PersonGlyphData[];
  buildings: BuildingData[];
  metrics: MetricsRow | null;
  ballots: BallotData[];
  current_turn: string | null;
}

export interface CitizenState {
  id: number;
  name: string;
  status: EmploymentStatus;
  race: string;
  cash: number;
  health: number;
  food_stock: number;
  qol: number;
  sick: boolean;
  alive: boolean;
}

export interface JoinedMessage {
  type: "joined";
  protocol: number;
  step: number;
  session: string;
  citizen: CitizenState;
}

export interface BallotMessage {
  type: "ballot";
  protocol: number;
  step: number;
  ballot: BallotData;
}

export interface AckMessage {
  type: "ack";
  protocol: number;
  step: number;
  ballot: BallotData;
}

export interface ErrorMessage {
  type: "error";
  protocol: number;
  step: number;
  error: string;
  detail?: string;
  session?: string;
}

export type ServerMessage =
  | Snapshot
  | JoinedMessage
  | BallotMessage
  | AckMessage
  | ErrorMessage;

export interface ProposeRequest {
  session: string;
  kind: string;
  sector: string | null;
  increments: number;
}

export interface VoteRequest {
  session: string;
  ballot: number;
  choice: "yes" | "no";
}

// the six legislation kinds a player can put on a ballot
export const LEGISLATION_KINDS = [
  "nationalize",
  "privatize",
  "set_welfare_payment",
  "set_welfare_threshold",
  "set_tax_rate",
  "set_subsidy",
] as const;

export const SECTOR_KINDS = new Set(["nationalize", "privatize", "set_subsidy"]);
export const DELTA_KINDS = new Set([
  "set_welfare_payment",
  "set_welfare_threshold",
  "set_tax_rate",
  "set_subsidy",
]);

export const SECTORS = [
  "hospital",
  "capital_equipment",
  "consumer_good",
  "raw_material",
] as const;

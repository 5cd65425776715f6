// Governance panel state: which controls are live, given the session and the
// latest snapshot. Pure, so turn/vote gating is testable without a DOM.

import {
  BallotData,
  CitizenState,
  DELTA_KINDS,
  LEGISLATION_KINDS,
  ProposeRequest,
  SECTOR_KINDS,
  Snapshot,
} from "./protocol.js";

export interface BallotControl {
  ballot: BallotData;
  canVote: boolean;
}

export interface PanelState {
  session: string | null;
  citizen: CitizenState | null;
  citizenQol: number | null;
  myTurn: boolean;
  proposalKinds: readonly string[];
  ballots: BallotControl[];
  notices: string[];
}

export function buildPanel(
  session: string | null,
  citizen: CitizenState | null,
  snapshot: Snapshot | null,
  votedBallots: Set<number>,
): PanelState {
  const myTurn = session !== null && snapshot?.current_turn === session;
  const ballots: BallotControl[] = (snapshot?.ballots ?? []).map((ballot) => ({
    ballot,
    canVote:
      session !== null &&
      ballot.status === "open" &&
      snapshot !== null &&
      snapshot.step < ballot.deadline &&
      !votedBallots.has(ballot.id),
  }));
  const notices: string[] = [];
  if (citizen && !citizen.alive) {
    notices.push("Your citizen has died. Rejoin for a new one.");
  }
  return {
    session,
    citizen,
    citizenQol: citizen ? citizen.qol : null, // server-computed; the UI never derives it
    myTurn,
    proposalKinds: LEGISLATION_KINDS,
    ballots,
    notices,
  };
}

export function validateProposal(
  session: string,
  kind: string,
  sector: string | null,
  increments: number,
): ProposeRequest {
  if (!(LEGISLATION_KINDS as readonly string[]).includes(kind)) {
    throw new Error(`unknown legislation kind: ${kind}`);
  }
  if (SECTOR_KINDS.has(kind) && !sector) {
    throw new Error(`${kind} requires a sector`);
  }
  if (DELTA_KINDS.has(kind) && (!Number.isInteger(increments) || increments === 0)) {
    throw new Error("delta kinds need a nonzero whole increment count");
  }
  return { session, kind, sector: sector ?? null, increments };
}

"""Player sessions, ballots, and the command log.

Players never touch the world directly: joins assign citizens, proposals open
ballots, and only a passed ballot's legislation reaches the engine — enqueued
at a step boundary. Every accepted command is appended to a log with its
receipt step, so a run can be replayed bit-exactly from (scenario, seed, log).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable

from ..engine.world import NS_API, WorldState
from ..firms import Sector
from ..government import DELTA_KINDS, Legislation, LegislationKind
from ..rng import Stream

API_PROTOCOL_VERSION = 1


class GovernanceError(Exception):
    """Base class; subclass names double as wire error codes."""

    status_code = 400


class NoCitizensAvailable(GovernanceError):
    status_code = 409


class NotYourTurn(GovernanceError):
    status_code = 409


class MalformedLegislation(GovernanceError):
    status_code = 422


class BallotClosed(GovernanceError):
    status_code = 409


class AlreadyVoted(GovernanceError):
    status_code = 409


class UnknownSession(GovernanceError):
    status_code = 404


class UnknownBallot(GovernanceError):
    status_code = 404


@dataclass
class PlayerSession:
    id: str
    citizen: int
    connected: bool = True
    ended: bool = False  # set when the assigned citizen dies


@dataclass
class Ballot:
    id: int
    legislation: Legislation
    proposer_session: str
    opened_step: int
    deadline: int
    votes: dict[str, str] = field(default_factory=dict)
    status: str = "open"  # open -> passed | failed

    @property
    def yes(self) -> int:
        return sum(1 for v in self.votes.values() if v == "yes")

    @property
    def no(self) -> int:
        return sum(1 for v in self.votes.values() if v == "no")

    def as_dict(self) -> dict:
        return {
            "id": self.id,
            "kind": self.legislation.kind.value,
            "sector": self.legislation.sector.value if self.legislation.sector else None,
            "increments": self.legislation.increments,
            "proposer_session": self.proposer_session,
            "opened_step": self.opened_step,
            "deadline": self.deadline,
            "yes": self.yes,
            "no": self.no,
            "status": self.status,
        }


def build_legislation(citizen: int, kind: str, sector: str | None, increments: int) -> Legislation:
    """Validate and quantize a raw proposal into Legislation."""
    try:
        leg_kind = LegislationKind(kind)
    except ValueError:
        raise MalformedLegislation(f"unknown legislation kind {kind!r}")
    sector_enum: Sector | None = None
    if sector is not None:
        try:
            sector_enum = Sector(sector)
        except ValueError:
            raise MalformedLegislation(f"unknown sector {sector!r}")
    if not isinstance(increments, int) or isinstance(increments, bool):
        raise MalformedLegislation("delta must be a whole number of increments")
    if leg_kind in DELTA_KINDS and increments == 0:
        raise MalformedLegislation("delta kinds need a nonzero increment count")
    if leg_kind in (LegislationKind.NATIONALIZE, LegislationKind.PRIVATIZE, LegislationKind.SET_SUBSIDY):
        if sector_enum is None:
            raise MalformedLegislation(f"{kind} requires a sector")
    return Legislation(
        kind=leg_kind, proposer=citizen, sector=sector_enum, increments=increments
    )


class GovernanceState:
    """Sessions, round-robin proposal turns, ballots, and the command log."""

    def __init__(self, seed: int, voting_window: int, log_path: str | Path | None = None):
        self.seed = seed
        self.voting_window = voting_window
        self.sessions: dict[str, PlayerSession] = {}
        self.assigned_citizens: set[int] = set()
        self.turn_order: list[str] = []
        self.ballots: dict[int, Ballot] = {}
        self._next_session = 1
        self._next_ballot = 1
        self._join_stream = Stream(seed, 0, NS_API, 0)
        # fixed seeded offset: the turn holder is a pure function of
        # (offset, proposals so far, active sessions), so replay cannot drift
        self._turn_offset = Stream(seed, 0, NS_API, 1).randrange(1 << 30)
        self._turn_advances = 0
        self.command_log: list[dict] = []
        self.log_path = Path(log_path) if log_path else None
        if self.log_path:
            self.log_path.parent.mkdir(parents=True, exist_ok=True)
            self.log_path.write_text("")

    # ------------------------------------------------------------- commands
    def _record(self, step: int, entry: dict) -> None:
        entry = {"step": step, **entry}
        self.command_log.append(entry)
        if self.log_path:
            with open(self.log_path, "a") as fh:
                fh.write(json.dumps(entry, separators=(",", ":")) + "\n")

    def join(self, world: WorldState) -> PlayerSession:
        """Assign a uniformly-drawn unassigned alive citizen to a new session."""
        pool = [
            p.id
            for p in world.persons
            if p.alive and p.id not in self.assigned_citizens
        ]
        if not pool:
            raise NoCitizensAvailable("every alive citizen is already assigned")
        citizen = pool[self._join_stream.randrange(len(pool))]
        session = PlayerSession(id=f"s{self._next_session}", citizen=citizen)
        self._next_session += 1
        self.sessions[session.id] = session
        self.assigned_citizens.add(citizen)
        self.turn_order.append(session.id)
        self._record(world.step, {"type": "join", "session": session.id, "citizen": citizen})
        return session

    def session(self, session_id: str) -> PlayerSession:
        s = self.sessions.get(session_id)
        if s is None or s.ended:
            raise UnknownSession(f"no active session {session_id!r}")
        return s

    def current_turn(self) -> str | None:
        """Whose turn it is to propose: round-robin after a seeded-random start."""
        active = [sid for sid in self.turn_order if not self.sessions[sid].ended]
        if not active:
            return None
        return active[(self._turn_offset + self._turn_advances) % len(active)]

    def propose(
        self, world: WorldState, session_id: str, kind: str, sector: str | None, increments: int
    ) -> Ballot:
        session = self.session(session_id)
        if self.current_turn() != session_id:
            raise NotYourTurn(f"it is not session {session_id!r}'s proposal turn")
        legislation = build_legislation(session.citizen, kind, sector, increments)
        ballot = Ballot(
            id=self._next_ballot,
            legislation=legislation,
            proposer_session=session_id,
            opened_step=world.step,
            deadline=world.step + self.voting_window,
        )
        self._next_ballot += 1
        self.ballots[ballot.id] = ballot
        self._turn_advances += 1
        self._record(
            world.step,
            {
                "type": "propose",
                "session": session_id,
                "kind": kind,
                "sector": sector,
                "increments": increments,
                "ballot": ballot.id,
            },
        )
        return ballot

    def vote(self, world: WorldState, session_id: str, ballot_id: int, choice: str) -> Ballot:
        session = self.session(session_id)
        ballot = self.ballots.get(ballot_id)
        if ballot is None:
            raise UnknownBallot(f"no ballot {ballot_id}")
        if ballot.status != "open" or world.step >= ballot.deadline:
            raise BallotClosed(f"ballot {ballot_id} is closed")
        if session.id in ballot.votes:
            raise AlreadyVoted(f"session {session_id!r} already voted on ballot {ballot_id}")
        if choice not in ("yes", "no"):
            raise MalformedLegislation("choice must be yes or no")
        ballot.votes[session.id] = choice
        self._record(
            world.step,
            {"type": "vote", "session": session_id, "ballot": ballot_id, "choice": choice},
        )
        return ballot

    # ------------------------------------------------------- step boundary
    def tally_due(self, world: WorldState) -> list[Ballot]:
        """Close ballots whose deadline arrived; enqueue the passed ones.

        Simple majority of cast votes; a tie or an empty ballot fails. Called
        at the step boundary so legislation lands in the phase-one drain.
        """
        closed = []
        for ballot in sorted(self.ballots.values(), key=lambda b: b.id):
            if ballot.status != "open" or world.step < ballot.deadline:
                continue
            if ballot.yes > ballot.no:
                ballot.status = "passed"
                world.legislation_queue.append(ballot.legislation)
            else:
                ballot.status = "failed"
            closed.append(ballot)
        return closed

    def end_sessions_of_dead_citizens(self, world: WorldState) -> list[PlayerSession]:
        ended = []
        for session in self.sessions.values():
            if not session.ended and not world.persons[session.citizen].alive:
                session.ended = True
                self.assigned_citizens.discard(session.citizen)
                ended.append(session)
        return ended

    def open_ballots(self) -> list[Ballot]:
        return [b for b in sorted(self.ballots.values(), key=lambda b: b.id) if b.status == "open"]


def replay_command_log(simulation_factory, log: Iterable[dict] | str | Path, steps: int):
    """Re-run a recorded session: same scenario/seed + same commands at the
    same receipt steps reproduce the metrics series exactly.

    ``simulation_factory`` builds a fresh Simulation; the log may be a path to
    a JSONL file or an iterable of entries.
    """
    if isinstance(log, (str, Path)):
        entries = [json.loads(line) for line in Path(log).read_text().splitlines() if line]
    else:
        entries = list(log)
    sim = simulation_factory()
    gov = GovernanceState(seed=sim.world.seed, voting_window=sim.world.params.voting_window)
    by_step: dict[int, list[dict]] = {}
    for e in entries:
        by_step.setdefault(e["step"], []).append(e)
    for _ in range(steps):
        for entry in by_step.get(sim.world.step, ()):
            if entry["type"] == "join":
                gov.join(sim.world)
            elif entry["type"] == "propose":
                gov.propose(
                    sim.world,
                    entry["session"],
                    entry["kind"],
                    entry["sector"],
                    entry["increments"],
                )
            elif entry["type"] == "vote":
                gov.vote(sim.world, entry["session"], entry["ballot"], entry["choice"])
        gov.tally_due(sim.world)
        sim.step()
        gov.end_sessions_of_dead_citizens(sim.world)
    return sim, gov

"""The long-running simulation a service instance hosts.

One lock serializes everything: player commands land between steps, stepping
tallies due ballots first (so passed legislation is drained by the next
step's first phase), and every step fans an immutable snapshot out to all
live-stream subscribers.
"""

from __future__ import annotations

import queue
import threading
import time
from pathlib import Path

from ..agents import quality_of_life
from ..engine.metrics import metrics_csv
from ..engine.stepper import Simulation
from .governance import API_PROTOCOL_VERSION, GovernanceState


def employment_status(person) -> str:
    if person.owned_business is not None:
        return "owner"
    if person.employer is not None:
        return "employed"
    return "unemployed"


def build_snapshot(world, governance: GovernanceState) -> dict:
    persons = [
        {
            "id": p.id,
            "status": employment_status(p),
            "race": p.demographics.race if p.demographics else "",
            "sick": p.sick,
            "alive": p.alive,
        }
        for p in world.persons
    ]
    by_building: dict[int, list] = {b.id: [] for b in world.buildings}
    for f in world.active_firms():
        by_building[f.building].append({"firm": f.id, "sector": f.sector.value})
    buildings = [{"id": b.id, "slices": by_building[b.id]} for b in world.buildings]
    return {
        "type": "snapshot",
        "protocol": API_PROTOCOL_VERSION,
        "step": world.step,
        "persons": persons,
        "buildings": buildings,
        "metrics": world.metrics[-1].as_dict() if world.metrics else None,
        "ballots": [b.as_dict() for b in governance.open_ballots()],
        "current_turn": governance.current_turn(),
    }


class SimulationHost:
    """Thread-safe facade over a Simulation plus its governance state."""

    def __init__(
        self,
        simulation: Simulation,
        command_log: str | Path | None = None,
        step_interval: float | None = None,
    ):
        self.simulation = simulation
        self.governance = GovernanceState(
            seed=simulation.world.seed,
            voting_window=simulation.world.params.voting_window,
            log_path=command_log,
        )
        self.lock = threading.RLock()
        self.subscribers: dict[int, queue.Queue] = {}
        self._next_subscriber = 1
        self.step_interval = step_interval
        self._pause = threading.Event()
        self._stop = threading.Event()
        self._loop_thread: threading.Thread | None = None

    @property
    def world(self):
        return self.simulation.world

    def _citizen_state(self, person) -> dict:
        qol = 0.0
        if person.alive:
            qol = quality_of_life(person, self.world.params.utility())
        return {
            "id": person.id,
            "name": person.name,
            "status": employment_status(person),
            "race": person.demographics.race if person.demographics else "",
            "cash": person.cash,
            "health": person.health,
            "food_stock": person.food_stock,
            "qol": qol,
            "sick": person.sick,
            "alive": person.alive,
        }

    # ------------------------------------------------------------- commands
    def join(self) -> dict:
        with self.lock:
            session = self.governance.join(self.world)
            citizen = self.world.persons[session.citizen]
            return {
                "type": "joined",
                "protocol": API_PROTOCOL_VERSION,
                "step": self.world.step,
                "session": session.id,
                "citizen": self._citizen_state(citizen),
            }

    def citizen(self, session_id: str) -> dict:
        with self.lock:
            session = self.governance.session(session_id)
            return {
                "type": "joined",
                "protocol": API_PROTOCOL_VERSION,
                "step": self.world.step,
                "session": session.id,
                "citizen": self._citizen_state(self.world.persons[session.citizen]),
            }

    def propose(self, session: str, kind: str, sector: str | None, increments: int) -> dict:
        with self.lock:
            ballot = self.governance.propose(self.world, session, kind, sector, increments)
            message = {
                "type": "ballot",
                "protocol": API_PROTOCOL_VERSION,
                "step": self.world.step,
                "ballot": ballot.as_dict(),
            }
            self._broadcast(message)
            return message

    def vote(self, session: str, ballot_id: int, choice: str) -> dict:
        with self.lock:
            ballot = self.governance.vote(self.world, session, ballot_id, choice)
            return {
                "type": "ack",
                "protocol": API_PROTOCOL_VERSION,
                "step": self.world.step,
                "ballot": ballot.as_dict(),
            }

    # ------------------------------------------------------------- stepping
    def step(self) -> dict:
        """One engine step at the governance boundary: tally, step, notify."""
        with self.lock:
            self.governance.tally_due(self.world)
            self.simulation.step()
            ended = self.governance.end_sessions_of_dead_citizens(self.world)
            snapshot = build_snapshot(self.world, self.governance)
            self._broadcast(snapshot)
            for session in ended:
                self._broadcast(
                    {
                        "type": "error",
                        "protocol": API_PROTOCOL_VERSION,
                        "step": self.world.step,
                        "error": "CitizenDied",
                        "session": session.id,
                    }
                )
            return snapshot

    def snapshot(self) -> dict:
        with self.lock:
            return build_snapshot(self.world, self.governance)

    def metrics_csv(self) -> str:
        with self.lock:
            return metrics_csv(self.world.metrics)

    # ------------------------------------------------------------ streaming
    def subscribe(self) -> tuple[int, queue.Queue]:
        with self.lock:
            sid = self._next_subscriber
            self._next_subscriber += 1
            q: queue.Queue = queue.Queue()
            self.subscribers[sid] = q
            return sid, q

    def unsubscribe(self, sid: int) -> None:
        with self.lock:
            self.subscribers.pop(sid, None)

    def _broadcast(self, message: dict) -> None:
        for q in self.subscribers.values():
            q.put(message)

    # ------------------------------------------------------------- run loop
    def start_loop(self) -> None:
        """Background pacing loop for serve mode; step() stays callable for
        manual control when no interval is configured."""
        if self.step_interval is None or self._loop_thread is not None:
            return
        self._loop_thread = threading.Thread(target=self._loop, daemon=True)
        self._loop_thread.start()

    def _loop(self) -> None:
        while not self._stop.is_set():
            if self._pause.is_set():
                time.sleep(0.05)
                continue
            self.step()
            time.sleep(self.step_interval)

    def pause(self) -> None:
        self._pause.set()

    def resume(self) -> None:
        self._pause.clear()

    def stop(self) -> None:
        self._stop.set()
        if self._loop_thread is not None:
            self._loop_thread.join(timeout=5)
            self._loop_thread = None

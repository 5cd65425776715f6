"""Lockstep worker/arbiter protocol over length-prefixed JSON messages.

Workers are stateless compute servers: for each compute phase the arbiter
ships them entity views plus the step context, they return intents, and the
arbiter (which owns the authoritative world) merges and applies. Because all
intent functions draw from counter-based streams keyed by entity, a phase can
be recomputed after a worker dies — or split across any number of workers —
without changing a single draw.

Message types: RegisterWorker, AssignPartition, PhaseBegin, IntentSet,
PhaseCommit, StepDone, Command, Error. Every message carries the protocol
version.
"""

from __future__ import annotations

import hashlib
import json
import socket
import struct
import threading

from ..params import Params, params_from_wire
from . import phases

PROTOCOL_VERSION = 1
_LEN = struct.Struct(">I")


class WorkerTimeout(Exception):
    pass


class ProtocolVersionMismatch(Exception):
    pass


def send_msg(sock: socket.socket, msg: dict) -> None:
    payload = json.dumps(msg, separators=(",", ":")).encode()
    sock.sendall(_LEN.pack(len(payload)) + payload)


def recv_msg(sock: socket.socket) -> dict:
    header = _recv_exactly(sock, _LEN.size)
    (length,) = _LEN.unpack(header)
    return json.loads(_recv_exactly(sock, length).decode())


def _recv_exactly(sock: socket.socket, n: int) -> bytes:
    chunks = []
    while n > 0:
        chunk = sock.recv(n)
        if not chunk:
            raise ConnectionError("peer closed the connection")
        chunks.append(chunk)
        n -= len(chunk)
    return b"".join(chunks)


def _intent_digest(intents: list[dict]) -> str:
    blob = json.dumps(intents, separators=(",", ":"), sort_keys=True).encode()
    return hashlib.sha256(blob).hexdigest()[:16]


class Arbiter:
    """Registers workers, scatters compute phases, gathers and merges intents.

    Satisfies the engine's executor interface, so a Simulation steps through
    remote workers exactly as it would through the local executor.
    """

    def __init__(
        self,
        params: Params,
        seed: int,
        expected_workers: int,
        host: str = "127.0.0.1",
        port: int = 0,
        timeout: float = 30.0,
    ):
        if expected_workers < 1:
            raise ValueError("need at least one worker")
        self.params = params
        self.seed = seed
        self.expected = expected_workers
        self.timeout = timeout
        self._server = socket.create_server((host, port))
        self._server.settimeout(timeout)
        self.address = self._server.getsockname()
        self._workers: list[socket.socket] = []

    def wait_for_workers(self) -> None:
        while len(self._workers) < self.expected:
            conn, _ = self._server.accept()
            conn.settimeout(self.timeout)
            msg = recv_msg(conn)
            if msg.get("type") != "RegisterWorker":
                send_msg(conn, {"type": "Error", "protocol": PROTOCOL_VERSION,
                                "error": "expected RegisterWorker"})
                conn.close()
                continue
            if msg.get("protocol") != PROTOCOL_VERSION:
                send_msg(conn, {"type": "Error", "protocol": PROTOCOL_VERSION,
                                "error": "ProtocolVersionMismatch"})
                conn.close()
                raise ProtocolVersionMismatch(
                    f"worker offered protocol {msg.get('protocol')!r}"
                )
            self._workers.append(conn)
        for index, conn in enumerate(self._workers):
            send_msg(conn, {
                "type": "AssignPartition",
                "protocol": PROTOCOL_VERSION,
                "worker_index": index,
                "worker_count": len(self._workers),
                "seed": self.seed,
                "params": self.params.as_dict(),
            })

    # executor interface -------------------------------------------------
    def compute(self, phase: int, views: list[dict], ctx: dict, step: int) -> list[dict]:
        attempt = 0
        while True:
            attempt += 1
            live = list(self._workers)
            if not live:
                raise WorkerTimeout("all workers lost")
            k = len(live)
            buckets: list[list[dict]] = [[] for _ in range(k)]
            for view in views:
                buckets[view["id"] % k].append(view)
            try:
                for i, conn in enumerate(live):
                    send_msg(conn, {
                        "type": "PhaseBegin",
                        "protocol": PROTOCOL_VERSION,
                        "step": step,
                        "phase": phase,
                        "attempt": attempt,
                        "ctx": ctx,
                        "views": buckets[i],
                    })
                merged: list[dict] = []
                for conn in live:
                    merged.extend(self._gather(conn, step, phase, attempt))
            except (OSError, ConnectionError) as exc:
                # a worker died mid-phase: drop it, reassign, recompute.
                # intents are pure per entity, so the retry changes nothing.
                self._drop_failed(exc)
                continue
            merged.sort(key=lambda i: i["id"])
            commit = {
                "type": "PhaseCommit",
                "protocol": PROTOCOL_VERSION,
                "step": step,
                "phase": phase,
                "attempt": attempt,
                "digest": _intent_digest(merged),
            }
            for conn in list(self._workers):
                send_msg(conn, commit)
            return merged

    def _gather(self, conn: socket.socket, step: int, phase: int, attempt: int) -> list[dict]:
        while True:
            msg = recv_msg(conn)
            if msg.get("type") != "IntentSet":
                continue
            if (
                msg.get("step") != step
                or msg.get("phase") != phase
                or msg.get("attempt") != attempt
            ):
                continue  # stale reply from an aborted attempt: rejected
            return msg["intents"]

    def _drop_failed(self, exc: Exception) -> None:
        alive = []
        for conn in self._workers:
            dead = False
            try:
                conn.setblocking(False)
                try:
                    probe = conn.recv(1, socket.MSG_PEEK)
                    dead = probe == b""  # orderly close
                except BlockingIOError:
                    pass  # healthy but idle
                conn.setblocking(True)
                conn.settimeout(self.timeout)
            except OSError:
                dead = True
            if dead:
                try:
                    conn.close()
                except OSError:
                    pass
            else:
                alive.append(conn)
        if not alive:
            raise WorkerTimeout(f"no workers survived: {exc}")
        self._workers = alive

    def step_done(self, step: int) -> None:
        for conn in self._workers:
            if conn is None:
                continue
            try:
                send_msg(conn, {"type": "StepDone", "protocol": PROTOCOL_VERSION, "step": step})
            except OSError:
                pass

    def shutdown(self) -> None:
        for conn in self._workers:
            if conn is None:
                continue
            try:
                send_msg(conn, {"type": "Command", "protocol": PROTOCOL_VERSION,
                                "command": "stop"})
            except OSError:
                pass
            try:
                conn.close()
            except OSError:
                pass
        self._workers = []
        self._server.close()


def run_worker(
    host: str,
    port: int,
    die_at: tuple[int, int] | None = None,
    protocol: int = PROTOCOL_VERSION,
) -> None:
    """A worker process/thread body: register, then answer PhaseBegin messages
    until told to stop. ``die_at=(step, phase)`` closes the socket mid-phase,
    for fault-injection tests."""
    sock = socket.create_connection((host, port))
    try:
        send_msg(sock, {"type": "RegisterWorker", "protocol": protocol})
        assign = recv_msg(sock)
        if assign.get("type") == "Error":
            return
        params = params_from_wire(assign["params"])
        seed = assign["seed"]
        while True:
            msg = recv_msg(sock)
            mtype = msg.get("type")
            if mtype == "PhaseBegin":
                step, phase = msg["step"], msg["phase"]
                if die_at is not None and (step, phase) >= die_at:
                    return  # simulated crash mid-phase
                intents = phases.compute_intents(
                    phase, msg["views"], msg["ctx"], params, seed, step
                )
                send_msg(sock, {
                    "type": "IntentSet",
                    "protocol": protocol,
                    "step": step,
                    "phase": phase,
                    "attempt": msg.get("attempt", 1),
                    "intents": intents,
                })
            elif mtype in ("PhaseCommit", "StepDone"):
                continue
            elif mtype == "Command" and msg.get("command") == "stop":
                return
    except (ConnectionError, OSError):
        return
    finally:
        try:
            sock.close()
        except OSError:
            pass


def start_worker_threads(
    address: tuple[str, int], count: int, die_at: tuple[int, int] | None = None
) -> list[threading.Thread]:
    """In-process workers speaking the real socket protocol."""
    threads = []
    for i in range(count):
        t = threading.Thread(
            target=run_worker,
            args=(address[0], address[1]),
            kwargs={"die_at": die_at if i == 0 else None},
            daemon=True,
            name=f"citysim-worker-{i}",
        )
        t.start()
        threads.append(t)
    return threads


class DistributedRunner:
    """A scenario stepped through k workers: spawns the arbiter, local worker
    threads (or waits for external ones), and a Simulation bound to them."""

    def __init__(
        self,
        scenario,
        n: int,
        seed: int,
        workers: int,
        spawn_local_workers: bool = True,
        die_at: tuple[int, int] | None = None,
        timeout: float = 30.0,
        bind_host: str = "127.0.0.1",
        bind_port: int = 0,
        **sim_kwargs,
    ):
        from .stepper import Simulation

        self.arbiter = Arbiter(
            scenario.effective_params(),
            seed,
            expected_workers=workers,
            host=bind_host,
            port=bind_port,
            timeout=timeout,
        )
        self.threads: list[threading.Thread] = []
        if spawn_local_workers:
            self.threads = start_worker_threads(self.arbiter.address, workers, die_at=die_at)
        self.arbiter.wait_for_workers()
        self.simulation = Simulation(
            scenario, n=n, seed=seed, executor=self.arbiter, **sim_kwargs
        )

    def run(self, steps: int):
        return self.simulation.run(steps)

    def close(self) -> None:
        self.arbiter.shutdown()
        for t in self.threads:
            t.join(timeout=5)

    def __enter__(self) -> "DistributedRunner":
        return self

    def __exit__(self, *exc) -> None:
        self.close()

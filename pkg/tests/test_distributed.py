from __future__ import annotations

import socket
import threading

import pytest

from citysim.engine import Simulation, load_scenario
from citysim.engine.distributed import (
    PROTOCOL_VERSION,
    Arbiter,
    DistributedRunner,
    ProtocolVersionMismatch,
    recv_msg,
    run_worker,
    send_msg,
    start_worker_threads,
)
from citysim.params import Params

STEPS = 15
POP = 80


def local_csv(seed=42) -> str:
    sim = Simulation(load_scenario({}), n=POP, seed=seed)
    sim.run(STEPS)
    return sim.metrics_csv()


def test_single_worker_matches_local():
    with DistributedRunner(load_scenario({}), n=POP, seed=42, workers=1) as runner:
        runner.run(STEPS)
        assert runner.simulation.metrics_csv() == local_csv()


def test_four_workers_match_local():
    with DistributedRunner(load_scenario({}), n=POP, seed=42, workers=4) as runner:
        runner.run(STEPS)
        assert runner.simulation.metrics_csv() == local_csv()


def test_worker_death_mid_phase_retried():
    runner = DistributedRunner(
        load_scenario({}), n=POP, seed=42, workers=3, die_at=(4, 2)
    )
    try:
        runner.run(STEPS)
        assert runner.simulation.metrics_csv() == local_csv()
        assert len(runner.arbiter._workers) == 2  # the dead worker was dropped
    finally:
        runner.close()


def test_protocol_version_mismatch_rejected():
    params = Params()
    arbiter = Arbiter(params, seed=1, expected_workers=1, timeout=5)
    t = threading.Thread(
        target=run_worker,
        args=(arbiter.address[0], arbiter.address[1]),
        kwargs={"protocol": 999},
        daemon=True,
    )
    t.start()
    with pytest.raises(ProtocolVersionMismatch):
        arbiter.wait_for_workers()
    arbiter.shutdown()
    t.join(timeout=5)


def test_stale_intent_set_rejected():
    """A reply tagged with an old attempt is ignored, not merged."""
    params = Params()
    arbiter = Arbiter(params, seed=7, expected_workers=1, timeout=5)

    def fake_worker():
        sock = socket.create_connection(arbiter.address)
        send_msg(sock, {"type": "RegisterWorker", "protocol": PROTOCOL_VERSION})
        recv_msg(sock)  # AssignPartition
        msg = recv_msg(sock)  # PhaseBegin
        stale = {
            "type": "IntentSet",
            "protocol": PROTOCOL_VERSION,
            "step": msg["step"],
            "phase": msg["phase"],
            "attempt": 0,  # stale attempt tag
            "intents": [{"id": 999, "bogus": True}],
        }
        send_msg(sock, stale)
        good = dict(stale, attempt=msg["attempt"], intents=[{"id": 1, "ok": True}])
        send_msg(sock, good)
        recv_msg(sock)  # PhaseCommit
        sock.close()

    t = threading.Thread(target=fake_worker, daemon=True)
    t.start()
    arbiter.wait_for_workers()
    intents = arbiter.compute(phase=1, views=[{"id": 1}], ctx={}, step=1)
    assert intents == [{"id": 1, "ok": True}]
    arbiter.shutdown()
    t.join(timeout=5)


def test_registration_garbage_rejected():
    params = Params()
    arbiter = Arbiter(params, seed=1, expected_workers=1, timeout=5)

    results = {}

    def bad_then_good():
        bad = socket.create_connection(arbiter.address)
        send_msg(bad, {"type": "Command", "protocol": PROTOCOL_VERSION})
        reply = recv_msg(bad)
        results["reply"] = reply
        bad.close()
        run_worker(arbiter.address[0], arbiter.address[1])

    t = threading.Thread(target=bad_then_good, daemon=True)
    t.start()
    arbiter.wait_for_workers()
    assert results["reply"]["type"] == "Error"
    arbiter.shutdown()
    t.join(timeout=5)


def test_worker_threads_shut_down_cleanly():
    runner = DistributedRunner(load_scenario({}), n=30, seed=5, workers=2)
    runner.run(3)
    runner.close()
    for t in runner.threads:
        assert not t.is_alive()

"""Acceptance criteria, one test per criterion, each printing a pass/fail line.

Run with `pytest tests/test_acceptance.py -v -s` to see the line per criterion.
"""

from __future__ import annotations

import time

import pytest

from citysim.engine import Simulation, all_scenarios, load_scenario
from citysim.engine.distributed import DistributedRunner
from citysim.engine.metrics import METRICS_HEADER
from citysim.epidemics import ContagionParams, spread
from citysim.firms import Firm, ProductionParams, Sector, labor_power, production_capacity
from citysim.markets import Offer, pick_supplier
from citysim.popgen import fixture_net4, prior_sample
from citysim.rng import Stream
from citysim.service import replay_command_log
from citysim.service.host import SimulationHost
from citysim.socialgraph import SocialGraph

from conftest import enumerate_joint
from test_learning import bandit_trial


def report(name: str, ok: bool, detail: str = "") -> None:
    print(f"[{'PASS' if ok else 'FAIL'}] {name}" + (f" — {detail}" if detail else ""))
    assert ok, f"{name}: {detail}"


def test_worked_production_example():
    t0 = time.perf_counter()
    pp = ProductionParams(labor_cost_per_good=10, labor_per_worker=20, labor_per_equipment=10)
    adv = ProductionParams(labor_cost_per_good=10, labor_per_worker=20, labor_per_equipment=50)
    firm = Firm(id=1, sector=Sector.RAW_MATERIAL, owner=1, building=0,
                employees={i: 1 for i in range(5)})
    checks = (
        labor_power(5, 0, pp) == 100,
        labor_power(4, 4, pp) == 120,
        labor_power(2, 2, adv) == 140,
        production_capacity(firm, pp) == 10,
    )
    elapsed_ms = (time.perf_counter() - t0) * 1000
    report(
        "worked production example",
        all(checks) and elapsed_ms < 1.0,
        f"values {checks}, {elapsed_ms:.3f} ms",
    )


def test_bayes_net_fidelity():
    net = fixture_net4()
    exact = enumerate_joint(net)
    order = net.topological_order
    trials = 100_000
    t0 = time.perf_counter()
    counts: dict[tuple[str, ...], int] = {}
    rng = Stream(2024, 0, 0)
    for i in range(trials):
        s = prior_sample(net, rng.substream(i))
        key = tuple(s[n] for n in order)
        counts[key] = counts.get(key, 0) + 1
    elapsed = time.perf_counter() - t0
    l1 = sum(abs(counts.get(k, 0) / trials - p) for k, p in exact.items())
    l1 += sum(c / trials for k, c in counts.items() if k not in exact)
    report(
        "bayes net prior-sampling fidelity",
        l1 <= 0.02 and elapsed < 10.0,
        f"joint L1 {l1:.4f} over {trials} samples in {elapsed:.1f}s",
    )


def test_q_learning_bandit_oracle():
    expected = (0.1, 0.5, 0.3)
    oracle = max(range(3), key=lambda a: expected[a])
    t0 = time.perf_counter()
    wins = sum(1 for seed in range(100) if bandit_trial(seed, expected) == oracle)
    elapsed = time.perf_counter() - t0
    report(
        "q-learning bandit convergence",
        wins >= 95 and elapsed < 5.0,
        f"{wins}/100 seeds greedy-optimal in {elapsed:.1f}s",
    )


def test_market_inverse_price_weighting():
    offers = [Offer(1, 1, 10**9), Offer(2, 3, 10**9)]
    rng = Stream(7, 0, 0)
    trials = 100_000
    picked = sum(1 for _ in range(trials) if pick_supplier(offers, rng) == 1)
    f1 = picked / trials
    ok = abs(f1 - 0.75) <= 0.005 and abs((1 - f1) - 0.25) <= 0.005
    report("market inverse-price weighting", ok, f"frequencies {f1:.4f}/{1 - f1:.4f}")


def test_contagion_mean_field():
    n, infected0 = 200, 5
    g = SocialGraph(range(n), edges=[(i, j) for i in range(n) for j in range(i + 1, n)])
    cp = ContagionParams(contact_rate=0.1, transmission_rate=0.1)  # c*t = 0.01
    expected = (n - infected0) * (1.0 - (1.0 - 0.01) ** infected0)
    runs = 1000
    total = sum(len(spread(g, set(range(infected0)), cp, Stream(k, 7, 9))) for k in range(runs))
    mean = total / runs
    rel = abs(mean - expected) / expected
    report(
        "contagion mean-field first step",
        rel <= 0.05,
        f"mean {mean:.3f} vs analytic {expected:.3f} ({rel * 100:.2f}%)",
    )


def test_closed_economy_conservation():
    sim = Simulation(load_scenario({}), n=1000, seed=2024)
    expected = sim.world.total_cash()
    ok = True
    worst = None
    for _ in range(100):
        sim.step()
        total = sim.world.total_cash()
        if total != expected:
            ok = False
            worst = (sim.world.step, total - expected)
            break
    report(
        "closed-economy cash conservation",
        ok,
        "constant to the currency unit across 100 steps"
        if ok else f"leak {worst[1]} at step {worst[0]}",
    )


def test_distribution_equivalence():
    scenario = load_scenario({})
    local = Simulation(scenario, n=150, seed=99)
    local.run(50)
    with DistributedRunner(scenario, n=150, seed=99, workers=1) as r1:
        r1.run(50)
        csv1 = r1.simulation.metrics_csv()
    with DistributedRunner(scenario, n=150, seed=99, workers=4) as r4:
        r4.run(50)
        csv4 = r4.simulation.metrics_csv()
    ok = csv1 == csv4 == local.metrics_csv()
    report(
        "determinism and k=1 vs k=4 equivalence",
        ok,
        "metrics files byte-identical over 50 steps",
    )


def test_scenario_sweep_liveness():
    figure_fields = (
        "mean_qol", "bankruptcies", "mean_material_price",
        "mean_wage", "consumer_profit", "mean_consumer_price",
    )
    ran = 0
    for scenario in all_scenarios():
        sim = Simulation(scenario, n=120, seed=7)
        rows = sim.run(200)
        assert len(rows) == 200, scenario.name
        csv = sim.metrics_csv()
        assert csv.splitlines()[0] == METRICS_HEADER
        for field in figure_fields:
            assert field in csv.splitlines()[0].replace("bankruptcies", "bankruptcies")
        if (scenario.food_level.value, scenario.tech_level.value,
                scenario.disease_level.value) == ("regular", "regular", "regular"):
            tail = rows[50:]
            moving = sum(
                1 for f in ("mean_qol", "mean_material_price", "mean_wage",
                            "consumer_profit", "mean_consumer_price")
                if len({getattr(r, f) for r in tail}) > 1
            )
            assert moving >= 4, "regular scenario series look frozen"
        ran += 1
    report("27-scenario sweep liveness", ran == 27, f"{ran} scenarios x 200 steps")


def test_command_log_replay():
    seed, n, steps = 4242, 80, 15
    sim = Simulation(load_scenario({}), n=n, seed=seed)
    host = SimulationHost(sim)
    gov = host.governance
    gov.join(host.world)
    gov.join(host.world)
    host.step()
    holder = gov.current_turn()
    ballot = gov.propose(host.world, holder, "set_welfare_payment", None, 3)
    for sid in list(gov.sessions):
        gov.vote(host.world, sid, ballot.id, "yes")
    for _ in range(steps - 1):
        host.step()
    assert ballot.status == "passed"
    recorded = host.metrics_csv()

    replayed, _ = replay_command_log(
        lambda: Simulation(load_scenario({}), n=n, seed=seed),
        list(gov.command_log),
        steps=steps,
    )
    ok = replayed.metrics_csv() == recorded
    report("player command-log replay", ok, f"{steps}-step voting run reproduced exactly")

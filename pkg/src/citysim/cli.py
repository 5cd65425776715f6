"""Command-line entry points.

Batch experiments (`run`, `sweep`, `popgen sample`) execute locally; the live
service is started with `serve` (or `run --listen`), and the `client` group
is a thin HTTP client over a running service. `worker` joins a remote
arbiter for distributed runs.
"""

from __future__ import annotations

import json
import sys
import threading
from pathlib import Path

import click

from .engine.distributed import DistributedRunner, run_worker
from .engine.metrics import write_metrics
from .engine.scenario import all_scenarios, load_scenario
from .engine.stepper import Simulation
from .engine.world import NS_INIT_POPULATION
from .popgen import default_name_tables, generate_population, load_bayes_net, prior_sample
from .rng import Stream
from .socialgraph import FriendshipCoefficients


@click.group()
def main():
    """Deterministic city-economy simulator with live player governance."""


# ----------------------------------------------------------------- popgen


@main.group()
def popgen():
    """Population synthesis utilities."""


@popgen.command("sample")
@click.option("--net", "net_path", required=True, type=click.Path(exists=True))
@click.option("--n", "count", required=True, type=int)
@click.option("--seed", default=0, type=int, show_default=True)
@click.option("--out", "out_path", required=True, type=click.Path())
def popgen_sample(net_path: str, count: int, seed: int, out_path: str):
    """Draw N samples from a net; writes persons (or raw assignments) as JSONL."""
    net = load_bayes_net(net_path)
    stream = Stream(seed, 0, NS_INIT_POPULATION)
    out = Path(out_path)
    out.parent.mkdir(parents=True, exist_ok=True)
    demographic_nodes = {"race", "sex", "age", "education", "neighborhood", "income"}
    with open(out, "w") as fh:
        if demographic_nodes <= {n.id for n in net.nodes}:
            for p in generate_population(net, default_name_tables(), count, stream):
                fh.write(json.dumps({
                    "id": p.id,
                    "name": p.name,
                    "race": p.demographics.race,
                    "sex": p.demographics.sex,
                    "age": p.demographics.age,
                    "education": p.demographics.education,
                    "neighborhood": p.demographics.neighborhood,
                    "income": p.demographics.income,
                    "cash": p.cash,
                    "frugality": p.frugality,
                }) + "\n")
        else:
            for i in range(count):
                fh.write(json.dumps(prior_sample(net, stream.substream(i))) + "\n")
    click.echo(f"wrote {count} samples to {out}")


# -------------------------------------------------------------------- run


def _serve_in_thread(host_obj, listen: str):
    import uvicorn

    from .service.app import create_app

    bind_host, _, port = listen.partition(":")
    app = create_app(host_obj, frontend_dir=_frontend_dist())
    config = uvicorn.Config(app, host=bind_host or "127.0.0.1", port=int(port or 8000),
                            log_level="warning")
    server = uvicorn.Server(config)
    thread = threading.Thread(target=server.run, daemon=True)
    thread.start()
    return server, thread


def _frontend_dist() -> Path | None:
    dist = Path(__file__).resolve().parents[2] / "frontend" / "dist"
    return dist if dist.is_dir() else None


@main.command("run")
@click.option("--scenario", "scenario_path", type=click.Path(exists=True), default=None,
              help="scenario file; defaults to the regular/regular/regular scenario")
@click.option("--steps", required=True, type=int)
@click.option("--seed", default=0, type=int, show_default=True)
@click.option("--out", "out_dir", required=True, type=click.Path())
@click.option("--workers", default=1, type=int, show_default=True)
@click.option("--listen", default=None, help="serve the governance API at HOST:PORT while running")
@click.option("--worker-listen", default=None,
              help="bind the arbiter at HOST:PORT and wait for external workers "
                   "(citysim worker --connect) instead of spawning local ones")
@click.option("--population", default=1000, type=int, show_default=True)
@click.option("--step-interval", default=0.0, type=float, show_default=True,
              help="pause between steps when serving")
@click.option("--diagnostics", is_flag=True,
              help="also write per-firm state and market transaction logs")
@click.option("--net", "net_path", type=click.Path(exists=True), default=None,
              help="demographic Bayes net file (defaults to the bundled net)")
@click.option("--coeffs", "coeffs_path", type=click.Path(exists=True), default=None,
              help="friendship coefficients file")
def run_cmd(scenario_path, steps, seed, out_dir, workers, listen, worker_listen,
            population, step_interval, diagnostics, net_path, coeffs_path):
    """Run one scenario for N steps and export metrics."""
    scenario = load_scenario(scenario_path) if scenario_path else load_scenario({})
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    diag_dir = out if diagnostics else None
    net = load_bayes_net(net_path) if net_path else None
    coeffs = FriendshipCoefficients.from_file(coeffs_path) if coeffs_path else None

    runner = None
    if workers > 1 or worker_listen:
        bind_host, _, bind_port = (worker_listen or "127.0.0.1:0").partition(":")
        if worker_listen:
            click.echo(f"waiting for {workers} workers on {worker_listen}")
        runner = DistributedRunner(
            scenario, n=population, seed=seed, workers=workers,
            spawn_local_workers=not worker_listen,
            bind_host=bind_host or "127.0.0.1", bind_port=int(bind_port or 0),
            diagnostics_dir=diag_dir, net=net, coeffs=coeffs,
        )
        sim = runner.simulation
    else:
        sim = Simulation(scenario, n=population, seed=seed, diagnostics_dir=diag_dir,
                         net=net, coeffs=coeffs)

    try:
        if listen:
            import time

            from .service import SimulationHost

            host_obj = SimulationHost(sim, command_log=out / "commands.jsonl")
            server, _ = _serve_in_thread(host_obj, listen)
            click.echo(f"serving on {listen}; stepping {steps} steps")
            for _ in range(steps):
                host_obj.step()
                if step_interval:
                    time.sleep(step_interval)
            server.should_exit = True
        else:
            for _ in range(steps):
                sim.step()
    finally:
        if runner is not None:
            runner.close()

    path = out / "metrics.csv"
    write_metrics(sim.metrics, path)
    click.echo(f"wrote {path}")


@main.command("sweep")
@click.option("--all-scenarios", "sweep_all", is_flag=True, required=True)
@click.option("--steps", required=True, type=int)
@click.option("--seed", default=0, type=int, show_default=True)
@click.option("--out", "out_dir", required=True, type=click.Path())
@click.option("--population", default=300, type=int, show_default=True)
def sweep_cmd(sweep_all, steps, seed, out_dir, population):
    """Run all 27 axis combinations and export one metrics file each."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    for scenario in all_scenarios():
        sim = Simulation(scenario, n=population, seed=seed)
        sim.run(steps)
        path = out / f"{scenario.name}.csv"
        write_metrics(sim.metrics, path)
        click.echo(f"{scenario.name}: {steps} steps -> {path}")


# ------------------------------------------------------------------ serve


@main.command("serve")
@click.option("--scenario", "scenario_path", type=click.Path(exists=True), default=None)
@click.option("--seed", default=0, type=int, show_default=True)
@click.option("--population", default=500, type=int, show_default=True)
@click.option("--host", "bind_host", default="127.0.0.1", show_default=True)
@click.option("--port", default=8000, type=int, show_default=True)
@click.option("--step-interval", default=2.0, type=float, show_default=True,
              help="seconds between steps; 0 steps only via POST /control")
@click.option("--command-log", default=None, type=click.Path())
def serve_cmd(scenario_path, seed, population, bind_host, port, step_interval, command_log):
    """Host a live simulation with the governance API."""
    import uvicorn

    from .service import SimulationHost
    from .service.app import create_app

    scenario = load_scenario(scenario_path) if scenario_path else load_scenario({})
    sim = Simulation(scenario, n=population, seed=seed)
    host_obj = SimulationHost(
        sim,
        command_log=command_log,
        step_interval=step_interval if step_interval > 0 else None,
    )
    host_obj.start_loop()
    app = create_app(host_obj, frontend_dir=_frontend_dist())
    click.echo(f"citysim service on http://{bind_host}:{port} (seed {seed}, n {population})")
    uvicorn.run(app, host=bind_host, port=port, log_level="info")


@main.command("worker")
@click.option("--connect", "address", required=True, help="arbiter HOST:PORT")
def worker_cmd(address: str):
    """Join a remote arbiter as a compute worker."""
    host, _, port = address.partition(":")
    run_worker(host, int(port))


# ------------------------------------------------------------------ client


@main.group()
def client():
    """Thin HTTP client for a running citysim service."""


def _request(method: str, server: str, path: str, payload: dict | None = None) -> dict:
    import httpx

    r = httpx.request(method, server.rstrip("/") + path, json=payload, timeout=30)
    try:
        doc = r.json()
    except ValueError:
        click.echo(r.text)
        sys.exit(1)
    if r.status_code >= 400:
        click.echo(f"error {r.status_code}: {doc.get('error')}: {doc.get('detail')}", err=True)
        sys.exit(1)
    return doc


@client.command("join")
@click.option("--server", default="http://127.0.0.1:8000", show_default=True)
def client_join(server):
    doc = _request("POST", server, "/join")
    click.echo(json.dumps(doc, indent=2))


@client.command("state")
@click.option("--server", default="http://127.0.0.1:8000", show_default=True)
def client_state(server):
    doc = _request("GET", server, "/state")
    metrics = doc.get("metrics") or {}
    click.echo(json.dumps({
        "step": doc["step"],
        "current_turn": doc["current_turn"],
        "open_ballots": doc["ballots"],
        "metrics": metrics,
        "alive": sum(1 for p in doc["persons"] if p["alive"]),
    }, indent=2))


@client.command("propose")
@click.option("--server", default="http://127.0.0.1:8000", show_default=True)
@click.option("--session", required=True)
@click.option("--kind", required=True)
@click.option("--sector", default=None)
@click.option("--increments", default=0, type=int)
def client_propose(server, session, kind, sector, increments):
    doc = _request("POST", server, "/propose", {
        "session": session, "kind": kind, "sector": sector, "increments": increments,
    })
    click.echo(json.dumps(doc, indent=2))


@client.command("vote")
@click.option("--server", default="http://127.0.0.1:8000", show_default=True)
@click.option("--session", required=True)
@click.option("--ballot", required=True, type=int)
@click.option("--choice", type=click.Choice(["yes", "no"]), required=True)
def client_vote(server, session, ballot, choice):
    doc = _request("POST", server, "/vote", {
        "session": session, "ballot": ballot, "choice": choice,
    })
    click.echo(json.dumps(doc, indent=2))


@client.command("step")
@click.option("--server", default="http://127.0.0.1:8000", show_default=True)
def client_step(server):
    doc = _request("POST", server, "/control", {"command": "step"})
    click.echo(json.dumps(doc, indent=2))


if __name__ == "__main__":
    main()

"""Step orchestration: the same pipeline whether intents are computed
in-process or by remote workers."""

from __future__ import annotations

from pathlib import Path
from typing import Protocol

from ..params import Params
from ..popgen import BayesNet, NameTables
from ..socialgraph import FriendshipCoefficients
from . import phases
from .diagnostics import DiagnosticsSink
from .metrics import MetricsRow, metrics_csv, write_metrics
from .phases import StepScratch
from .world import WorldState, init_world


class IntentExecutor(Protocol):
    def compute(self, phase: int, views: list[dict], ctx: dict, step: int) -> list[dict]: ...


class LocalExecutor:
    """Evaluates compute phases in-process; the k=1 degenerate deployment."""

    def __init__(self, params: Params, seed: int):
        self.params = params
        self.seed = seed

    def compute(self, phase: int, views: list[dict], ctx: dict, step: int) -> list[dict]:
        return phases.compute_intents(phase, views, ctx, self.params, self.seed, step)


def _intents(executor: IntentExecutor, world: WorldState, phase: int, ctx: dict, step: int):
    views = phases.build_views(world, phase)
    intents = executor.compute(phase, views, ctx, step)
    return sorted(intents, key=lambda i: i["id"])


def step_world(
    world: WorldState,
    executor: IntentExecutor | None = None,
    validate: bool = False,
    diagnostics=None,
) -> MetricsRow:
    """Advance one step through the canonical phase order; appends exactly one
    metrics row. With ``validate`` the closed-economy invariant is asserted."""
    if executor is None:
        executor = LocalExecutor(world.params, world.seed)
    seed = world.seed
    step = world.step + 1
    cash_before = world.total_cash() if validate else 0

    for p in world.persons:
        p.wage_income = 0
    for f in world.active_firms():
        f.reset_step_books()
    ctx = phases.build_context(world)
    scratch = StepScratch()

    phases.apply_legislation_phase(world)
    phases.apply_person_intents(
        world, _intents(executor, world, phases.P_PERSON, ctx, step), scratch
    )
    phases.apply_firm_plans(
        world, _intents(executor, world, phases.P_FIRM_PLAN, ctx, step), scratch
    )
    phases.run_labor_phase(world, ctx, scratch, seed, step)
    phases.run_materials_phase(world, scratch, seed, step)
    phases.run_equipment_phase(world, scratch, seed, step)
    phases.run_production_phase(world)
    phases.run_pricing_phase(world)
    phases.run_consumer_phase(world, scratch, seed, step)
    phases.apply_contagion_intents(
        world, _intents(executor, world, phases.P_CONTAGION, ctx, step)
    )
    phases.run_hospital_phase(world, scratch, seed, step)
    phases.apply_health_intents(
        world, _intents(executor, world, phases.P_HEALTH, ctx, step)
    )
    phases.run_government_phase(world, seed, step)
    row = phases.build_metrics_row(world, step)

    world.metrics.append(row)
    world.step = step
    if validate and world.total_cash() != cash_before:
        raise AssertionError(
            f"money leak at step {step}: {cash_before} -> {world.total_cash()}"
        )
    if diagnostics is not None:
        diagnostics.after_step(world, scratch, step)
    step_done = getattr(executor, "step_done", None)
    if step_done is not None:
        step_done(step)
    return row


class Simulation:
    """A scenario bound to a world, stepped locally or through an executor."""

    def __init__(
        self,
        scenario,
        n: int = 1000,
        seed: int = 0,
        net: BayesNet | None = None,
        names: NameTables | None = None,
        coeffs: FriendshipCoefficients | None = None,
        executor: IntentExecutor | None = None,
        validate: bool = False,
        diagnostics_dir: str | Path | None = None,
    ):
        self.scenario = scenario
        self.world = init_world(scenario, net=net, names=names, coeffs=coeffs, n=n, seed=seed)
        self.executor = executor
        self.validate = validate
        self.diagnostics = DiagnosticsSink(diagnostics_dir) if diagnostics_dir else None

    def step(self) -> MetricsRow:
        return step_world(
            self.world, self.executor, validate=self.validate, diagnostics=self.diagnostics
        )

    def run(self, steps: int) -> list[MetricsRow]:
        if steps < 0:
            raise ValueError("steps must be >= 0")
        return [self.step() for _ in range(steps)]

    @property
    def metrics(self) -> list[MetricsRow]:
        return self.world.metrics

    def metrics_csv(self) -> str:
        return metrics_csv(self.world.metrics)

    def write_metrics(self, path: str | Path) -> None:
        write_metrics(self.world.metrics, path)

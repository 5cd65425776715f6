"""Firm production planning, pricing, and workforce management.

Four sectors: hospitals sell treatment slots; raw-material firms produce from
labor alone; consumer-good and capital-equipment firms consume materials.
Labor power combines workers and equipment, one operator per machine.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable

from .agents import GOVERNMENT_ID
from .learning import QTable, SignalThresholds, discretize_signals, joint_action_dirs, select_action


class Sector(str, Enum):
    HOSPITAL = "hospital"
    CAPITAL_EQUIPMENT = "capital_equipment"
    CONSUMER_GOOD = "consumer_good"
    RAW_MATERIAL = "raw_material"


MATERIAL_CONSUMERS = (Sector.CONSUMER_GOOD, Sector.CAPITAL_EQUIPMENT)
PRODUCERS = (Sector.CAPITAL_EQUIPMENT, Sector.CONSUMER_GOOD, Sector.RAW_MATERIAL)


class NotAProducer(Exception):
    pass


@dataclass(frozen=True)
class ProductionParams:
    labor_cost_per_good: int = 10
    material_cost_per_good: int = 1
    labor_per_worker: int = 20
    labor_per_equipment: int = 10


@dataclass
class Firm:
    id: int
    sector: Sector
    owner: int  # person id, or GOVERNMENT_ID
    building: int
    cash: int = 0
    supply: int = 0
    materials: int = 0
    equipment: int = 0
    employees: dict[int, int] = field(default_factory=dict)  # person id -> wage
    price: int = 10
    profit_margin: float = 0.0
    q_table: QTable = field(default_factory=QTable)
    supply_target: int = 10
    last_sold: int = 0
    last_profit: int = 0
    prev_profit: int = 0
    bankrupt: bool = False
    deficit_streak: int = 0
    pending_q: tuple[tuple[int, ...], int] | None = None
    # per-step books, reset at every step start
    step_revenue: int = 0
    step_sold: int = 0
    step_produced: int = 0
    step_wages: int = 0
    step_materials_spend: int = 0
    step_equipment_spend: int = 0
    step_rent: int = 0
    step_tax: int = 0
    step_profit: int = 0

    @property
    def government_owned(self) -> bool:
        return self.owner == GOVERNMENT_ID

    def reset_step_books(self) -> None:
        self.step_revenue = 0
        self.step_sold = 0
        self.step_produced = 0
        self.step_wages = 0
        self.step_materials_spend = 0
        self.step_equipment_spend = 0
        self.step_rent = 0
        self.step_tax = 0
        self.step_profit = 0

    def wage_bill(self) -> int:
        return sum(self.employees.values())

    def roster(self) -> list[int]:
        return sorted(self.employees)


def labor_power(workers: int, equipment: int, pp: ProductionParams) -> int:
    """Worker output plus operated equipment; each machine needs one operator."""
    return workers * pp.labor_per_worker + min(equipment, workers) * pp.labor_per_equipment


def production_capacity(f: Firm, pp: ProductionParams) -> int:
    lp = labor_power(len(f.employees), f.equipment, pp)
    if f.sector == Sector.HOSPITAL:
        raise NotAProducer("hospitals have no production capacity")
    by_labor = lp // pp.labor_cost_per_good
    if f.sector == Sector.RAW_MATERIAL:
        return by_labor
    return min(by_labor, f.materials // pp.material_cost_per_good)


def optimal_mix(
    target_labor: int,
    pp: ProductionParams,
    wage_cost: float,
    equipment_step_cost: float,
    current_equipment: int,
) -> tuple[int, int]:
    """Cheapest (workers, equipment) meeting the labor target.

    Exhaustive over worker counts with minimal equipment top-up; ties prefer
    fewer workers, then less equipment. Already-owned machines are sunk.
    """
    if target_labor <= 0:
        return 0, 0
    lpw, lpe = pp.labor_per_worker, pp.labor_per_equipment
    w_max = math.ceil(target_labor / lpw)
    if lpe <= 0:
        return w_max, 0
    best: tuple[int, int] | None = None
    best_cost = math.inf
    for w in range(w_max + 1):
        shortfall = target_labor - w * lpw
        e = 0 if shortfall <= 0 else math.ceil(shortfall / lpe)
        if e > w:
            continue  # nobody to operate the extra machines
        cost = w * wage_cost + max(0, e - current_equipment) * equipment_step_cost
        if cost < best_cost:
            best_cost = cost
            best = (w, e)
    assert best is not None  # w_max with e=0 is always feasible
    return best


@dataclass(frozen=True)
class PlanningContext:
    """Step-start snapshot a firm plans against."""

    mean_wage: float
    mean_equipment_price: float
    pp: ProductionParams
    thresholds: SignalThresholds = SignalThresholds()
    profit_increment: float = 0.05
    supply_increment: int = 5
    starting_wage: int = 120
    wage_increment: float = 0.1
    extravagant_wage_range: float = 2.0
    patients_per_worker: int = 10
    equipment_amortization_steps: int = 10


@dataclass(frozen=True)
class Plan:
    state: tuple[int, ...]
    action: int
    profit_margin: float
    supply_target: int
    fired_overpaid: tuple[int, ...]
    downsized: tuple[int, ...]
    openings: tuple[int, int] | None  # (positions, wage)
    equipment_to_buy: int
    materials_to_buy: int


def fire_overpaid(f: Firm, mean_wage: float, extravagant_wage_range: float) -> list[int]:
    """Employees paid above mean_wage * range, in id order."""
    cutoff = mean_wage * extravagant_wage_range
    return [pid for pid in f.roster() if f.employees[pid] > cutoff]


def downsize(f: Firm, n: int, rng, weight_of: Callable[[int], float] | None = None) -> list[int]:
    """n employees drawn without replacement by firing weight (default uniform)."""
    roster = f.roster()
    if n > len(roster):
        raise ValueError("cannot downsize more employees than exist")
    fired: list[int] = []
    weights = [1.0 if weight_of is None else weight_of(pid) for pid in roster]
    for _ in range(n):
        idx = rng.weighted_index(weights)
        fired.append(roster.pop(idx))
        weights.pop(idx)
    return fired


def plan_step(f: Firm, ctx: PlanningContext, rng) -> Plan:
    """One planning pass: learned margin/supply move, then the cheapest staffing mix.

    Signals are last step's sales, leftover stock, and profit change. Worker
    shortfalls become openings; excesses become weighted random layoffs after
    any extravagant-wage firings.
    """
    if f.bankrupt:
        raise ValueError("bankrupt firms do not plan")
    state = discretize_signals(
        f.last_sold, f.supply, f.last_profit - f.prev_profit, ctx.thresholds
    )
    action = select_action(f.q_table, state, rng)
    margin_dir, supply_dir = joint_action_dirs(action)
    margin = max(-1.0, f.profit_margin + margin_dir * ctx.profit_increment)
    target = max(0, f.supply_target + supply_dir * ctx.supply_increment)

    fired = fire_overpaid(f, ctx.mean_wage, ctx.extravagant_wage_range)
    kept = [pid for pid in f.roster() if pid not in set(fired)]

    offer_wage = max(ctx.starting_wage, int(round(ctx.mean_wage * (1.0 + ctx.wage_increment))))
    if f.sector == Sector.HOSPITAL:
        desired_workers = math.ceil(target / ctx.patients_per_worker) if target > 0 else 0
        desired_equipment = 0
    else:
        target_labor = target * ctx.pp.labor_cost_per_good
        equip_step_cost = ctx.mean_equipment_price / max(1, ctx.equipment_amortization_steps)
        desired_workers, desired_equipment = optimal_mix(
            target_labor, ctx.pp, offer_wage, equip_step_cost, f.equipment
        )

    delta = desired_workers - len(kept)
    downsized: list[int] = []
    openings: tuple[int, int] | None = None
    if delta < 0:
        pool = Firm(  # transient view over the kept roster for the weighted draw
            id=f.id, sector=f.sector, owner=f.owner, building=f.building,
            employees={pid: f.employees[pid] for pid in kept},
        )
        downsized = downsize(pool, -delta, rng)
    elif delta > 0:
        openings = (delta, offer_wage)

    equipment_to_buy = max(0, desired_equipment - f.equipment)
    materials_to_buy = 0
    if f.sector in MATERIAL_CONSUMERS:
        materials_to_buy = max(0, target * ctx.pp.material_cost_per_good - f.materials)

    return Plan(
        state=state,
        action=action,
        profit_margin=margin,
        supply_target=target,
        fired_overpaid=tuple(fired),
        downsized=tuple(downsized),
        openings=openings,
        equipment_to_buy=equipment_to_buy,
        materials_to_buy=materials_to_buy,
    )


def set_price(f: Firm, produced: int, step_costs: int, min_price_tick: int = 1) -> int:
    """Unit cost marked up by the learned margin, floored at the price tick."""
    if produced < 0:
        raise ValueError("produced must be >= 0")
    unit_cost = step_costs / max(produced, 1)
    price = int(round(unit_cost * (1.0 + f.profit_margin)))
    f.price = max(min_price_tick, price)
    return f.price


def produce(f: Firm, pp: ProductionParams) -> int:
    """Make as much as capacity allows, up to the step's supply target."""
    if f.bankrupt:
        raise ValueError("bankrupt firms do not produce")
    output = min(production_capacity(f, pp), f.supply_target)
    f.supply += output
    if f.sector in MATERIAL_CONSUMERS:
        f.materials -= output * pp.material_cost_per_good
    f.step_produced = output
    return output


@dataclass(frozen=True)
class Settlement:
    wages: dict[int, int]
    rent: int
    went_bankrupt: bool


def settle_and_maybe_bankrupt(f: Firm, rent: int, bankruptcy_grace: int) -> Settlement:
    """Debit rent and wages; after ``bankruptcy_grace`` consecutive deficit
    steps a privately-owned firm folds. Government firms never do; their
    deficit is absorbed by the treasury (handled by the caller).
    """
    wages = {pid: f.employees[pid] for pid in f.roster()}
    f.cash -= rent + sum(wages.values())
    f.step_rent = rent
    f.step_wages = sum(wages.values())
    went_bankrupt = False
    if f.cash < 0:
        f.deficit_streak += 1
    else:
        f.deficit_streak = 0
    if f.deficit_streak >= bankruptcy_grace and not f.government_owned:
        f.bankrupt = True
        f.supply = 0
        f.materials = 0
        f.equipment = 0
        f.employees = {}
        went_bankrupt = True
    return Settlement(wages=wages, rent=rent, went_bankrupt=went_bankrupt)

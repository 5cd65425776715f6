"""The canonical per-step phase pipeline.

Each step runs fourteen phases in a fixed order. Four of them (person
intents, firm planning, contagion, health) are *compute phases*: pure
functions from serialized entity views to intent records, safe to evaluate
anywhere — that is what workers execute remotely. Everything else (market
clearings, transfers, metrics) is a serial fold over intents in canonical
entity order, performed once by whoever owns the world.

Views and intents are plain JSON-safe dicts in both local and distributed
modes, so the two modes traverse literally the same code.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from statistics import fmean

from ..agents import (
    GOVERNMENT_ID,
    choose_sector,
    desired_food_units,
    founding_eligible,
    health_after_step,
    needs_job_flag,
    quality_of_life,
)
from ..epidemics import treat, wants_treatment
from ..firms import (
    MATERIAL_CONSUMERS,
    Firm,
    PlanningContext,
    Sector,
    plan_step,
    produce,
    set_price,
    settle_and_maybe_bankrupt,
)
from ..government import apply_legislation, collect_taxes, distribute_welfare, govern_step
from ..learning import QTable, discretize_signals, update
from ..markets import (
    JobOpening,
    MarketEmpty,
    Offer,
    Transaction,
    clear_goods_market,
    clear_labor_market,
    pick_supplier,
)
from ..params import Params
from ..rng import Stream
from .metrics import MetricsRow
from .world import WorldState

P_LEGISLATION = 0
P_PERSON = 1
P_FIRM_PLAN = 2
P_LABOR = 3
P_MATERIALS = 4
P_EQUIPMENT = 5
P_PRODUCTION = 6
P_PRICING = 7
P_CONSUMER = 8
P_CONTAGION = 9
P_HOSPITAL = 10
P_HEALTH = 11
P_GOVERNMENT = 12
P_METRICS = 13

PHASE_COUNT = 14
COMPUTE_PHASES = (P_PERSON, P_FIRM_PLAN, P_CONTAGION, P_HEALTH)

MARKET_ENTITY = -100  # stream entity id for serial market folds


@dataclass
class StepScratch:
    """Intra-step working set carried between phases."""

    job_seekers: list[int] = field(default_factory=list)
    food_demands: dict[int, int] = field(default_factory=dict)
    openings: list[JobOpening] = field(default_factory=list)
    materials_to_buy: dict[int, int] = field(default_factory=dict)
    equipment_to_buy: dict[int, int] = field(default_factory=dict)
    transactions: list[tuple[str, "Transaction"]] = field(default_factory=list)


# ------------------------------------------------------------------ context


def build_context(world: WorldState) -> dict:
    """Step-start snapshot of the aggregates entity decisions read."""
    params = world.params
    alive = world.alive_persons()
    wages = [p.wage for p in alive if p.employer is not None]
    food_prices = [f.price for f in world.firms_in_sector(Sector.CONSUMER_GOOD)]
    equip_prices = [f.price for f in world.firms_in_sector(Sector.CAPITAL_EQUIPMENT)]
    profits: dict[str, float] = {}
    for sector in Sector:
        sector_firms = world.firms_in_sector(sector)
        profits[sector.value] = (
            fmean(f.last_profit for f in sector_firms) if sector_firms else 0.0
        )
    return {
        "mean_wage": fmean(wages) if wages else 0.0,
        "mean_food_price": fmean(food_prices) if food_prices else float(params.initial_price),
        "mean_equipment_price": (
            fmean(equip_prices) if equip_prices else float(params.initial_price)
        ),
        "sector_profits": profits,
        "vacancies": [[bid, rent] for bid, rent in world.vacancies()],
    }


# ------------------------------------------------------------- view builders


def build_views(world: WorldState, phase: int) -> list[dict]:
    """Entity views (plain dicts, ascending id) for a compute phase."""
    if phase == P_PERSON:
        return [
            {
                "id": p.id,
                "cash": p.cash,
                "wage": p.wage,
                "owner": p.owned_business is not None,
                "food_stock": p.food_stock,
            }
            for p in world.persons
            if p.alive
        ]
    if phase == P_FIRM_PLAN:
        return [
            {
                "id": f.id,
                "sector": f.sector.value,
                "supply": f.supply,
                "materials": f.materials,
                "equipment": f.equipment,
                "employees": [[pid, f.employees[pid]] for pid in f.roster()],
                "profit_margin": f.profit_margin,
                "supply_target": f.supply_target,
                "last_sold": f.last_sold,
                "last_profit": f.last_profit,
                "prev_profit": f.prev_profit,
                "q": f.q_table.to_wire(),
            }
            for f in world.active_firms()
        ]
    if phase == P_CONTAGION:
        sick = {p.id for p in world.persons if p.alive and p.sick}
        views = []
        for p in world.persons:
            if not p.alive:
                continue
            view: dict = {"id": p.id, "sick": p.sick}
            if p.sick:
                # full neighbor list (draw alignment) with susceptibility flags
                view["neighbors"] = [
                    [nb, nb not in sick and world.persons[nb].alive]
                    for nb in world.graph.neighbors(p.id)
                ]
            views.append(view)
        return views
    if phase == P_HEALTH:
        return [
            {"id": p.id, "food_stock": p.food_stock, "sick": p.sick, "health": p.health}
            for p in world.persons
            if p.alive
        ]
    raise ValueError(f"phase {phase} has no entity views")


# ---------------------------------------------------------- intent functions


def compute_intents(
    phase: int, views: list[dict], ctx: dict, params: Params, seed: int, step: int
) -> list[dict]:
    """Pure per-entity decisions for one compute phase.

    Every random draw comes from a stream keyed (seed, step, phase, entity),
    so the result is independent of where or in what batches this runs.
    """
    fn = {
        P_PERSON: _person_intent,
        P_FIRM_PLAN: _firm_plan_intent,
        P_CONTAGION: _contagion_intent,
        P_HEALTH: _health_intent,
    }[phase]
    return [fn(view, ctx, params, seed, step) for view in views]


def _person_intent(view: dict, ctx: dict, params: Params, seed: int, step: int) -> dict:
    stream = Stream(seed, step, P_PERSON, view["id"])
    sector = None
    rents = [rent for _, rent in ctx["vacancies"]]
    if founding_eligible(
        view["cash"], view["owner"], rents, params.min_business_capital, params.starting_wage
    ):
        sector = choose_sector(ctx["sector_profits"], params.sector_choice_floor, stream)
    job = needs_job_flag(
        view["wage"],
        view["owner"],
        ctx["mean_wage"],
        ctx["mean_food_price"],
        params.wage_under_market_multiplier,
        params.base_min_consumption,
    )
    food = desired_food_units(
        view["food_stock"],
        ctx["mean_food_price"],
        params.consumer_good_utility,
        params.base_min_consumption,
    )
    return {"id": view["id"], "sector": sector, "job": job, "food": food}


def _firm_plan_intent(view: dict, ctx: dict, params: Params, seed: int, step: int) -> dict:
    firm = Firm(
        id=view["id"],
        sector=Sector(view["sector"]),
        owner=0,
        building=0,
        supply=view["supply"],
        materials=view["materials"],
        equipment=view["equipment"],
        employees={int(pid): int(w) for pid, w in view["employees"]},
        profit_margin=view["profit_margin"],
        supply_target=view["supply_target"],
        last_sold=view["last_sold"],
        last_profit=view["last_profit"],
        prev_profit=view["prev_profit"],
        q_table=QTable.from_wire(view["q"]),
    )
    plan_ctx = PlanningContext(
        mean_wage=ctx["mean_wage"],
        mean_equipment_price=ctx["mean_equipment_price"],
        pp=params.production(),
        thresholds=params.thresholds(),
        profit_increment=params.profit_increment,
        supply_increment=params.supply_increment,
        starting_wage=params.starting_wage,
        wage_increment=params.wage_increment,
        extravagant_wage_range=params.extravagant_wage_range,
        patients_per_worker=params.patients_per_worker,
        equipment_amortization_steps=params.equipment_amortization_steps,
    )
    plan = plan_step(firm, plan_ctx, Stream(seed, step, P_FIRM_PLAN, view["id"]))
    return {
        "id": view["id"],
        "state": list(plan.state),
        "action": plan.action,
        "margin": plan.profit_margin,
        "target": plan.supply_target,
        "fired": list(plan.fired_overpaid),
        "downsized": list(plan.downsized),
        "openings": list(plan.openings) if plan.openings else None,
        "equip_buy": plan.equipment_to_buy,
        "mat_buy": plan.materials_to_buy,
    }


def _contagion_intent(view: dict, ctx: dict, params: Params, seed: int, step: int) -> dict:
    stream = Stream(seed, step, P_CONTAGION, view["id"])
    if view["sick"]:
        p_edge = params.contact_rate * params.transmission_rate
        infected = []
        for nb, susceptible in view["neighbors"]:
            draw = stream.random()  # one draw per edge, susceptible or not
            if susceptible and draw < p_edge:
                infected.append(nb)
        return {"id": view["id"], "infected": infected}
    seeded = params.patient_zero_prob > 0.0 and stream.random() < params.patient_zero_prob
    return {"id": view["id"], "seeded": bool(seeded)}


def _health_intent(view: dict, ctx: dict, params: Params, seed: int, step: int) -> dict:
    consumed = min(view["food_stock"], params.base_min_consumption)
    health = health_after_step(
        view["health"],
        view["sick"],
        consumed,
        params.base_min_consumption,
        params.hunger_penalty,
        params.sickness_severity,
    )
    return {
        "id": view["id"],
        "food_stock": view["food_stock"] - consumed,
        "health": health,
        "died": health < 0,
    }


# ------------------------------------------------------------ apply functions


def apply_legislation_phase(world: WorldState) -> None:
    params = world.params
    for leg in world.legislation_queue:
        apply_legislation(
            world.government,
            world,
            leg,
            tax_rate_increment=params.tax_rate_increment,
            welfare_increment=params.welfare_increment,
            subsidy_increment=params.subsidy_increment,
            book_value_fraction=params.nationalize_book_fraction,
        )
    world.legislation_queue = []


def apply_person_intents(world: WorldState, intents: list[dict], scratch: StepScratch) -> None:
    params = world.params
    for intent in intents:
        p = world.person(intent["id"])
        if not p.alive:
            continue
        if intent["job"]:
            scratch.job_seekers.append(p.id)
        if intent["food"] > 0:
            scratch.food_demands[p.id] = intent["food"]
        sector = intent["sector"]
        if sector is None or p.owned_business is not None:
            continue
        if p.cash < params.min_business_capital + params.starting_wage:
            continue
        budget_for_rent = p.cash - params.min_business_capital
        building = next(
            (bid for bid, rent in world.vacancies() if rent <= budget_for_rent), None
        )
        if building is None:
            continue  # founders earlier in id order took the affordable space
        firm = world.new_firm(Sector(sector), p.id, building, cash=0)
        p.cash -= params.min_business_capital
        firm.cash += params.min_business_capital
        if p.employer is not None:
            world.quit_job(p.id)
        p.owned_business = firm.id


def apply_firm_plans(world: WorldState, intents: list[dict], scratch: StepScratch) -> None:
    for intent in intents:
        f = world.firms[intent["id"]]
        if f.bankrupt:
            continue
        f.pending_q = (tuple(intent["state"]), intent["action"])
        f.profit_margin = intent["margin"]
        f.supply_target = intent["target"]
        for pid in list(intent["fired"]) + list(intent["downsized"]):
            f.employees.pop(pid, None)
            person = world.person(pid)
            person.employer = None
            person.wage = 0
        if intent["openings"]:
            positions, wage = intent["openings"]
            scratch.openings.append(JobOpening(firm=f.id, positions=positions, wage=wage))
        if intent["mat_buy"] > 0:
            scratch.materials_to_buy[f.id] = intent["mat_buy"]
        if intent["equip_buy"] > 0:
            scratch.equipment_to_buy[f.id] = intent["equip_buy"]


def run_labor_phase(world: WorldState, ctx: dict, scratch: StepScratch, seed: int, step: int) -> None:
    params = world.params
    reservation = math.ceil(ctx["mean_food_price"] * params.base_min_consumption)
    applicants = []
    for pid in sorted(set(scratch.job_seekers)):
        p = world.person(pid)
        if p.alive and p.owned_business is None:
            applicants.append((pid, reservation))
    employees_by_firm = {f.id: set(f.employees) for f in world.active_firms()}
    hires = clear_labor_market(
        applicants,
        scratch.openings,
        world.graph,
        employees_by_firm,
        params.referral_multiplier,
        Stream(seed, step, P_LABOR, MARKET_ENTITY),
    )
    for hire in hires:
        p = world.person(hire.person)
        if p.employer is not None:
            world.quit_job(p.id)
        p.employer = hire.firm
        p.wage = hire.wage
        world.firms[hire.firm].employees[p.id] = hire.wage


def _run_firm_goods_market(
    world: WorldState,
    scratch: StepScratch,
    market: str,
    buyers: dict[int, int],
    seller_sector: Sector,
    spend_field: str,
    gain_field: str,
    seed: int,
    step: int,
    phase: int,
) -> None:
    demands = []
    for fid in sorted(buyers):
        f = world.firms[fid]
        if not f.bankrupt and f.cash > 0:
            demands.append((fid, buyers[fid], f.cash))
    offers = [
        Offer(f.id, f.price, f.supply)
        for f in world.firms_in_sector(seller_sector)
        if f.supply > 0
    ]
    txs = clear_goods_market(demands, offers, Stream(seed, step, phase, MARKET_ENTITY))
    for tx in txs:
        buyer = world.firms[tx.buyer]
        seller = world.firms[tx.seller]
        buyer.cash -= tx.spend
        setattr(buyer, spend_field, getattr(buyer, spend_field) + tx.spend)
        setattr(buyer, gain_field, getattr(buyer, gain_field) + tx.units)
        seller.cash += tx.spend
        seller.supply -= tx.units
        seller.step_revenue += tx.spend
        seller.step_sold += tx.units
        scratch.transactions.append((market, tx))


def run_materials_phase(world: WorldState, scratch: StepScratch, seed: int, step: int) -> None:
    _run_firm_goods_market(
        world,
        scratch,
        "materials",
        scratch.materials_to_buy,
        Sector.RAW_MATERIAL,
        "step_materials_spend",
        "materials",
        seed,
        step,
        P_MATERIALS,
    )


def run_equipment_phase(world: WorldState, scratch: StepScratch, seed: int, step: int) -> None:
    _run_firm_goods_market(
        world,
        scratch,
        "equipment",
        scratch.equipment_to_buy,
        Sector.CAPITAL_EQUIPMENT,
        "step_equipment_spend",
        "equipment",
        seed,
        step,
        P_EQUIPMENT,
    )


def run_production_phase(world: WorldState) -> None:
    params = world.params
    pp = params.production()
    for f in world.active_firms():
        if f.sector == Sector.HOSPITAL:
            # treatment slots: staff-limited, recomputed every step, not storable
            f.supply = len(f.employees) * params.patients_per_worker
            f.step_produced = f.supply
        else:
            produce(f, pp)


def run_pricing_phase(world: WorldState) -> None:
    params = world.params
    for f in world.active_firms():
        rent = world.buildings[f.building].rent
        step_costs = f.wage_bill() + f.step_materials_spend + rent
        set_price(f, f.step_produced, step_costs, params.min_price_tick)


def run_consumer_phase(world: WorldState, scratch: StepScratch, seed: int, step: int) -> None:
    demands = []
    for pid in sorted(scratch.food_demands):
        p = world.person(pid)
        if p.alive and p.cash > 0:
            demands.append((pid, scratch.food_demands[pid], p.cash))
    offers = [
        Offer(f.id, f.price, f.supply)
        for f in world.firms_in_sector(Sector.CONSUMER_GOOD)
        if f.supply > 0
    ]
    txs = clear_goods_market(demands, offers, Stream(seed, step, P_CONSUMER, MARKET_ENTITY))
    for tx in txs:
        p = world.person(tx.buyer)
        seller = world.firms[tx.seller]
        p.cash -= tx.spend
        p.food_stock += tx.units
        seller.cash += tx.spend
        seller.supply -= tx.units
        seller.step_revenue += tx.spend
        seller.step_sold += tx.units
        scratch.transactions.append(("consumer", tx))


def apply_contagion_intents(world: WorldState, intents: list[dict]) -> None:
    for intent in intents:
        if intent.get("seeded"):
            world.person(intent["id"]).sick = True
        for nb in intent.get("infected", ()):
            world.person(nb).sick = True


def run_hospital_phase(world: WorldState, scratch: StepScratch, seed: int, step: int) -> None:
    params = world.params
    u = params.utility()
    cp = params.contagion()
    hospitals = {f.id: f for f in world.firms_in_sector(Sector.HOSPITAL)}
    if not hospitals:
        return
    market_stream = Stream(seed, step, P_HOSPITAL, MARKET_ENTITY)
    assignments: dict[int, list] = {fid: [] for fid in hospitals}
    for p in world.persons:
        if not (p.alive and p.sick):
            continue
        candidates = [
            Offer(f.id, f.price, 1) for f in hospitals.values() if f.price <= p.cash
        ]
        if not candidates:
            continue
        try:
            fid = pick_supplier(candidates, market_stream)
        except MarketEmpty:
            continue
        if wants_treatment(p, hospitals[fid].price, u, params.recovery_gain, params.price_to_utils):
            assignments[fid].append(p)
    treat_stream = Stream(seed, step, P_HOSPITAL)
    for fid in sorted(assignments):
        hospital = hospitals[fid]
        outcome = treat(
            hospital,
            assignments[fid],
            cp,
            treat_stream,
            patients_per_worker=params.patients_per_worker,
            recovery_gain=params.recovery_gain,
        )
        hospital.supply = max(0, hospital.supply - len(outcome.treated))
        for pid in outcome.treated:
            scratch.transactions.append(
                ("hospital", Transaction(pid, fid, 1, hospital.price))
            )


def apply_health_intents(world: WorldState, intents: list[dict]) -> None:
    for intent in intents:
        p = world.person(intent["id"])
        p.food_stock = intent["food_stock"]
        p.health = intent["health"]
        if intent["died"]:
            p.alive = False
            if p.employer is not None:
                world.quit_job(p.id)
            if p.owned_business is not None:
                # the estate: an ownerless firm passes to the city
                firm = world.firms[p.owned_business]
                firm.owner = GOVERNMENT_ID
                world.government.owned_firms.add(firm.id)
                p.owned_business = None


def run_government_phase(world: WorldState, seed: int, step: int) -> None:
    params = world.params
    gov = world.government
    settled = world.active_firms()

    # wages and rent first: taxation needs this step's income on the books
    bankrupted = []
    for f in settled:
        settlement = settle_and_maybe_bankrupt(
            f, world.buildings[f.building].rent, params.bankruptcy_grace
        )
        for pid in sorted(settlement.wages):
            person = world.person(pid)
            person.cash += settlement.wages[pid]
            person.wage_income += settlement.wages[pid]
        gov.cash += settlement.rent
        if settlement.went_bankrupt:
            bankrupted.append((f, settlement))

    for f in settled:
        f.step_profit = (
            f.step_revenue - f.step_wages - f.step_materials_spend
            - f.step_equipment_spend - f.step_rent
        )

    collect_taxes(gov, world.persons, settled)

    for f in settled:
        if f.bankrupt:
            continue
        after_tax = f.step_profit - f.step_tax
        if after_tax > 0:
            dividend = math.floor(params.dividend_rate * after_tax)
            f.cash -= dividend
            if f.government_owned:
                gov.cash += dividend
            else:
                world.person(f.owner).cash += dividend

    distribute_welfare(gov, world.persons)

    for sector in sorted(gov.subsidies, key=lambda s: s.value):
        amount = gov.subsidies[sector]
        if amount <= 0:
            continue
        for f in world.firms_in_sector(sector):
            f.cash += amount
            gov.cash -= amount

    alive = world.alive_persons()
    u = params.utility()
    mean_qol = fmean(quality_of_life(p, u) for p in alive) if alive else 0.0
    govern_step(
        gov,
        mean_qol,
        Stream(seed, step, P_GOVERNMENT, GOVERNMENT_ID),
        tax_rate_increment=params.tax_rate_increment,
        welfare_increment=params.welfare_increment,
    )

    thresholds = params.thresholds()
    for f in settled:
        if f.bankrupt:
            continue
        reward = float(f.step_profit - f.last_profit)
        if f.pending_q is not None:
            s_next = discretize_signals(f.step_sold, f.supply, reward, thresholds)
            update(f.q_table, f.pending_q[0], f.pending_q[1], reward, s_next)
            f.q_table.decay_epsilon()
        f.prev_profit = f.last_profit
        f.last_profit = f.step_profit
        f.last_sold = f.step_sold
        f.pending_q = None

    for f, settlement in bankrupted:
        for pid in settlement.wages:
            person = world.person(pid)
            if person.employer == f.id:
                person.employer = None
                person.wage = 0
        if not f.government_owned:
            owner = world.person(f.owner)
            owner.cash += f.cash  # residual assets or debt pass to the owner
            owner.owned_business = None
        f.cash = 0
        gov.owned_firms.discard(f.id)
        world.bankruptcies += 1

    for f in world.active_firms():
        if f.government_owned and f.cash < 0:
            gov.cash += f.cash  # treasury absorbs the public firm's deficit
            f.cash = 0
            f.deficit_streak = 0


def build_metrics_row(world: WorldState, step: int) -> MetricsRow:
    alive = world.alive_persons()
    employed_wages = [p.wage for p in alive if p.employer is not None]
    material = [f.price for f in world.firms_in_sector(Sector.RAW_MATERIAL)]
    consumer = world.firms_in_sector(Sector.CONSUMER_GOOD)
    unemployed = sum(
        1 for p in alive if p.employer is None and p.owned_business is None
    )
    return MetricsRow(
        step=step,
        mean_qol=world.government.last_mean_qol,
        bankruptcies_cumulative=world.bankruptcies,
        mean_material_price=fmean(material) if material else 0.0,
        mean_wage=fmean(employed_wages) if employed_wages else 0.0,
        consumer_profit=fmean(f.last_profit for f in consumer) if consumer else 0.0,
        mean_consumer_price=fmean(f.price for f in consumer) if consumer else 0.0,
        population_alive=len(alive),
        sick_count=sum(1 for p in alive if p.sick),
        unemployment_rate=unemployed / len(alive) if alive else 0.0,
    )

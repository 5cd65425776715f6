"""World construction and the container the step pipeline mutates."""

from __future__ import annotations

import dataclasses
import hashlib
import math
from dataclasses import dataclass, field

from ..agents import GOVERNMENT_ID, Person
from ..firms import Firm, Sector
from ..government import Government, Legislation
from ..learning import QTable
from ..params import Params
from ..popgen import BayesNet, NameTables, default_name_tables, default_net, generate_population
from ..rng import Stream
from ..socialgraph import FriendshipCoefficients, SocialGraph, build_graph
from .metrics import MetricsRow

# reserved stream namespaces outside the per-step phase range
NS_INIT_POPULATION = 100
NS_INIT_GRAPH = 101
NS_INIT_FIRMS = 102
NS_API = 200


@dataclass
class Building:
    id: int
    slots: int
    rent: int


@dataclass
class WorldState:
    seed: int
    params: Params
    step: int = 0
    persons: list[Person] = field(default_factory=list)
    firms: dict[int, Firm] = field(default_factory=dict)
    government: Government = field(default_factory=Government)
    graph: SocialGraph = field(default_factory=lambda: SocialGraph(()))
    buildings: list[Building] = field(default_factory=list)
    metrics: list[MetricsRow] = field(default_factory=list)
    legislation_queue: list[Legislation] = field(default_factory=list)
    next_id: int = 0
    bankruptcies: int = 0

    def person(self, pid: int) -> Person:
        return self.persons[pid]

    def active_firms(self) -> list[Firm]:
        return [self.firms[fid] for fid in sorted(self.firms) if not self.firms[fid].bankrupt]

    def firms_in_sector(self, sector: Sector) -> list[Firm]:
        return [f for f in self.active_firms() if f.sector == sector]

    def alive_persons(self) -> list[Person]:
        return [p for p in self.persons if p.alive]

    def building_occupancy(self) -> dict[int, int]:
        occupied = {b.id: 0 for b in self.buildings}
        for f in self.active_firms():
            occupied[f.building] += 1
        return occupied

    def vacancies(self) -> list[tuple[int, int]]:
        """(building id, rent) for every building with a free slot, id order."""
        occupied = self.building_occupancy()
        return [(b.id, b.rent) for b in self.buildings if occupied[b.id] < b.slots]

    def quit_job(self, pid: int) -> None:
        p = self.persons[pid]
        if p.employer is not None and p.employer in self.firms:
            self.firms[p.employer].employees.pop(pid, None)
        p.employer = None
        p.wage = 0

    def total_cash(self) -> int:
        """Closed-economy sum: every person (alive or dead), firm, and the treasury."""
        return (
            sum(p.cash for p in self.persons)
            + sum(f.cash for f in self.firms.values())
            + self.government.cash
        )

    def fresh_q_table(self) -> QTable:
        p = self.params
        return QTable(
            alpha=p.q_alpha,
            gamma=p.q_gamma,
            epsilon=p.q_epsilon,
            epsilon_decay=p.q_epsilon_decay,
            epsilon_floor=p.q_epsilon_floor,
        )

    def new_firm(self, sector: Sector, owner: int, building: int, cash: int) -> Firm:
        firm = Firm(
            id=self.next_id,
            sector=sector,
            owner=owner,
            building=building,
            cash=cash,
            price=self.params.initial_price,
            supply_target=self.params.initial_supply_target,
            q_table=self.fresh_q_table(),
        )
        self.next_id += 1
        self.firms[firm.id] = firm
        return firm

    def digest(self) -> str:
        """Cheap fingerprint for cross-worker commit checks."""
        h = hashlib.sha256()
        h.update(f"{self.step}:{self.total_cash()}:{len(self.persons)}".encode())
        h.update(f"{sum(p.alive for p in self.persons)}:{len(self.firms)}".encode())
        h.update(f"{self.bankruptcies}:{self.government.cash}".encode())
        return h.hexdigest()[:16]


def partition(world: WorldState, k: int) -> list[list[int]]:
    """Assign persons and firms to k workers by id hash (id mod k)."""
    if k < 1:
        raise ValueError("need at least one partition")
    parts: list[list[int]] = [[] for _ in range(k)]
    for p in world.persons:
        parts[p.id % k].append(p.id)
    for fid in sorted(world.firms):
        parts[fid % k].append(fid)
    return parts


def init_world(
    sc,
    net: BayesNet | None = None,
    names: NameTables | None = None,
    coeffs: FriendshipCoefficients | None = None,
    n: int = 1000,
    seed: int = 0,
) -> WorldState:
    """Build the step-zero world: population, friendships, buildings, founding
    firms with staff, and the government at its configured starting policy."""
    params = sc.effective_params()
    net = net if net is not None else default_net()
    names = names if names is not None else default_name_tables()
    coeffs = coeffs if coeffs is not None else FriendshipCoefficients()

    persons = generate_population(
        net, names, n, Stream(seed, 0, NS_INIT_POPULATION), params.income_bracket_cash
    )
    bmc = params.base_min_consumption
    for p in persons:
        p.food_stock = bmc * params.initial_food_stock_steps

    # under fixed logistic coefficients expected degree grows linearly with n;
    # shift the intercept so the expected friend count is population-free
    if n > 0 and params.friendship_reference_population > 0:
        offset = math.log(n / params.friendship_reference_population)
        coeffs = dataclasses.replace(coeffs, intercept=coeffs.intercept - offset)
    graph = build_graph(
        persons, coeffs, Stream(seed, 0, NS_INIT_GRAPH), pair_subsample=params.pair_subsample
    )

    world = WorldState(seed=seed, params=params, persons=persons, graph=graph)
    world.next_id = n
    world.buildings = [
        Building(id=i, slots=params.building_slots, rent=params.rent)
        for i in range(params.n_buildings)
    ]
    world.government = Government(
        cash=params.government_initial_cash,
        tax_rate=params.tax_rate,
        max_tax_rate=params.max_tax_rate,
        welfare_payment=params.welfare,
        welfare_threshold=params.starting_welfare_req,
        initial_welfare_payment=max(params.welfare, 1),
        q_table=world.fresh_q_table(),
    )

    _found_initial_firms(world, Stream(seed, 0, NS_INIT_FIRMS))
    return world


def _genesis_supply_targets(world: WorldState) -> dict[Sector, int]:
    """Per-firm starting targets sized so baseline output roughly matches the
    population's survival demand; learning adjusts from there."""
    params = world.params
    n = len(world.persons)
    k = max(params.initial_firms_per_sector, 1)
    floor = params.initial_supply_target
    consumer = max(floor, -(-n * params.base_min_consumption // k))
    capital = max(floor, n // (10 * k))
    raw = max(floor, -(-(consumer * k + capital * k) * params.material_cost_per_good // k))
    hospital = max(floor, n // (2 * k))
    return {
        Sector.CONSUMER_GOOD: consumer,
        Sector.CAPITAL_EQUIPMENT: capital,
        Sector.RAW_MATERIAL: raw,
        Sector.HOSPITAL: hospital,
    }


def _found_initial_firms(world: WorldState, rng: Stream) -> None:
    """Two (configurable) firms per sector, owned by the wealthiest citizens,
    staffed by seeded draws from the unemployed pool at the starting wage.

    Opening cash is part of the initial money supply, minted here once; the
    conservation audit runs across steps, not across genesis.
    """
    params = world.params
    sectors = [Sector.RAW_MATERIAL, Sector.CONSUMER_GOOD, Sector.CAPITAL_EQUIPMENT, Sector.HOSPITAL]
    targets = _genesis_supply_targets(world)
    owners = sorted(world.persons, key=lambda p: (-p.cash, p.id))
    owner_idx = 0
    hire_pool = [p.id for p in world.persons]
    opening_cash = params.min_business_capital * max(params.initial_staff_per_firm, 1)

    for sector in sectors:
        for _ in range(params.initial_firms_per_sector):
            building = _building_with_space(world)
            if building is None:
                return
            owner = owners[owner_idx] if owner_idx < len(owners) else None
            owner_idx += 1
            owner_id = owner.id if owner is not None else GOVERNMENT_ID
            firm = world.new_firm(sector, owner_id, building, opening_cash)
            firm.supply_target = targets[sector]
            if owner is not None:
                owner.owned_business = firm.id
                if owner.id in hire_pool:
                    hire_pool.remove(owner.id)
            for _ in range(params.initial_staff_per_firm):
                if not hire_pool:
                    break
                pick = hire_pool.pop(rng.randrange(len(hire_pool)))
                person = world.person(pick)
                person.employer = firm.id
                person.wage = params.starting_wage
                firm.employees[pick] = params.starting_wage
            # a step's worth of stock and inputs so the first market can clear
            if sector in (Sector.CONSUMER_GOOD, Sector.CAPITAL_EQUIPMENT):
                firm.materials = firm.supply_target * params.material_cost_per_good
            if sector in (Sector.RAW_MATERIAL, Sector.CONSUMER_GOOD, Sector.CAPITAL_EQUIPMENT):
                firm.supply = firm.supply_target


def _building_with_space(world: WorldState) -> int | None:
    occupied = world.building_occupancy()
    for b in world.buildings:
        if occupied[b.id] < b.slots:
            return b.id
    return None

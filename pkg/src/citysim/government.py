"""Taxes, welfare, subsidies, learned policy moves, and voted legislation.

Every operation here is a pure transfer between books: person/firm/treasury
cash moves but is never created or destroyed, which is what the engine's
closed-economy audit relies on.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import TYPE_CHECKING, Iterable

from .agents import GOVERNMENT_ID, Person
from .firms import Firm, Sector
from .learning import QTable, bin_signal, joint_action_dirs, select_action, update

if TYPE_CHECKING:
    from .engine.world import WorldState


class UnknownSector(Exception):
    pass


class LegislationKind(str, Enum):
    NATIONALIZE = "nationalize"
    PRIVATIZE = "privatize"
    SET_WELFARE_PAYMENT = "set_welfare_payment"
    SET_WELFARE_THRESHOLD = "set_welfare_threshold"
    SET_TAX_RATE = "set_tax_rate"
    SET_SUBSIDY = "set_subsidy"


SECTOR_KINDS = (LegislationKind.NATIONALIZE, LegislationKind.PRIVATIZE, LegislationKind.SET_SUBSIDY)
DELTA_KINDS = (
    LegislationKind.SET_WELFARE_PAYMENT,
    LegislationKind.SET_WELFARE_THRESHOLD,
    LegislationKind.SET_TAX_RATE,
    LegislationKind.SET_SUBSIDY,
)


@dataclass(frozen=True)
class Legislation:
    """A voted change. Deltas are counts of the corresponding increment, which
    keeps every proposal quantized by construction."""

    kind: LegislationKind
    proposer: int
    sector: Sector | None = None
    increments: int = 0

    def __post_init__(self):
        if self.kind in SECTOR_KINDS and self.sector is None:
            raise UnknownSector(f"{self.kind.value} requires a sector")


@dataclass
class Government:
    cash: int = 0
    tax_rate: float = 0.1
    max_tax_rate: float = 0.6
    welfare_payment: int = 60
    welfare_threshold: int = 100
    initial_welfare_payment: int = 60
    subsidies: dict[Sector, int] = field(default_factory=dict)
    owned_firms: set[int] = field(default_factory=set)
    q_table: QTable = field(default_factory=QTable)
    last_mean_qol: float = 0.0
    pending_q: tuple[tuple[int, ...], int] | None = None


def collect_taxes(g: Government, persons: Iterable[Person], firms: Iterable[Firm]) -> int:
    """Tax this step's wage income and non-negative firm profit into the treasury."""
    collected = 0
    for p in persons:
        if not p.alive:
            continue
        tax = math.floor(g.tax_rate * p.wage_income)
        p.cash -= tax
        collected += tax
    for f in firms:
        tax = math.floor(g.tax_rate * max(f.step_profit, 0))
        f.cash -= tax
        f.step_tax = tax
        collected += tax
    g.cash += collected
    return collected


def distribute_welfare(g: Government, persons: Iterable[Person]) -> int:
    """Pay every alive person whose step income fell below the threshold.

    The treasury may go negative: a sovereign deficit, not money creation.
    """
    paid = 0
    if g.welfare_payment <= 0:
        return 0
    for p in persons:
        if p.alive and p.wage_income < g.welfare_threshold:
            p.cash += g.welfare_payment
            paid += g.welfare_payment
    g.cash -= paid
    return paid


def policy_state(g: Government) -> tuple[int, int]:
    """Discretized (tax, welfare) position: thirds of each lever's range."""
    tax_span = max(g.max_tax_rate, 1e-9)
    welfare_span = max(4 * g.initial_welfare_payment, 1)
    tax_bin = bin_signal(g.tax_rate, tax_span / 3, 2 * tax_span / 3)
    welfare_bin = bin_signal(g.welfare_payment, welfare_span / 3, 2 * welfare_span / 3)
    return tax_bin, welfare_bin


def govern_step(
    g: Government,
    mean_qol: float,
    rng,
    tax_rate_increment: float = 0.05,
    welfare_increment: int = 20,
) -> None:
    """Reward the previous policy move by the change in mean quality of life,
    then take the next epsilon-greedy joint (tax, welfare) adjustment."""
    state = policy_state(g)
    reward = mean_qol - g.last_mean_qol
    if g.pending_q is not None:
        prev_state, prev_action = g.pending_q
        update(g.q_table, prev_state, prev_action, reward, state)
        g.q_table.decay_epsilon()
    action = select_action(g.q_table, state, rng)
    tax_dir, welfare_dir = joint_action_dirs(action)
    g.tax_rate = min(g.max_tax_rate, max(0.0, g.tax_rate + tax_dir * tax_rate_increment))
    g.welfare_payment = max(0, g.welfare_payment + welfare_dir * welfare_increment)
    g.pending_q = (state, action)
    g.last_mean_qol = mean_qol


def apply_legislation(
    g: Government,
    world: "WorldState",
    leg: Legislation,
    tax_rate_increment: float,
    welfare_increment: int,
    subsidy_increment: int,
    book_value_fraction: float,
) -> None:
    """Mutate policy or industry ownership according to a passed ballot."""
    kind = leg.kind
    if kind == LegislationKind.SET_TAX_RATE:
        g.tax_rate = min(
            g.max_tax_rate, max(0.0, g.tax_rate + leg.increments * tax_rate_increment)
        )
    elif kind == LegislationKind.SET_WELFARE_PAYMENT:
        g.welfare_payment = max(0, g.welfare_payment + leg.increments * welfare_increment)
    elif kind == LegislationKind.SET_WELFARE_THRESHOLD:
        g.welfare_threshold = max(0, g.welfare_threshold + leg.increments * welfare_increment)
    elif kind == LegislationKind.SET_SUBSIDY:
        current = g.subsidies.get(leg.sector, 0)
        g.subsidies[leg.sector] = max(0, current + leg.increments * subsidy_increment)
    elif kind == LegislationKind.NATIONALIZE:
        for f in world.active_firms():
            if f.sector != leg.sector or f.government_owned:
                continue
            compensation = math.floor(book_value_fraction * max(f.cash, 0))
            owner = world.person(f.owner)
            g.cash -= compensation
            owner.cash += compensation
            owner.owned_business = None
            f.owner = GOVERNMENT_ID
            g.owned_firms.add(f.id)
    elif kind == LegislationKind.PRIVATIZE:
        for f in world.active_firms():
            if f.sector != leg.sector or not f.government_owned:
                continue
            price = math.floor(book_value_fraction * max(f.cash, 0))
            buyer = _richest_eligible(world, price)
            if buyer is None:
                continue  # nobody can pay; stays public
            buyer.cash -= price
            g.cash += price
            buyer.owned_business = f.id
            if buyer.employer is not None:
                world.quit_job(buyer.id)
            f.owner = buyer.id
            g.owned_firms.discard(f.id)
    else:
        raise UnknownSector(f"unhandled legislation kind {kind!r}")


def _richest_eligible(world: "WorldState", price: int) -> Person | None:
    candidates = [
        p for p in world.persons if p.alive and p.owned_business is None and p.cash >= price
    ]
    if not candidates:
        return None
    candidates.sort(key=lambda p: (-p.cash, p.id))
    return candidates[0]

"""Per-person behavior: founding, job seeking, food demand, health bookkeeping.

Decision logic lives in scalar helpers (pure functions of plain values) so the
engine can evaluate the same rules on serialized entity views at workers; the
Person-facing wrappers are the module's public surface.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import TYPE_CHECKING, Mapping, Sequence

if TYPE_CHECKING:
    from .popgen import Demographics

GOVERNMENT_ID = -1


class DeadPerson(Exception):
    pass


@dataclass
class Person:
    id: int
    demographics: "Demographics | None" = None
    name: str = ""
    cash: int = 0
    wage: int = 0
    employer: int | None = None
    owned_business: int | None = None
    food_stock: int = 0
    health: float = 1.0
    sick: bool = False
    frugality: float = 0.5
    alive: bool = True
    # wages actually received this step; the tax base and welfare income test
    wage_income: int = 0

    @property
    def employed(self) -> bool:
        return self.employer is not None

    @property
    def is_owner(self) -> bool:
        return self.owned_business is not None


class HealthUtility:
    """Piecewise-linear monotone map from health to utils, given anchor points."""

    def __init__(self, anchors: Sequence[tuple[float, float]]):
        pts = sorted((float(x), float(y)) for x, y in anchors)
        if len(pts) < 2:
            raise ValueError("need at least two anchors")
        for (_, y0), (_, y1) in zip(pts, pts[1:]):
            if y1 < y0:
                raise ValueError("anchors must be nondecreasing")
        self.anchors = pts

    def __call__(self, h: float) -> float:
        pts = self.anchors
        if h <= pts[0][0]:
            x0, y0 = pts[0]
            x1, y1 = pts[1]
        elif h >= pts[-1][0]:
            x0, y0 = pts[-2]
            x1, y1 = pts[-1]
        else:
            for (x0, y0), (x1, y1) in zip(pts, pts[1:]):
                if x0 <= h <= x1:
                    break
        if x1 == x0:
            return y0
        return y0 + (y1 - y0) * (h - x0) / (x1 - x0)


@dataclass(frozen=True)
class UtilityParams:
    consumer_good_utility: float = 50.0
    base_min_consumption: int = 4
    health_utility: HealthUtility = field(
        default_factory=lambda: HealthUtility([(-1.0, -10.0), (0.0, 0.0), (1.0, 10.0)])
    )


def quality_of_life(p: Person, u: UtilityParams) -> float:
    """Food stock valued at per-unit utility plus tabulated health utility."""
    if not p.alive:
        raise DeadPerson(f"person {p.id} is dead")
    return p.food_stock * u.consumer_good_utility + u.health_utility(p.health)


def excess_food_units(consumer_good_utility: float, price: float) -> int:
    """Largest e with marginal utility cgu/(1+e) still worth the price."""
    if price <= 0:
        raise ValueError("price must be positive")
    if consumer_good_utility < price:
        return 0
    return max(0, math.floor(consumer_good_utility / price) - 1)


def desired_food_units(
    food_stock: int, price: float, consumer_good_utility: float, base_min_consumption: int
) -> int:
    e_star = excess_food_units(consumer_good_utility, price)
    return max(0, base_min_consumption + e_star - food_stock)


def desired_food(p: Person, price: float, u: UtilityParams) -> int:
    """Units to buy: survival gap plus diminishing-returns excess, net of stock."""
    return desired_food_units(p.food_stock, price, u.consumer_good_utility, u.base_min_consumption)


def purchase_budget(p: Person, desired: int, price: int) -> int:
    """Affordable units: demand capped by cash at the quoted price."""
    if price <= 0:
        raise ValueError("price must be positive")
    return min(desired, p.cash // price)


def founding_eligible(
    cash: int,
    owns_business: bool,
    vacancy_rents: Sequence[int],
    min_business_capital: int,
    starting_wage: int,
) -> bool:
    if owns_business:
        return False
    if cash < min_business_capital + starting_wage:
        return False
    budget_for_rent = cash - min_business_capital
    return any(rent <= budget_for_rent for rent in vacancy_rents)


def choose_sector(sector_profits: Mapping[str, float], floor: float, rng) -> str | None:
    """Sector drawn proportional to max(mean profit, floor); None if no mass."""
    sectors = sorted(sector_profits)
    weights = [max(sector_profits[s], floor) for s in sectors]
    if sum(weights) <= 0:
        weights = [1.0] * len(sectors)
    if not sectors:
        return None
    return sectors[rng.weighted_index(weights)]


def should_start_business(
    p: Person,
    vacancies: Sequence[tuple[int, int]],
    sector_profits: Mapping[str, float],
    min_business_capital: int,
    starting_wage: int,
    rng,
    sector_floor: float = 1.0,
) -> str | None:
    """Sector to found in, or None when any founding gate fails.

    Gates: not already an owner; a building with space whose rent fits what is
    left after the capital outlay; enough cash for the capital plus one step
    of starting wage. Sector choice favors the most profitable on average.
    """
    if not p.alive:
        raise DeadPerson(f"person {p.id} is dead")
    rents = [rent for _, rent in vacancies]
    if not founding_eligible(p.cash, p.is_owner, rents, min_business_capital, starting_wage):
        return None
    return choose_sector(sector_profits, sector_floor, rng)


def needs_job_flag(
    wage: int,
    owns_business: bool,
    mean_wage: float,
    mean_food_price: float,
    wage_under_market_multiplier: float,
    base_min_consumption: int,
) -> bool:
    if owns_business:
        return False
    if wage < mean_food_price * base_min_consumption:
        return True
    return wage < mean_wage * wage_under_market_multiplier


def needs_job(
    p: Person,
    mean_wage: float,
    mean_food_price: float,
    wage_under_market_multiplier: float,
    base_min_consumption: int,
) -> bool:
    """Owners never seek; otherwise seek when wage covers neither food nor market rate."""
    if not p.alive:
        raise DeadPerson(f"person {p.id} is dead")
    return needs_job_flag(
        p.wage,
        p.is_owner,
        mean_wage,
        mean_food_price,
        wage_under_market_multiplier,
        base_min_consumption,
    )


def health_after_step(
    health: float,
    sick: bool,
    consumed: int,
    base_min_consumption: int,
    hunger_penalty: float,
    sickness_severity: float,
) -> float:
    if consumed < base_min_consumption and base_min_consumption > 0:
        health -= hunger_penalty * (1.0 - consumed / base_min_consumption)
    if sick:
        health -= sickness_severity
    return health


def end_of_step_health(
    p: Person,
    consumed: int,
    base_min_consumption: int,
    hunger_penalty: float,
    sickness_severity: float,
) -> Person:
    """Apply hunger and sickness decrements; below zero the person dies."""
    if consumed < 0:
        raise ValueError("consumed must be >= 0")
    p.health = health_after_step(
        p.health, p.sick, consumed, base_min_consumption, hunger_penalty, sickness_severity
    )
    if p.health < 0:
        p.alive = False
    return p

"""Seeded, deterministic market clearing for goods and labor.

Clearing is a serial fold in canonical buyer/firm order; all randomness comes
from the provided stream, so a clearing is a pure function of (inputs, stream).
Cheap sellers win more often: supplier choice is weighted by inverse price.
"""

from __future__ import annotations

from dataclasses import dataclass

from .socialgraph import SocialGraph, referral_weight


class MarketEmpty(Exception):
    pass


@dataclass(frozen=True)
class Offer:
    seller: int
    price: int
    available: int


@dataclass(frozen=True)
class JobOpening:
    firm: int
    positions: int
    wage: int


@dataclass(frozen=True)
class Transaction:
    buyer: int
    seller: int
    units: int
    price: int

    @property
    def spend(self) -> int:
        return self.units * self.price


@dataclass(frozen=True)
class Hire:
    person: int
    firm: int
    wage: int


def pick_supplier(offers: list[Offer], rng) -> int:
    """Seller drawn with probability proportional to 1/price among stocked offers."""
    stocked = [o for o in offers if o.available > 0]
    if not stocked:
        raise MarketEmpty("no offer has available units")
    weights = [1.0 / o.price for o in stocked]
    return stocked[rng.weighted_index(weights)].seller


def clear_goods_market(
    demands: list[tuple[int, int, int]],  # (buyer, units, budget), canonical buyer order
    offers: list[Offer],
    rng,
) -> list[Transaction]:
    """Buyers in order repeatedly draw a supplier and buy what demand, stock,
    and budget allow. Sellers leave the market when sold out; a buyer drops a
    seller it cannot afford a single unit from and redraws.
    """
    price = {o.seller: o.price for o in offers}
    stock = {o.seller: o.available for o in offers if o.available > 0}
    transactions: list[Transaction] = []
    for buyer, units, budget in demands:
        remaining = units
        candidates = set(stock)
        while remaining > 0 and candidates:
            live = [Offer(s, price[s], stock[s]) for s in sorted(candidates)]
            seller = pick_supplier(live, rng)
            qty = min(remaining, stock[seller], budget // price[seller])
            if qty <= 0:
                candidates.discard(seller)
                continue
            transactions.append(Transaction(buyer, seller, qty, price[seller]))
            remaining -= qty
            budget -= qty * price[seller]
            stock[seller] -= qty
            if stock[seller] <= 0:
                del stock[seller]
            candidates &= set(stock)
    return transactions


def clear_labor_market(
    applicants: list[tuple[int, int]],  # (person, reservation wage), canonical order
    openings: list[JobOpening],
    graph: SocialGraph,
    employees_by_firm: dict[int, set[int]],
    referral_multiplier: float,
    rng,
) -> list[Hire]:
    """Fill positions firm by firm with referral-weighted draws.

    A person only ever applies to openings paying at least their reservation
    wage; each hire leaves the pool, so nobody is hired twice.
    """
    pool: dict[int, int] = dict(applicants)
    hires: list[Hire] = []
    for opening in sorted(openings, key=lambda o: o.firm):
        inside = employees_by_firm.get(opening.firm, set())
        for _ in range(opening.positions):
            eligible = [pid for pid in pool if pool[pid] <= opening.wage]
            if not eligible:
                break
            weights = [
                referral_weight(pid, inside, graph, referral_multiplier) for pid in eligible
            ]
            chosen = eligible[rng.weighted_index(weights)]
            hires.append(Hire(chosen, opening.firm, opening.wage))
            del pool[chosen]
    return hires

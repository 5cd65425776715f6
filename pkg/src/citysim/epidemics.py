"""Contagion over the friendship graph and hospital treatment.

Infection pressure composes contact and transmission rates into a single
per-sick-neighbor Bernoulli each step. Only hospitals cure; treatment is paid,
capacity-limited by staff, and succeeds with a recovery probability.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

from .agents import Person, UtilityParams
from .firms import Firm
from .rng import per_entity
from .socialgraph import SocialGraph


class NotSick(Exception):
    pass


@dataclass(frozen=True)
class ContagionParams:
    patient_zero_prob: float = 0.01
    contact_rate: float = 0.3
    transmission_rate: float = 0.1
    recovery_prob: float = 0.6
    sickness_severity: float = 0.05

    def __post_init__(self):
        for name in ("patient_zero_prob", "contact_rate", "transmission_rate", "recovery_prob"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ValueError(f"{name} must be in [0, 1]")
        if self.sickness_severity < 0:
            raise ValueError("sickness_severity must be >= 0")


def seed_infections(persons: Iterable[Person], cp: ContagionParams, rng) -> set[int]:
    """Each alive healthy person spontaneously falls sick with patient_zero_prob."""
    newly: set[int] = set()
    if cp.patient_zero_prob <= 0.0:
        return newly
    for p in persons:
        if not p.alive or p.sick:
            continue
        if per_entity(rng, p.id).random() < cp.patient_zero_prob:
            newly.add(p.id)
    return newly


def spread(
    g: SocialGraph,
    sick: set[int],
    cp: ContagionParams,
    rng,
    susceptible: set[int] | None = None,
) -> set[int]:
    """New infections: every healthy neighbor of every sick person, each with
    an independent contact*transmission chance per sick neighbor."""
    p_edge = cp.contact_rate * cp.transmission_rate
    newly: set[int] = set()
    if p_edge <= 0.0:
        return newly
    for sid in sorted(sick):
        source_rng = per_entity(rng, sid)
        for nb in g.neighbors(sid):
            draw = source_rng.random()  # one draw per edge keeps streams aligned
            if nb in sick:
                continue
            if susceptible is not None and nb not in susceptible:
                continue
            if nb in newly:
                continue
            if draw < p_edge:
                newly.add(nb)
    return newly


def wants_treatment(
    p: Person,
    price: int,
    u: UtilityParams,
    recovery_gain: float = 0.5,
    price_to_utils: float = 0.05,
) -> bool:
    """Visit when affordable and the expected utility gain beats the
    frugality-scaled price. Sicker people gain more, so they visit more."""
    if not p.sick:
        raise NotSick(f"person {p.id} is not sick")
    if p.cash < price:
        return False
    healed = min(p.health + recovery_gain, 1.0)
    gain = u.health_utility(healed) - u.health_utility(p.health)
    return gain >= p.frugality * price * price_to_utils


@dataclass(frozen=True)
class TreatmentOutcome:
    treated: tuple[int, ...]
    recovered: tuple[int, ...]
    revenue: int


def treat(
    hospital: Firm,
    patients: Sequence[Person],
    cp: ContagionParams,
    rng,
    patients_per_worker: int = 10,
    recovery_gain: float = 0.5,
) -> TreatmentOutcome:
    """First ``staff * patients_per_worker`` patients (in the given canonical
    order) pay the hospital's price; each then recovers with recovery_prob.
    The rest go untreated and unpaid."""
    capacity = len(hospital.employees) * patients_per_worker
    treated: list[int] = []
    recovered: list[int] = []
    revenue = 0
    for p in patients[:capacity]:
        p.cash -= hospital.price
        revenue += hospital.price
        treated.append(p.id)
        if per_entity(rng, p.id).random() < cp.recovery_prob:
            p.sick = False
            p.health = min(1.0, p.health + recovery_gain)
            recovered.append(p.id)
    hospital.cash += revenue
    hospital.step_revenue += revenue
    hospital.step_sold += len(treated)
    return TreatmentOutcome(tuple(treated), tuple(recovered), revenue)

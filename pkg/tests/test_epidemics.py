from __future__ import annotations

import math

import pytest

from citysim.agents import HealthUtility, Person, UtilityParams
from citysim.epidemics import (
    ContagionParams,
    NotSick,
    seed_infections,
    spread,
    treat,
    wants_treatment,
)
from citysim.firms import Firm, Sector
from citysim.rng import Stream
from citysim.socialgraph import SocialGraph


def persons(n: int, **kw) -> list[Person]:
    return [Person(id=i, **kw) for i in range(n)]


def complete_graph(n: int) -> SocialGraph:
    return SocialGraph(range(n), edges=[(i, j) for i in range(n) for j in range(i + 1, n)])


UTIL = UtilityParams(
    consumer_good_utility=1.0,
    base_min_consumption=1,
    health_utility=HealthUtility([(-1.0, -10.0), (0.0, 0.0), (1.0, 10.0)]),
)


# ----------------------------------------------------------------- seeding


def test_zero_probability_seeds_nothing():
    cp = ContagionParams(patient_zero_prob=0.0)
    assert seed_infections(persons(50), cp, Stream(1, 1, 9)) == set()


def test_probability_one_seeds_all_healthy():
    cp = ContagionParams(patient_zero_prob=1.0)
    ps = persons(20)
    ps[3].sick = True
    ps[5].alive = False
    got = seed_infections(ps, cp, Stream(1, 1, 9))
    assert got == {p.id for p in ps if p.alive and not p.sick}


def test_seed_count_binomial():
    cp = ContagionParams(patient_zero_prob=0.01)
    total = 0
    runs = 20
    for k in range(runs):
        total += len(seed_infections(persons(10_000), cp, Stream(k, 1, 9)))
    mean = total / runs
    # binomial mean 100, sigma ~ 10; the mean of 20 runs is tight
    assert abs(mean - 100) < 10


# ------------------------------------------------------------------ spread


def test_zero_transmission_spreads_nothing():
    g = complete_graph(10)
    cp = ContagionParams(transmission_rate=0.0)
    assert spread(g, {0, 1}, cp, Stream(2, 1, 9)) == set()


def test_certain_transmission_hits_all_neighbors():
    g = complete_graph(6)
    cp = ContagionParams(contact_rate=1.0, transmission_rate=1.0)
    got = spread(g, {0}, cp, Stream(2, 1, 9))
    assert got == {1, 2, 3, 4, 5}


def test_spread_never_reaches_non_neighbors():
    g = SocialGraph(range(5), edges=[(0, 1)])
    cp = ContagionParams(contact_rate=1.0, transmission_rate=1.0)
    assert spread(g, {0}, cp, Stream(3, 1, 9)) == {1}


def test_susceptible_filter_respected():
    g = complete_graph(4)
    cp = ContagionParams(contact_rate=1.0, transmission_rate=1.0)
    got = spread(g, {0}, cp, Stream(4, 1, 9), susceptible={1})
    assert got == {1}


def test_spread_mean_field_complete_graph():
    """Mean new infections across seeded runs vs the analytic complement formula."""
    n, infected0 = 200, 5
    g = complete_graph(n)
    sick = set(range(infected0))
    cp = ContagionParams(contact_rate=0.1, transmission_rate=0.1)  # c*t = 0.01
    p_edge = cp.contact_rate * cp.transmission_rate
    expected_per_susceptible = 1.0 - (1.0 - p_edge) ** infected0
    expected = (n - infected0) * expected_per_susceptible
    runs = 100
    total = sum(len(spread(g, sick, cp, Stream(k, 7, 9))) for k in range(runs))
    mean = total / runs
    assert abs(mean - expected) / expected < 0.15


# ---------------------------------------------------------------- treatment


def sick_person(pid=0, health=0.2, cash=100, frugality=0.5) -> Person:
    return Person(id=pid, health=health, cash=cash, frugality=frugality, sick=True)


def test_wants_treatment_requires_sickness():
    with pytest.raises(NotSick):
        wants_treatment(Person(id=0), price=10, u=UTIL)


def test_unaffordable_treatment_declined():
    p = sick_person(cash=5)
    assert wants_treatment(p, price=10, u=UTIL) is False


def test_zero_frugality_accepts_any_affordable_gain():
    p = sick_person(frugality=0.0)
    assert wants_treatment(p, price=10, u=UTIL) is True


def test_fixture_person_inequality():
    p = sick_person(health=0.2, frugality=0.5, cash=100)
    price, gain_scale = 10, 1.0
    gain = UTIL.health_utility(min(0.2 + 0.5, 1.0)) - UTIL.health_utility(0.2)
    expected = p.cash >= price and gain >= 0.5 * price * gain_scale
    assert wants_treatment(p, price, UTIL, recovery_gain=0.5, price_to_utils=1.0) == expected


def test_sicker_wants_treatment_more():
    """Utility gain is nondecreasing as health decreases (concave-ish anchors)."""
    hu = UTIL.health_utility
    gains = [hu(min(h + 0.5, 1.0)) - hu(h) for h in (0.9, 0.5, 0.1, -0.3)]
    assert all(g2 >= g1 - 1e-12 for g1, g2 in zip(gains, gains[1:]))


def hospital(workers: int, price=10) -> Firm:
    return Firm(
        id=50, sector=Sector.HOSPITAL, owner=1, building=0, price=price,
        employees={i: 100 for i in range(workers)},
    )


def test_capacity_zero_treats_nobody():
    cp = ContagionParams(recovery_prob=1.0)
    out = treat(hospital(0), [sick_person(i) for i in range(3)], cp, Stream(5, 1, 10))
    assert out.treated == () and out.revenue == 0


def test_recovery_prob_one_heals_all_treated():
    cp = ContagionParams(recovery_prob=1.0)
    patients = [sick_person(i) for i in range(4)]
    out = treat(hospital(1), patients, cp, Stream(5, 1, 10), patients_per_worker=10)
    assert out.treated == out.recovered == tuple(range(4))
    assert all(not p.sick for p in patients)
    assert all(p.health == pytest.approx(0.7) for p in patients)


def test_untreated_beyond_capacity_stay_sick_and_unpaid():
    cp = ContagionParams(recovery_prob=1.0)
    patients = [sick_person(i) for i in range(5)]
    out = treat(hospital(1), patients, cp, Stream(6, 1, 10), patients_per_worker=3)
    assert out.treated == (0, 1, 2)
    assert patients[3].sick and patients[4].sick
    assert patients[3].cash == 100  # not charged


def test_treatment_revenue_identity():
    cp = ContagionParams(recovery_prob=0.5)
    h = hospital(2, price=7)
    patients = [sick_person(i) for i in range(9)]
    out = treat(h, patients, cp, Stream(7, 1, 10), patients_per_worker=10)
    assert out.revenue == 7 * len(out.treated)
    assert h.cash == out.revenue
    assert sum(100 - p.cash for p in patients) == out.revenue


def test_recovery_binomial():
    cp = ContagionParams(recovery_prob=0.5)
    recovered = 0
    trials = 1000
    for k in range(trials):
        patients = [sick_person(i) for i in range(10)]
        out = treat(hospital(1), patients, cp, Stream(k, 2, 10), patients_per_worker=10)
        recovered += len(out.recovered)
    mean = recovered / trials
    sigma = math.sqrt(10 * 0.25)  # per-trial sd
    assert abs(mean - 5.0) <= 3 * sigma / math.sqrt(trials) + 0.05


def test_invalid_params_rejected():
    with pytest.raises(ValueError):
        ContagionParams(contact_rate=1.5)
    with pytest.raises(ValueError):
        ContagionParams(sickness_severity=-0.1)

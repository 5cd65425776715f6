"""The full simulation parameter map.

The core lever set (consumer_good_utility .. sickness_severity) is always
present and overridable from scenario files; the extension block below it
covers mechanics the levers imply but do not name (bins, grace periods,
initial conditions). Currency is integer units throughout, which is what
makes the closed-economy audit exact.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field
from typing import Any, Mapping

from .agents import HealthUtility, UtilityParams
from .epidemics import ContagionParams
from .firms import ProductionParams
from .learning import SignalThresholds


@dataclass(frozen=True)
class Params:
    # --- core levers ---
    consumer_good_utility: float = 50.0
    n_buildings: int = 10
    labor_cost_per_good: int = 2
    base_min_consumption: int = 1
    labor_per_equipment: int = 10
    labor_per_worker: int = 20
    transmission_rate: float = 0.1
    wage_under_market_multiplier: float = 0.8
    residence_size_limit: int = 100  # carried for config compatibility; unused
    tax_rate_increment: float = 0.05
    profit_increment: float = 0.05
    recovery_prob: float = 0.6
    supply_increment: int = 5
    min_business_capital: int = 2000
    welfare_increment: int = 30
    welfare: int = 100
    max_tenants: int = 20  # carried for config compatibility; unused
    contact_rate: float = 0.3
    starting_welfare_req: int = 100
    extravagant_wage_range: float = 1.5
    tax_rate: float = 0.1
    starting_wage: int = 120
    patient_zero_prob: float = 0.01
    rent: int = 100
    wage_increment: float = 0.05
    material_cost_per_good: int = 1
    sickness_severity: float = 0.05

    # --- extensions (documented in README) ---
    building_slots: int = 5
    max_tax_rate: float = 0.6
    bankruptcy_grace: int = 2
    patients_per_worker: int = 10
    referral_multiplier: float = 2.0
    recovery_gain: float = 0.5
    price_to_utils: float = 0.05
    hunger_penalty: float = 0.1
    min_price_tick: int = 1
    q_alpha: float = 0.1
    q_gamma: float = 0.9
    q_epsilon: float = 0.1
    q_epsilon_decay: float = 0.999
    q_epsilon_floor: float = 0.01
    sold_bins: tuple[float, float] = (1.0, 10.0)
    leftover_bins: tuple[float, float] = (1.0, 10.0)
    profit_bins: tuple[float, float] = (1.0, 100.0)
    initial_firms_per_sector: int = 2
    initial_staff_per_firm: int = 5
    initial_supply_target: int = 10
    initial_price: int = 10
    initial_food_stock_steps: int = 2
    equipment_amortization_steps: int = 10
    dividend_rate: float = 0.5
    sector_choice_floor: float = 1.0
    nationalize_book_fraction: float = 0.5
    subsidy_increment: int = 20
    voting_window: int = 3
    government_initial_cash: int = 100_000
    default_annual_income: int = 36_000
    pair_subsample: float = 1.0
    friendship_reference_population: int = 200
    health_utility_anchors: tuple[tuple[float, float], ...] = (
        (-1.0, -10.0),
        (0.0, 0.0),
        (1.0, 10.0),
    )
    income_bracket_cash: Mapping[str, int] = field(
        default_factory=lambda: {
            "under_25k": 12_500,
            "25k_60k": 42_500,
            "60k_120k": 90_000,
            "over_120k": 180_000,
        }
    )
    firing_weights: Mapping[str, float] = field(default_factory=dict)
    # scenario axis multipliers (applied by the scenario loader)
    food_utility_high_mult: float = 2.0
    food_utility_low_mult: float = 0.5
    food_consumption_high_mult: float = 0.75
    food_consumption_low_mult: float = 1.5
    tech_equipment_high_mult: float = 5.0
    disease_patient_zero_mult: float = 5.0
    disease_transmission_mult: float = 3.0
    disease_severity_mult: float = 3.0

    def replace(self, **overrides: Any) -> "Params":
        unknown = set(overrides) - {f.name for f in dataclasses.fields(self)}
        if unknown:
            raise KeyError(f"unknown parameter keys: {sorted(unknown)}")
        return dataclasses.replace(self, **overrides)

    def as_dict(self) -> dict[str, Any]:
        doc = dataclasses.asdict(self)
        doc["income_bracket_cash"] = dict(self.income_bracket_cash)
        doc["firing_weights"] = dict(self.firing_weights)
        return doc

    # derived views consumed by the mechanics modules
    def production(self) -> ProductionParams:
        return ProductionParams(
            labor_cost_per_good=self.labor_cost_per_good,
            material_cost_per_good=self.material_cost_per_good,
            labor_per_worker=self.labor_per_worker,
            labor_per_equipment=self.labor_per_equipment,
        )

    def contagion(self) -> ContagionParams:
        return ContagionParams(
            patient_zero_prob=self.patient_zero_prob,
            contact_rate=self.contact_rate,
            transmission_rate=self.transmission_rate,
            recovery_prob=self.recovery_prob,
            sickness_severity=self.sickness_severity,
        )

    def utility(self) -> UtilityParams:
        return UtilityParams(
            consumer_good_utility=self.consumer_good_utility,
            base_min_consumption=self.base_min_consumption,
            health_utility=HealthUtility(self.health_utility_anchors),
        )

    def thresholds(self) -> SignalThresholds:
        return SignalThresholds(
            sold=tuple(self.sold_bins),
            leftover=tuple(self.leftover_bins),
            profit=tuple(self.profit_bins),
        )


def params_from_wire(doc: Mapping[str, Any]) -> Params:
    """Rebuild a Params from its JSON form (lists back to tuples)."""
    overrides = dict(doc)
    for key in ("sold_bins", "leftover_bins", "profit_bins"):
        if key in overrides:
            overrides[key] = tuple(overrides[key])
    if "health_utility_anchors" in overrides:
        overrides["health_utility_anchors"] = tuple(
            tuple(a) for a in overrides["health_utility_anchors"]
        )
    return Params().replace(**overrides)


# the always-present lever keys, in the canonical documentation order
CORE_PARAM_KEYS = (
    "consumer_good_utility",
    "n_buildings",
    "labor_cost_per_good",
    "base_min_consumption",
    "labor_per_equipment",
    "labor_per_worker",
    "transmission_rate",
    "wage_under_market_multiplier",
    "residence_size_limit",
    "tax_rate_increment",
    "profit_increment",
    "recovery_prob",
    "supply_increment",
    "min_business_capital",
    "welfare_increment",
    "welfare",
    "max_tenants",
    "contact_rate",
    "starting_welfare_req",
    "extravagant_wage_range",
    "tax_rate",
    "starting_wage",
    "patient_zero_prob",
    "rent",
    "wage_increment",
    "material_cost_per_good",
    "sickness_severity",
)

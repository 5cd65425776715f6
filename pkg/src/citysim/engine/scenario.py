"""Scenario axes and their translation into parameter overrides.

Three axes (food, technology, disease), three levels each, 27 combinations.
Levels are graded by how favorable they are for citizens: a high disease
level means disease has been eliminated; a low technology level means
equipment contributes nothing.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from enum import Enum
from itertools import product
from pathlib import Path
from typing import Iterator, Mapping

from ..params import Params


class Level(str, Enum):
    HIGH = "high"
    REGULAR = "regular"
    LOW = "low"


@dataclass(frozen=True)
class ScenarioConfig:
    food_level: Level = Level.REGULAR
    tech_level: Level = Level.REGULAR
    disease_level: Level = Level.REGULAR
    params: Params = Params()

    @property
    def name(self) -> str:
        return (
            f"food-{self.food_level.value}_tech-{self.tech_level.value}"
            f"_disease-{self.disease_level.value}"
        )

    def effective_params(self) -> Params:
        """Base params with the axis levels folded in."""
        p = self.params
        overrides: dict = {}
        if self.food_level == Level.HIGH:
            overrides["consumer_good_utility"] = p.consumer_good_utility * p.food_utility_high_mult
            overrides["base_min_consumption"] = max(
                1, round(p.base_min_consumption * p.food_consumption_high_mult)
            )
        elif self.food_level == Level.LOW:
            overrides["consumer_good_utility"] = p.consumer_good_utility * p.food_utility_low_mult
            overrides["base_min_consumption"] = max(
                1, round(p.base_min_consumption * p.food_consumption_low_mult)
            )
        if self.tech_level == Level.HIGH:
            overrides["labor_per_equipment"] = int(
                p.labor_per_equipment * p.tech_equipment_high_mult
            )
        elif self.tech_level == Level.LOW:
            overrides["labor_per_equipment"] = 0  # all electronic equipment disabled
        if self.disease_level == Level.HIGH:
            overrides["patient_zero_prob"] = 0.0
            overrides["transmission_rate"] = 0.0
            overrides["sickness_severity"] = 0.0
        elif self.disease_level == Level.LOW:
            overrides["patient_zero_prob"] = min(
                1.0, p.patient_zero_prob * p.disease_patient_zero_mult
            )
            overrides["transmission_rate"] = min(
                1.0, p.transmission_rate * p.disease_transmission_mult
            )
            overrides["sickness_severity"] = p.sickness_severity * p.disease_severity_mult
        return p.replace(**overrides) if overrides else p


def load_scenario(source: str | Path | Mapping) -> ScenarioConfig:
    """Read a scenario document: the three axis levels plus parameter overrides.

    Override keys must exactly match the documented parameter names; unknown
    keys are rejected rather than silently ignored.
    """
    if isinstance(source, Mapping):
        doc = dict(source)
    else:
        path = Path(source)
        doc = json.loads(path.read_text() if path.exists() else str(source))
    overrides = dict(doc.get("params", {}))
    # tuple-typed params arrive as JSON lists
    for key in ("sold_bins", "leftover_bins", "profit_bins", "health_utility_anchors"):
        if key in overrides:
            val = overrides[key]
            overrides[key] = tuple(tuple(v) if isinstance(v, list) else v for v in val)
    return ScenarioConfig(
        food_level=Level(doc.get("food_level", "regular")),
        tech_level=Level(doc.get("tech_level", "regular")),
        disease_level=Level(doc.get("disease_level", "regular")),
        params=Params().replace(**overrides),
    )


def all_scenarios(base: Params | None = None) -> Iterator[ScenarioConfig]:
    """All 27 axis combinations, in a fixed (food, tech, disease) order."""
    levels = (Level.HIGH, Level.REGULAR, Level.LOW)
    for food, tech, disease in product(levels, levels, levels):
        yield ScenarioConfig(
            food_level=food,
            tech_level=tech,
            disease_level=disease,
            params=base if base is not None else Params(),
        )

"""Per-step aggregate metrics and their delimited export format."""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Iterable

METRICS_HEADER = (
    "step,mean_qol,bankruptcies,mean_material_price,mean_wage,"
    "consumer_profit,mean_consumer_price,population,sick,unemployment"
)


def _num(x: float) -> str:
    # repr keeps the shortest round-trip form; identical floats -> identical text
    return repr(float(x))


@dataclass(frozen=True)
class MetricsRow:
    step: int
    mean_qol: float
    bankruptcies_cumulative: int
    mean_material_price: float
    mean_wage: float
    consumer_profit: float
    mean_consumer_price: float
    population_alive: int
    sick_count: int
    unemployment_rate: float

    def to_csv(self) -> str:
        return ",".join(
            (
                str(self.step),
                _num(self.mean_qol),
                str(self.bankruptcies_cumulative),
                _num(self.mean_material_price),
                _num(self.mean_wage),
                _num(self.consumer_profit),
                _num(self.mean_consumer_price),
                str(self.population_alive),
                str(self.sick_count),
                _num(self.unemployment_rate),
            )
        )

    def as_dict(self) -> dict:
        return {
            "step": self.step,
            "mean_qol": self.mean_qol,
            "bankruptcies": self.bankruptcies_cumulative,
            "mean_material_price": self.mean_material_price,
            "mean_wage": self.mean_wage,
            "consumer_profit": self.consumer_profit,
            "mean_consumer_price": self.mean_consumer_price,
            "population": self.population_alive,
            "sick": self.sick_count,
            "unemployment": self.unemployment_rate,
        }


def write_metrics(rows: Iterable[MetricsRow], path: str | Path) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w") as fh:
        fh.write(METRICS_HEADER + "\n")
        for row in rows:
            fh.write(row.to_csv() + "\n")


def metrics_csv(rows: Iterable[MetricsRow]) -> str:
    return METRICS_HEADER + "\n" + "".join(row.to_csv() + "\n" for row in rows)

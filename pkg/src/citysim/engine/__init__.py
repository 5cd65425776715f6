from .metrics import METRICS_HEADER, MetricsRow, write_metrics
from .scenario import Level, ScenarioConfig, all_scenarios, load_scenario
from .stepper import Simulation, step_world
from .world import WorldState, init_world, partition

__all__ = [
    "METRICS_HEADER",
    "MetricsRow",
    "write_metrics",
    "Level",
    "ScenarioConfig",
    "all_scenarios",
    "load_scenario",
    "Simulation",
    "step_world",
    "WorldState",
    "init_world",
    "partition",
]

"""Production network simulator with load-dependent machine failures."""

from ._core import (
    ModelError,
    PathRecord,
    Scenario,
    ScenarioFormatError,
    evolve,
    load_scenario,
    parse_scenario,
    run_ensemble,
    simulate_path,
    uniform_bound,
    validate,
)

__all__ = [
    "ModelError",
    "PathRecord",
    "Scenario",
    "ScenarioFormatError",
    "evolve",
    "load_scenario",
    "parse_scenario",
    "run_ensemble",
    "simulate_path",
    "uniform_bound",
    "validate",
]

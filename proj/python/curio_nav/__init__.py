"""Python bindings for the curio_nav simulator core."""

from ._core import (
    EpisodeResult,
    Scenario,
    ScenarioError,
    cluster_pedestrians,
    enclosing_circle,
    gaussian_pdf,
    load_scenario,
    load_scenario_file,
    run_episode,
    step,
)

__all__ = [
    "EpisodeResult",
    "Scenario",
    "ScenarioError",
    "cluster_pedestrians",
    "enclosing_circle",
    "gaussian_pdf",
    "load_scenario",
    "load_scenario_file",
    "run_episode",
    "step",
]

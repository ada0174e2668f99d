"""Simulation harness: synthetic echo scenarios, metrics and the ``aec-sim`` CLI."""

from .harness import MetricsRow, ScenarioRun, ScenarioSummary, nfr_sweep, run_scenario
from .metrics import erle_series, misalignment_db, misalignment_series
from .scenario import ScenarioConfig, Signals, gen_impulse_response, related_impulse_response, synthesize

__all__ = [
    "MetricsRow",
    "ScenarioConfig",
    "ScenarioRun",
    "ScenarioSummary",
    "Signals",
    "erle_series",
    "gen_impulse_response",
    "misalignment_db",
    "misalignment_series",
    "nfr_sweep",
    "related_impulse_response",
    "run_scenario",
    "synthesize",
]

"""Deterministic simulator and solver suite for scheduling satellite
entanglement downlinks to ground-station pairs."""

from .channel import ChannelParams, LinkMetrics
from .harness import MetricsSeries, ScenarioConfig, load_config, run_scenario
from .matching import BMatching, CapacitatedBipartiteGraph, max_weight_b_matching
from .orbital import EcefPosition, GeodeticPoint, OrbitalElements, TimeGrid
from .scheduler import (
    Assignment,
    QsspInstance,
    ThreeDMInstance,
    solve_exact,
    solve_global_greedy,
    solve_greedy_backoff,
    solve_local_greedy,
    solve_random,
    verify_feasible,
)
from .topology import GroundStation, LandMask, StationPair, VisibilitySnapshot

__version__ = "0.1.0"

__all__ = [
    "Assignment",
    "BMatching",
    "CapacitatedBipartiteGraph",
    "ChannelParams",
    "EcefPosition",
    "GeodeticPoint",
    "GroundStation",
    "LandMask",
    "LinkMetrics",
    "MetricsSeries",
    "OrbitalElements",
    "QsspInstance",
    "ScenarioConfig",
    "StationPair",
    "ThreeDMInstance",
    "TimeGrid",
    "VisibilitySnapshot",
    "load_config",
    "max_weight_b_matching",
    "run_scenario",
    "solve_exact",
    "solve_global_greedy",
    "solve_greedy_backoff",
    "solve_local_greedy",
    "solve_random",
    "verify_feasible",
    "__version__",
]

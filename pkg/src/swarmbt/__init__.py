"""Recover behavior-tree swarm controllers from observed trajectories."""

__version__ = "0.1.0"

from .bt import BehaviorTree, LeafAction, parse, serialize
from .evolve import EvolutionConfig, ExtractionResult, extract
from .metrics import MetricBounds, MetricSeries, compute_metrics
from .sim import ArenaConfig, SwarmState, Trajectory, init_state, simulate

__all__ = [
    "ArenaConfig", "BehaviorTree", "EvolutionConfig", "ExtractionResult", "LeafAction",
    "MetricBounds", "MetricSeries", "SwarmState", "Trajectory", "compute_metrics",
    "extract", "init_state", "parse", "serialize", "simulate",
]

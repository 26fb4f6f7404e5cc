"""Controller extraction by genetic programming over behavior trees.

Fitness is the Euclidean distance between the min-max normalised metric
streams of the observation and of a candidate's simulation, flattened over
streams and time. Bounds are fixed from generation 0 (plus the observation)
and reused for the whole run.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .bt import BehaviorTree, LeafAction, crossover, mutate, random_tree
from .metrics import MetricBounds, MetricSeries, normalize_values, stream_values
from .sim import ArenaConfig, Trajectory, simulate_many

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class EvolutionConfig:
    population_size: int = 50
    generations: int = 30
    elitism_size: int = 3
    tournament_size: int = 3
    crossover_rate: float = 0.5
    mutation_rate: float = 0.3
    leaf_count: int = 3
    seed: int = 0
    constrain_originals: bool = True

    def __post_init__(self):
        if self.population_size < 1 or self.generations < 1:
            raise ValueError("population_size and generations must be >= 1")
        if not 0 <= self.elitism_size < self.population_size:
            raise ValueError("elitism_size must be in [0, population_size)")
        if not 1 <= self.tournament_size <= self.population_size:
            raise ValueError("tournament_size must be in [1, population_size]")
        for name in ("crossover_rate", "mutation_rate"):
            if not 0.0 <= getattr(self, name) <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1]")
        if self.leaf_count < 1:
            raise ValueError("leaf_count must be >= 1")


@dataclass
class ExtractionResult:
    best_tree: BehaviorTree
    best_fitness: float
    history: list[tuple[float, float]]
    bounds: MetricBounds
    best_trees: list[BehaviorTree] = field(default_factory=list)


def fitness_values(original: np.ndarray, assessed: np.ndarray, bounds: MetricBounds) -> np.ndarray:
    """Vectorised fitness; ``assessed`` may carry leading batch axes."""
    a = normalize_values(original, bounds)
    b = normalize_values(assessed, bounds)
    if a.shape != b.shape[-2:]:
        raise ValueError(f"stream shapes differ: {a.shape} vs {b.shape[-2:]}")
    d = (b - a) ** 2
    return np.sqrt(d.reshape(*d.shape[:-2], -1).sum(-1))


def fitness(original: MetricSeries, assessed: MetricSeries, bounds: MetricBounds) -> float:
    if original.values.shape != assessed.values.shape:
        raise ValueError(
            f"series lengths differ: {original.values.shape} vs {assessed.values.shape}"
        )
    return float(fitness_values(original.values, assessed.values, bounds))


def worst_case_fitness(n_steps_plus_one: int) -> float:
    """Distance between all-zero and all-one normalised streams."""
    return float(np.sqrt(9 * n_steps_plus_one))


def individual_rng(seed: int, generation: int, index: int) -> np.random.Generator:
    return np.random.default_rng([seed, 1, generation, index])


def assess(
    trees: Sequence[BehaviorTree],
    observation: Trajectory,
    rngs: Sequence[np.random.Generator],
    radius: float | None = None,
    beta_rule: str = "closer",
) -> np.ndarray:
    """Simulate each tree from the observation's first frame; returns ``(P, 9, T)`` streams."""
    cfg = observation.config
    r = cfg.sensing_range if radius is None else radius
    pos = simulate_many(trees, observation.positions[0], cfg, rngs, steps=observation.steps)
    values = stream_values(pos, r, beta_rule)
    bad = ~np.isfinite(values).all(axis=(1, 2))
    if bad.any():
        raise FloatingPointError(f"non-finite metrics for tree {trees[int(np.argmax(bad))]}")
    return values


def evaluate_population(
    trees: Sequence[BehaviorTree],
    observation: Trajectory,
    config: EvolutionConfig,
    generation: int = 0,
    bounds: MetricBounds | None = None,
    radius: float | None = None,
    observed: np.ndarray | None = None,
    indices: Sequence[int] | None = None,
) -> tuple[np.ndarray, MetricBounds]:
    """Fitness of each tree against the observation.

    Without ``bounds`` (generation 0) the bounds are taken from the
    observation together with every assessed series, then used for scoring.
    ``indices`` selects the per-individual random streams (default 0..P-1).
    """
    if observed is None:
        observed = stream_values(observation.positions, _radius(observation.config, radius))
    idx = range(len(trees)) if indices is None else indices
    rngs = [individual_rng(config.seed, generation, i) for i in idx]
    values = assess(trees, observation, rngs, radius)
    if bounds is None:
        bounds = MetricBounds.from_values(np.concatenate([observed[None], values]))
    return fitness_values(observed, values, bounds), bounds


def _radius(cfg: ArenaConfig, radius: float | None) -> float:
    return cfg.sensing_range if radius is None else radius


def _is_deterministic(tree: BehaviorTree) -> bool:
    return LeafAction.RANDOM not in tree.leaves


def _key(tree: BehaviorTree) -> tuple:
    return tuple(tree.counts())


def _tournament_index(fitnesses: np.ndarray, k: int, rng: np.random.Generator) -> int:
    if len(fitnesses) == 0:
        raise ValueError("cannot select from an empty population")
    picks = rng.integers(0, len(fitnesses), size=k)
    return int(picks[np.argmin(fitnesses[picks])])  # argmin keeps the first sampled on ties


def tournament_select(
    population: Sequence[BehaviorTree],
    fitnesses: Sequence[float],
    k: int,
    rng: np.random.Generator,
) -> BehaviorTree:
    """Best (lowest fitness) of ``k`` individuals drawn with replacement."""
    if len(population) != len(fitnesses):
        raise ValueError("population and fitnesses differ in length")
    return population[_tournament_index(np.asarray(fitnesses, dtype=float), k, rng)]


def elite_order(fitnesses: Sequence[float]) -> np.ndarray:
    return np.argsort(np.asarray(fitnesses, dtype=float), kind="stable")


def next_generation(
    population: Sequence[BehaviorTree],
    fitnesses: Sequence[float],
    config: EvolutionConfig,
    rng: np.random.Generator,
) -> list[BehaviorTree]:
    """Elites first (best first, unchanged), then offspring from tournament pairs."""
    f = np.asarray(fitnesses, dtype=float)
    size = len(population)
    if size < config.elitism_size:
        raise ValueError("population smaller than elitism size")
    out = [population[i] for i in elite_order(f)[: config.elitism_size]]
    k = min(config.tournament_size, size)
    while len(out) < size:
        a = population[_tournament_index(f, k, rng)]
        b = population[_tournament_index(f, k, rng)]
        if len(a) >= 2 and len(a) == len(b) and rng.random() < config.crossover_rate:
            a, b = crossover(a, b, rng)
        for child in (a, b):
            if len(out) == size:
                break
            if rng.random() < config.mutation_rate:
                child = mutate(child, rng)
            out.append(child)
    return out


def extract(
    observation: Trajectory,
    config: EvolutionConfig = EvolutionConfig(),
    rng: np.random.Generator | None = None,
    radius: float | None = None,
    on_generation: Callable[[int, float, float, BehaviorTree], None] | None = None,
) -> ExtractionResult:
    """Evolve a tree whose simulated swarm matches ``observation``.

    Elites keep the fitness they were scored with, so the best fitness per
    generation never increases.
    """
    if len(observation) < 2 or observation.agent_count < 2:
        raise ValueError("observation needs at least 2 frames and 2 agents")
    rng = np.random.default_rng([config.seed, 0]) if rng is None else rng
    observed = stream_values(observation.positions, _radius(observation.config, radius))

    population = [random_tree(config.leaf_count, rng) for _ in range(config.population_size)]
    fit, bounds = evaluate_population(population, observation, config, 0, None, radius, observed)
    # Trees without a random leaf simulate identically whatever their stream,
    # so their fitness depends only on the leaf multiset.
    cache: dict[tuple, float] = {}
    for tree, f in zip(population, fit):
        if _is_deterministic(tree):
            cache[_key(tree)] = float(f)

    history: list[tuple[float, float]] = []
    best_trees: list[BehaviorTree] = []
    for gen in range(config.generations):
        if gen > 0:
            population = next_generation(population, fit, config, rng)
            e = config.elitism_size
            new_fit = np.empty(len(population))
            new_fit[:e] = np.sort(fit, kind="stable")[:e]
            todo = []
            for i in range(e, len(population)):
                cached = cache.get(_key(population[i])) if _is_deterministic(population[i]) else None
                if cached is None:
                    todo.append(i)
                else:
                    new_fit[i] = cached
            if todo:
                scored, _ = evaluate_population(
                    [population[i] for i in todo], observation, config, gen, bounds, radius,
                    observed, indices=todo,
                )
                for i, f in zip(todo, scored):
                    new_fit[i] = f
                    if _is_deterministic(population[i]):
                        cache[_key(population[i])] = float(f)
            fit = new_fit
        i = int(np.argmin(fit))
        history.append((float(fit[i]), float(fit.mean())))
        best_trees.append(population[i])
        log.debug("gen %d best %.6g mean %.6g %s", gen, fit[i], fit.mean(), population[i])
        if on_generation is not None:
            on_generation(gen, float(fit[i]), float(fit.mean()), population[i])

    return ExtractionResult(best_trees[-1], history[-1][0], history, bounds, best_trees)

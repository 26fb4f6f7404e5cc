"""Recovery benchmark, metric discrimination study and tree similarity."""
from __future__ import annotations

import logging
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Callable

import numpy as np

from .bt import TOKENS, BehaviorTree, random_constrained_tree, random_tree, serialize
from .evolve import EvolutionConfig, extract
from .metrics import STREAMS, MetricBounds, MetricSeries, compute_metrics, normalize_values
from .sim import ArenaConfig, init_state, simulate

log = logging.getLogger(__name__)

HIGH_SIMILARITY = 0.5


def jaccard(a: BehaviorTree, b: BehaviorTree, mode: str = "token") -> float:
    """Intersection over union of leaf-token sets (``mode="token"``) or of
    the character sets of the serialised trees (``mode="char"``)."""
    if mode == "token":
        sa, sb = a.tokens, b.tokens
    elif mode == "char":
        sa, sb = set(serialize(a)), set(serialize(b))
    else:
        raise ValueError(f"unknown jaccard mode {mode!r}")
    union = sa | sb
    return len(sa & sb) / len(union) if union else 1.0


def classify(original: BehaviorTree, extracted: BehaviorTree, similarity: float) -> str:
    if original.multiset() == extracted.multiset():
        return "exact"
    return "high" if similarity >= HIGH_SIMILARITY else "low"


@dataclass
class Trial:
    index: int
    original: BehaviorTree
    extracted: BehaviorTree
    jaccard: float
    final_fitness: float
    cls: str
    history: list[tuple[float, float]] = field(default_factory=list)

    @property
    def ordered_exact(self) -> bool:
        return self.original.leaves == self.extracted.leaves


@dataclass
class BenchmarkReport:
    trials: list[Trial]

    def count(self, cls: str) -> int:
        return sum(t.cls == cls for t in self.trials)

    @property
    def exact_count(self) -> int:
        return self.count("exact")

    @property
    def high_similarity_count(self) -> int:
        return self.count("high")

    @property
    def low_similarity_count(self) -> int:
        return self.count("low")

    @property
    def ordered_exact_count(self) -> int:
        return sum(t.ordered_exact for t in self.trials)

    @property
    def mean_jaccard(self) -> float:
        return float(np.mean([t.jaccard for t in self.trials])) if self.trials else 0.0

    @property
    def zero_jaccard_trials(self) -> list[int]:
        return [t.index for t in self.trials if t.jaccard == 0.0]

    def confusion(self) -> dict:
        """Per-action recovery statistics.

        ``present``: originals containing the action. ``missed``: of those,
        extractions lacking it. ``replaced_by[a][b]``: times ``b`` appeared in
        an extraction that missed ``a`` (and ``b`` was not in the original).
        ``spurious``: extractions containing an action absent from the original.
        """
        present, missed, spurious = Counter(), Counter(), Counter()
        replaced_by: dict[str, Counter] = {tok: Counter() for tok in TOKENS}
        for t in self.trials:
            orig, got = t.original.tokens, t.extracted.tokens
            present.update(orig)
            extra = got - orig
            spurious.update(extra)
            for tok in orig - got:
                missed[tok] += 1
                replaced_by[tok].update(extra)
        return {
            "present": {k: present[k] for k in TOKENS},
            "missed": {k: missed[k] for k in TOKENS},
            "spurious": {k: spurious[k] for k in TOKENS},
            "replaced_by": {k: dict(sorted(v.items())) for k, v in replaced_by.items()},
        }

    def summary(self) -> dict:
        return {
            "trials": len(self.trials),
            "exact": self.exact_count,
            "exact_ordered": self.ordered_exact_count,
            "high_similarity": self.high_similarity_count,
            "low_similarity": self.low_similarity_count,
            "mean_jaccard": self.mean_jaccard,
            "zero_jaccard_trials": self.zero_jaccard_trials,
        }


def trial_seed(seed: int, index: int) -> int:
    return int(np.random.SeedSequence([seed, index]).generate_state(1)[0])


def run_trial(
    index: int,
    seed: int,
    leaf_count: int,
    evo: EvolutionConfig,
    arena: ArenaConfig,
    radius: float | None = None,
    original: BehaviorTree | None = None,
) -> Trial:
    """Generate an original, simulate the observation, extract, score."""
    rng = np.random.default_rng([seed, index, 0])
    if original is None:
        make = random_constrained_tree if evo.constrain_originals else random_tree
        original = make(leaf_count, rng)
    observation = simulate(original, init_state(arena, rng), arena, rng)
    cfg = replace(evo, leaf_count=len(original), seed=trial_seed(seed, index))
    try:
        result = extract(observation, cfg, radius=radius)
    except Exception as exc:
        raise RuntimeError(f"trial {index} ({original}) failed: {exc}") from exc
    sim = jaccard(original, result.best_tree)
    return Trial(
        index, original, result.best_tree, sim, result.best_fitness,
        classify(original, result.best_tree, sim), result.history,
    )


def _run_trial_args(args):
    return run_trial(*args)


def run_benchmark(
    n_trials: int,
    leaf_count: int = 3,
    evo: EvolutionConfig = EvolutionConfig(),
    arena: ArenaConfig = ArenaConfig(),
    seed: int = 0,
    radius: float | None = None,
    jobs: int = 1,
    progress: Callable[[Trial], None] | None = None,
) -> BenchmarkReport:
    """Recovery benchmark; trial ``i`` depends only on ``(seed, i)``, so the
    report is the same for any ``jobs``."""
    if n_trials < 1:
        raise ValueError("n_trials must be >= 1")
    args = [(i, seed, leaf_count, evo, arena, radius) for i in range(n_trials)]
    trials: list[Trial] = []
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            for trial in pool.map(_run_trial_args, args):
                trials.append(trial)
                if progress:
                    progress(trial)
    else:
        for a in args:
            trials.append(run_trial(*a))
            if progress:
                progress(trials[-1])
    return BenchmarkReport(trials)


def stream_distances(a: MetricSeries, b: MetricSeries, normalization: str = "pair") -> np.ndarray:
    """Per-stream Euclidean distance between two metric series.

    ``"pair"`` min-max normalises each stream over the two series jointly;
    ``"none"`` compares raw values.
    """
    if normalization == "pair":
        bounds = MetricBounds.from_values(np.stack([a.values, b.values]))
        va, vb = normalize_values(a.values, bounds), normalize_values(b.values, bounds)
    elif normalization == "none":
        va, vb = a.values, b.values
    else:
        raise ValueError(f"unknown normalization {normalization!r}")
    return np.sqrt(((va - vb) ** 2).sum(axis=1))


@dataclass
class DiscriminationReport:
    """``distances[setting]`` has shape ``(n_pairs, 9)``; settings are
    ``"same"`` (one tree, two runs) and ``"different"`` (two trees)."""

    distances: dict[str, np.ndarray]
    trees: dict[str, list[tuple[BehaviorTree, BehaviorTree]]]

    def means(self) -> dict[str, dict[str, float]]:
        return {s: dict(zip(STREAMS, d.mean(axis=0).tolist())) for s, d in self.distances.items()}

    def discriminating_streams(self) -> list[str]:
        same, diff = self.distances["same"].mean(0), self.distances["different"].mean(0)
        return [s for s, a, b in zip(STREAMS, same, diff) if a < b]

    def rows(self):
        for setting, d in self.distances.items():
            for pair, row in enumerate(d):
                for name, v in zip(STREAMS, row):
                    yield pair, setting, name, float(v)


def _pair_series(tree_a, tree_b, arena, rng, radius) -> tuple[MetricSeries, MetricSeries]:
    runs = []
    for tree in (tree_a, tree_b):
        traj = simulate(tree, init_state(arena, rng), arena, rng)
        runs.append(compute_metrics(traj, radius))
    return runs[0], runs[1]


def discrimination_study(
    n_pairs: int,
    leaf_count: int = 3,
    arena: ArenaConfig = ArenaConfig(),
    seed: int = 0,
    radius: float | None = None,
    normalization: str = "pair",
) -> DiscriminationReport:
    """Per-stream distances for same-tree and different-tree trajectory pairs.

    Both runs in a pair start from independent placements and consume
    independent random draws.
    """
    if n_pairs < 1:
        raise ValueError("n_pairs must be >= 1")
    distances, trees = {}, {}
    for s, setting in enumerate(("same", "different")):
        rows, pairs = [], []
        for p in range(n_pairs):
            rng = np.random.default_rng([seed, s, p])
            a = random_tree(leaf_count, rng)
            if setting == "same":
                b = a
            else:
                b = random_tree(leaf_count, rng)
                while b.multiset() == a.multiset():
                    b = random_tree(leaf_count, rng)
            sa, sb = _pair_series(a, b, arena, rng, radius)
            rows.append(stream_distances(sa, sb, normalization))
            pairs.append((a, b))
        distances[setting] = np.array(rows)
        trees[setting] = pairs
    return DiscriminationReport(distances, trees)

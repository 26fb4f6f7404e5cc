"""Behavior-tree genotype.

A controller is a single sequence node whose children are motion leaves, so
only the ordered leaf list is stored. Trees are immutable; every operator
takes an explicit ``numpy.random.Generator``.
"""
from __future__ import annotations

import enum
import re
from collections import Counter
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np


class LeafAction(enum.Enum):
    AGGREGATION = "aggregation"
    DISPERSION = "dispersion"
    SEPARATION = "separation"
    CLUSTERING = "clustering"
    RANDOM = "random"
    SOUTHEAST = "southeast"
    SOUTHWEST = "southwest"
    NORTHEAST = "northeast"
    NORTHWEST = "northwest"

    @property
    def token(self) -> str:
        return self.value


ACTIONS: tuple[LeafAction, ...] = tuple(LeafAction)
TOKENS: tuple[str, ...] = tuple(a.token for a in ACTIONS)
ACTION_INDEX = {a: i for i, a in enumerate(ACTIONS)}

# Leaves whose forces oppose each other; originals used for benchmarking
# never contain both members of a pair.
CANCELLING_PAIRS: tuple[frozenset[LeafAction], ...] = (
    frozenset({LeafAction.AGGREGATION, LeafAction.DISPERSION}),
    frozenset({LeafAction.SOUTHEAST, LeafAction.NORTHWEST}),
    frozenset({LeafAction.SOUTHWEST, LeafAction.NORTHEAST}),
)


class TreeParseError(ValueError):
    pass


@dataclass(frozen=True)
class BehaviorTree:
    leaves: tuple[LeafAction, ...]

    def __post_init__(self):
        leaves = tuple(LeafAction(x) if not isinstance(x, LeafAction) else x for x in self.leaves)
        if not leaves:
            raise ValueError("a behavior tree needs at least one leaf")
        object.__setattr__(self, "leaves", leaves)

    @classmethod
    def of(cls, *leaves: LeafAction | str) -> "BehaviorTree":
        return cls(tuple(LeafAction(x) if isinstance(x, str) else x for x in leaves))

    def __len__(self) -> int:
        return len(self.leaves)

    def __iter__(self):
        return iter(self.leaves)

    def __getitem__(self, i):
        return self.leaves[i]

    def __str__(self) -> str:
        return serialize(self)

    @property
    def tokens(self) -> frozenset[str]:
        return frozenset(a.token for a in self.leaves)

    def counts(self) -> np.ndarray:
        """Number of occurrences of each action, indexed like ``ACTIONS``."""
        out = np.zeros(len(ACTIONS))
        for a in self.leaves:
            out[ACTION_INDEX[a]] += 1
        return out

    def multiset(self) -> Counter:
        return Counter(self.leaves)


def serialize(tree: BehaviorTree) -> str:
    return "seq(" + ",".join(a.token for a in tree.leaves) + ")"


_SEQ = re.compile(r"^\s*seq\s*\((.*)\)\s*$", re.DOTALL)


def parse(text: str) -> BehaviorTree:
    """Parse ``seq(tok,tok,...)``. A bare comma-separated token list is also accepted."""
    m = _SEQ.match(text)
    body = m.group(1) if m else text
    tokens = [t.strip().lower() for t in body.split(",")]
    if not tokens or tokens == [""]:
        raise TreeParseError(f"empty behavior tree {text!r}")
    leaves = []
    for tok in tokens:
        try:
            leaves.append(LeafAction(tok))
        except ValueError:
            raise TreeParseError(
                f"unknown leaf token {tok!r}; valid tokens: {', '.join(TOKENS)}"
            ) from None
    return BehaviorTree(tuple(leaves))


def _check_leaf_count(n: int) -> None:
    if int(n) != n or n < 1:
        raise ValueError(f"leaf count must be a positive integer, got {n!r}")


def random_tree(n_leaves: int, rng: np.random.Generator) -> BehaviorTree:
    """Draw each leaf uniformly and independently from the nine actions."""
    _check_leaf_count(n_leaves)
    idx = rng.integers(0, len(ACTIONS), size=n_leaves)
    return BehaviorTree(tuple(ACTIONS[i] for i in idx))


def cancels(a: LeafAction, b: LeafAction, pairs: Iterable[frozenset] = CANCELLING_PAIRS) -> bool:
    return any({a, b} == set(p) for p in pairs)


def is_constrained(tree: BehaviorTree, pairs: Sequence[frozenset] = CANCELLING_PAIRS) -> bool:
    present = set(tree.leaves)
    return not any(p <= present for p in pairs)


def random_constrained_tree(
    n_leaves: int,
    rng: np.random.Generator,
    pairs: Sequence[frozenset] = CANCELLING_PAIRS,
) -> BehaviorTree:
    """Random tree with no cancelling pair; each slot is drawn uniformly from
    the actions compatible with the slots already filled."""
    _check_leaf_count(n_leaves)
    leaves: list[LeafAction] = []
    for _ in range(n_leaves):
        allowed = [a for a in ACTIONS if not any(cancels(a, b, pairs) for b in leaves)]
        leaves.append(allowed[rng.integers(0, len(allowed))])
    return BehaviorTree(tuple(leaves))


def crossover(
    a: BehaviorTree,
    b: BehaviorTree,
    rng: np.random.Generator,
    point: int | None = None,
) -> tuple[BehaviorTree, BehaviorTree]:
    """Single-point crossover; the cut is uniform in ``[1, L-1]`` unless given."""
    if len(a) != len(b):
        raise ValueError(f"crossover needs equal leaf counts, got {len(a)} and {len(b)}")
    n = len(a)
    if n < 2:
        raise ValueError("crossover needs at least two leaves")
    k = int(rng.integers(1, n)) if point is None else point
    if not 1 <= k <= n - 1:
        raise ValueError(f"cross point {k} outside [1, {n - 1}]")
    return (
        BehaviorTree(a.leaves[:k] + b.leaves[k:]),
        BehaviorTree(b.leaves[:k] + a.leaves[k:]),
    )


def mutate(tree: BehaviorTree, rng: np.random.Generator) -> BehaviorTree:
    """Replace one uniformly chosen leaf with one of the eight other actions."""
    i = int(rng.integers(0, len(tree)))
    others = [a for a in ACTIONS if a is not tree.leaves[i]]
    leaves = list(tree.leaves)
    leaves[i] = others[rng.integers(0, len(others))]
    return BehaviorTree(tuple(leaves))

"""Deterministic 2D swarm simulator.

Every agent runs the same behavior tree. Per tick, each leaf contributes a
unit (or zero) direction, the contributions are summed and the result is
rescaled to the agent speed. All agents are updated synchronously from the
previous frame and positions are clamped to the square arena.

``leaf_direction`` and ``tick`` are the per-agent reference semantics;
``step``/``simulate``/``simulate_many`` run the same rules vectorised over
agents and over a batch of trees.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .bt import ACTIONS, BehaviorTree, LeafAction

EPS = 1e-12
_DIAG = 1.0 / np.sqrt(2.0)

CONSTANT_FORCES = {
    LeafAction.SOUTHEAST: np.array([_DIAG, -_DIAG]),
    LeafAction.SOUTHWEST: np.array([-_DIAG, -_DIAG]),
    LeafAction.NORTHEAST: np.array([_DIAG, _DIAG]),
    LeafAction.NORTHWEST: np.array([-_DIAG, _DIAG]),
}


class PlacementError(RuntimeError):
    pass


@dataclass(frozen=True)
class ArenaConfig:
    side_length: float = 8.0
    agent_count: int = 20
    agent_radius: float = 0.25
    sensing_range: float = 0.5
    speed: float = 1.0
    dt: float = 1.0
    steps: int = 100

    def __post_init__(self):
        for name in ("side_length", "agent_radius", "sensing_range", "speed", "dt"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive, got {getattr(self, name)!r}")
        if self.agent_count < 1:
            raise ValueError("agent_count must be >= 1")
        if self.steps < 0:
            raise ValueError("steps must be >= 0")
        if self.sensing_range < self.agent_radius:
            raise ValueError("sensing_range must be >= agent_radius")


@dataclass(frozen=True, eq=False)
class SwarmState:
    positions: np.ndarray
    origins: np.ndarray
    t: int = 0

    @classmethod
    def from_positions(cls, positions, t: int = 0, origins=None) -> "SwarmState":
        pos = np.array(positions, dtype=float).reshape(-1, 2)
        org = pos.copy() if origins is None else np.array(origins, dtype=float).reshape(-1, 2)
        return cls(pos, org, t)

    @property
    def agent_count(self) -> int:
        return len(self.positions)


@dataclass(frozen=True, eq=False)
class Trajectory:
    """Positions of every agent in every frame, shape ``(steps + 1, n, 2)``."""

    config: ArenaConfig
    positions: np.ndarray = field(repr=False)

    def __post_init__(self):
        pos = np.asarray(self.positions, dtype=float)
        if pos.ndim != 3 or pos.shape[2] != 2 or pos.shape[0] < 1:
            raise ValueError(f"trajectory positions must have shape (T, n, 2), got {pos.shape}")
        object.__setattr__(self, "positions", pos)

    def __len__(self) -> int:
        return self.positions.shape[0]

    @property
    def agent_count(self) -> int:
        return self.positions.shape[1]

    @property
    def steps(self) -> int:
        return len(self) - 1

    def frame(self, t: int) -> SwarmState:
        return SwarmState(self.positions[t], self.positions[0], t)

    @property
    def frames(self) -> list[SwarmState]:
        return [self.frame(t) for t in range(len(self))]

    @property
    def initial_state(self) -> SwarmState:
        return self.frame(0)

    def same_as(self, other: "Trajectory") -> bool:
        return self.positions.shape == other.positions.shape and bool(
            np.array_equal(self.positions, other.positions)
        )


def init_state(config: ArenaConfig, rng: np.random.Generator, max_tries: int = 10_000) -> SwarmState:
    """Uniform placement with bodies inside the arena and no overlapping disks."""
    lo, hi = config.agent_radius, config.side_length - config.agent_radius
    if hi < lo:
        raise PlacementError("arena is smaller than one agent body")
    min_d2 = (2 * config.agent_radius) ** 2
    placed: list[np.ndarray] = []
    tries = 0
    while len(placed) < config.agent_count:
        if tries >= max_tries:
            raise PlacementError(
                f"placed {len(placed)}/{config.agent_count} agents after {max_tries} attempts"
            )
        tries += 1
        p = rng.uniform(lo, hi, size=2)
        if all(((p - q) ** 2).sum() >= min_d2 for q in placed):
            placed.append(p)
    return SwarmState.from_positions(np.array(placed))


def _unit(v: np.ndarray) -> np.ndarray:
    n = float(np.hypot(v[0], v[1]))
    return v / n if n > EPS else np.zeros(2)


def leaf_direction(
    action: LeafAction,
    agent: int,
    state: SwarmState,
    config: ArenaConfig,
    rng: np.random.Generator | None = None,
    heading: float | None = None,
) -> np.ndarray:
    """Direction contributed by one leaf for one agent (unit vector or zero).

    Random motion uses ``heading`` (radians) when given, else draws one.
    """
    if action in CONSTANT_FORCES:
        return CONSTANT_FORCES[action].copy()
    if action is LeafAction.RANDOM:
        theta = rng.uniform(0.0, 2 * np.pi) if heading is None else heading
        return np.array([np.cos(theta), np.sin(theta)])

    pos = state.positions
    me = pos[agent]
    nbrs = [j for j in range(len(pos)) if j != agent and np.hypot(*(pos[j] - me)) < config.sensing_range]
    if not nbrs:
        return np.zeros(2)
    if action in (LeafAction.AGGREGATION, LeafAction.DISPERSION):
        toward = _unit(pos[nbrs].mean(axis=0) - me)
        return toward if action is LeafAction.AGGREGATION else -toward
    if action is LeafAction.SEPARATION:
        push = np.zeros(2)
        for j in nbrs:
            d = me - pos[j]
            d2 = d @ d
            if d2 > EPS * EPS:
                push += d / d2
        return _unit(push)
    if action is LeafAction.CLUSTERING:
        j = min(nbrs, key=lambda j: (np.hypot(*(pos[j] - me)), j))
        return _unit(pos[j] - me)
    raise ValueError(f"unhandled action {action!r}")


def tick(
    tree: BehaviorTree,
    agent: int,
    state: SwarmState,
    config: ArenaConfig,
    rng: np.random.Generator,
) -> np.ndarray:
    """Velocity of one agent: leaves summed left to right, rescaled to ``speed``.

    Motion leaves always succeed, so the sequence node visits every leaf.
    One random heading is drawn per call and shared by every random leaf;
    calling this for agents 0..n-1 consumes ``rng`` exactly like ``step``.
    """
    heading = rng.uniform(0.0, 2 * np.pi)
    total = np.zeros(2)
    for action in tree.leaves:
        total = total + leaf_direction(action, agent, state, config, heading=heading)
    n = float(np.hypot(total[0], total[1]))
    return total / n * config.speed if n > EPS else np.zeros(2)


def _unit_xy(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    n = np.sqrt(x * x + y * y)
    ok = n > EPS
    inv = np.where(ok, 1.0 / np.where(ok, n, 1.0), 0.0)
    return np.stack([x * inv, y * inv], axis=-1)


def _leaf_fields(pos: np.ndarray, angles: np.ndarray, sensing: float, needed: np.ndarray) -> list:
    """Per-action directions for a batch of swarms.

    pos: (P, n, 2), angles: (P, n). Returns a list indexed like ``ACTIONS``
    of (P, n, 2) arrays (constants broadcast), ``None`` where not ``needed``.
    """
    P, n, _ = pos.shape
    x, y = pos[..., 0], pos[..., 1]
    dx = x[:, None, :] - x[:, :, None]  # [p, i, j] = x_j - x_i
    dy = y[:, None, :] - y[:, :, None]
    dist = np.sqrt(dx * dx + dy * dy)
    nb = dist < sensing
    nb[:, np.arange(n), np.arange(n)] = False
    count = nb.sum(-1)
    has = (count > 0)[..., None]

    out: list = [None] * len(ACTIONS)
    for k, action in enumerate(ACTIONS):
        if not needed[k]:
            continue
        if action in (LeafAction.AGGREGATION, LeafAction.DISPERSION):
            if out[k] is None:
                c = np.maximum(count, 1)
                agg = np.where(has, _unit_xy((dx * nb).sum(-1) / c, (dy * nb).sum(-1) / c), 0.0)
                out[ACTIONS.index(LeafAction.AGGREGATION)] = agg
                out[ACTIONS.index(LeafAction.DISPERSION)] = -agg
        elif action is LeafAction.SEPARATION:
            safe = nb & (dist > EPS)
            w = safe / np.where(safe, dist * dist, 1.0)
            out[k] = _unit_xy(-(dx * w).sum(-1), -(dy * w).sum(-1))
        elif action is LeafAction.CLUSTERING:
            j = np.where(nb, dist, np.inf).argmin(-1)[..., None]
            near = _unit_xy(
                np.take_along_axis(dx, j, axis=2)[..., 0], np.take_along_axis(dy, j, axis=2)[..., 0]
            )
            out[k] = np.where(has, near, 0.0)
        elif action is LeafAction.RANDOM:
            out[k] = np.stack([np.cos(angles), np.sin(angles)], axis=-1)
        else:
            out[k] = CONSTANT_FORCES[action]
    return out


def _advance(pos: np.ndarray, counts: np.ndarray, angles: np.ndarray, config: ArenaConfig) -> np.ndarray:
    needed = counts.any(axis=0)
    fields = _leaf_fields(pos, angles, config.sensing_range, needed)
    vel = np.zeros_like(pos)
    for k in np.flatnonzero(needed):
        vel += counts[:, k, None, None] * fields[k]
    vel = _unit_xy(vel[..., 0], vel[..., 1]) * config.speed
    return np.clip(pos + vel * config.dt, 0.0, config.side_length)


def step(
    state: SwarmState,
    tree: BehaviorTree,
    config: ArenaConfig,
    rng: np.random.Generator,
) -> SwarmState:
    """Synchronous update of all agents. Draws one random heading per agent,
    in agent order, whether or not the tree uses random motion."""
    n = state.agent_count
    angles = rng.uniform(0.0, 2 * np.pi, size=n)
    new = _advance(state.positions[None], tree.counts()[None], angles[None], config)[0]
    return SwarmState(new, state.origins, state.t + 1)


def simulate_many(
    trees: Sequence[BehaviorTree],
    init_positions: np.ndarray,
    config: ArenaConfig,
    rngs: Sequence[np.random.Generator],
    steps: int | None = None,
) -> np.ndarray:
    """Simulate several homogeneous swarms from the same start in lockstep.

    Returns positions of shape ``(len(trees), steps + 1, n, 2)``. Each tree
    owns its generator; random angles are drawn up front, step-major and
    agent-minor, which is the same stream ``step`` would consume.
    """
    if len(trees) != len(rngs):
        raise ValueError("need one generator per tree")
    steps = config.steps if steps is None else steps
    init = np.asarray(init_positions, dtype=float)
    P, n = len(trees), init.shape[0]
    counts = np.stack([t.counts() for t in trees]) if trees else np.zeros((0, len(ACTIONS)))
    angles = np.stack([r.uniform(0.0, 2 * np.pi, size=(steps, n)) for r in rngs]) if trees else None
    out = np.empty((P, steps + 1, n, 2))
    out[:, 0] = init
    for s in range(steps):
        out[:, s + 1] = _advance(out[:, s], counts, angles[:, s], config)
    return out


def simulate(
    tree: BehaviorTree,
    init: SwarmState,
    config: ArenaConfig,
    rng: np.random.Generator,
) -> Trajectory:
    pos = simulate_many([tree], init.positions, config, [rng])[0]
    return Trajectory(config, pos)

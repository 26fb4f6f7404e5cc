"""Swarm metrics computed from positions only.

Per-frame functions accept a ``SwarmState`` or a bare ``(n, 2)`` array and
also broadcast over leading axes, e.g. ``(T, n, 2)``. ``stream_values``
turns a block of trajectories into the stacked ``(..., 9, T)`` streams.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

import numpy as np

from .sim import SwarmState, Trajectory

STREAMS: tuple[str, ...] = (
    "com_x",
    "com_y",
    "max_shift",
    "mode_index",
    "longest_path",
    "max_radius",
    "avg_local_density",
    "avg_nn_distance",
    "beta_index",
)

MODE_THRESHOLD = 0.1


def _pos(frame) -> np.ndarray:
    return np.asarray(frame.positions if isinstance(frame, SwarmState) else frame, dtype=float)


def _pairwise(pos: np.ndarray) -> np.ndarray:
    dx = pos[..., :, None, 0] - pos[..., None, :, 0]
    dy = pos[..., :, None, 1] - pos[..., None, :, 1]
    return np.sqrt(dx * dx + dy * dy)


def center_of_mass(frame) -> np.ndarray:
    return _pos(frame).mean(axis=-2)


def max_shift(prev, curr) -> float | np.ndarray:
    a, b = _pos(prev), _pos(curr)
    if a.shape != b.shape:
        raise ValueError(f"frames differ in shape: {a.shape} vs {b.shape}")
    return np.sqrt(((b - a) ** 2).sum(-1)).max(-1)


def _axis_mode(coords: np.ndarray) -> np.ndarray:
    freq = (np.abs(coords[..., :, None] - coords[..., None, :]) < MODE_THRESHOLD).sum(-1)
    best = freq.max(-1, keepdims=True)
    return np.where(freq == best, coords, np.inf).min(-1)


def swarm_mode(frame) -> np.ndarray:
    """Per-axis agent coordinate with the most agents within 0.1 m on that
    axis; ties go to the smallest coordinate."""
    p = _pos(frame)
    return np.stack([_axis_mode(p[..., 0]), _axis_mode(p[..., 1])], axis=-1)


def mode_index(frame) -> float | np.ndarray:
    d = swarm_mode(frame) - center_of_mass(frame)
    return np.sqrt((d**2).sum(-1))


def longest_path(frame, origins=None) -> float | np.ndarray:
    p = _pos(frame)
    o = frame.origins if origins is None else origins
    return np.sqrt(((p - np.asarray(o)) ** 2).sum(-1)).max(-1)


def max_radius(frame) -> float | np.ndarray:
    p = _pos(frame)
    d = p - p.mean(axis=-2, keepdims=True)
    return np.sqrt((d**2).sum(-1)).max(-1)


def avg_local_density(frame, r: float, dist: np.ndarray | None = None) -> float | np.ndarray:
    if r <= 0:
        raise ValueError("density radius must be positive")
    p = _pos(frame)
    n = p.shape[-2]
    close = (_pairwise(p) if dist is None else dist) < r
    return (close.sum(-1) - 1).sum(-1) / n  # minus self (distance 0 < r)


def _need_two(p: np.ndarray) -> None:
    if p.shape[-2] < 2:
        raise ValueError("metric needs at least two agents")


def avg_nn_distance(frame, dist: np.ndarray | None = None) -> float | np.ndarray:
    p = _pos(frame)
    _need_two(p)
    n = p.shape[-2]
    d = (_pairwise(p) if dist is None else dist) + np.where(np.eye(n, dtype=bool), np.inf, 0.0)
    return d.min(-1).mean(-1)


def beta_index(frame, rule: str = "closer", dist: np.ndarray | None = None) -> float | np.ndarray:
    """Edges per agent in the proximity graph.

    Two agents are linked when their distance is strictly below the mean
    pairwise distance (``rule="closer"``) or strictly above it
    (``rule="farther"``, the literal reading).
    """
    p = _pos(frame)
    _need_two(p)
    n = p.shape[-2]
    iu = np.triu_indices(n, 1)
    d = (_pairwise(p) if dist is None else dist)[..., iu[0], iu[1]]
    avg = d.mean(-1, keepdims=True)
    if rule == "closer":
        edges = (d < avg).sum(-1)
    elif rule == "farther":
        edges = (d > avg).sum(-1)
    else:
        raise ValueError(f"unknown beta rule {rule!r}")
    return edges / n


def stream_values(positions: np.ndarray, r: float, beta_rule: str = "closer") -> np.ndarray:
    """All nine streams for trajectories of shape ``(..., T, n, 2)`` -> ``(..., 9, T)``."""
    pos = np.asarray(positions, dtype=float)
    com = pos.mean(axis=-2)
    shift = np.zeros(pos.shape[:-2])
    if pos.shape[-3] > 1:
        shift[..., 1:] = max_shift(pos[..., :-1, :, :], pos[..., 1:, :, :])
    origins = pos[..., :1, :, :]
    dist = _pairwise(pos)
    out = np.stack(
        [
            com[..., 0],
            com[..., 1],
            shift,
            mode_index(pos),
            longest_path(pos, origins),
            max_radius(pos),
            avg_local_density(pos, r, dist),
            avg_nn_distance(pos, dist),
            beta_index(pos, beta_rule, dist),
        ],
        axis=-2,
    )
    return out


@dataclass(frozen=True, eq=False)
class MetricSeries:
    """Nine metric streams, ``values[k]`` is the stream named ``STREAMS[k]``."""

    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.ndim != 2 or v.shape[0] != len(STREAMS):
            raise ValueError(f"expected shape ({len(STREAMS)}, T), got {v.shape}")
        object.__setattr__(self, "values", v)

    def __getitem__(self, name: str) -> np.ndarray:
        return self.values[STREAMS.index(name)]

    def __len__(self) -> int:
        return self.values.shape[1]

    def as_dict(self) -> dict[str, np.ndarray]:
        return dict(zip(STREAMS, self.values))


@dataclass(frozen=True, eq=False)
class MetricBounds:
    lo: np.ndarray
    hi: np.ndarray

    def __post_init__(self):
        lo, hi = np.asarray(self.lo, dtype=float), np.asarray(self.hi, dtype=float)
        if lo.shape != (len(STREAMS),) or hi.shape != lo.shape:
            raise ValueError("bounds need one (min, max) per stream")
        if not (np.isfinite(lo).all() and np.isfinite(hi).all()):
            raise ValueError("bounds must be finite")
        if (lo > hi).any():
            raise ValueError("min exceeds max for some stream")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)

    @classmethod
    def from_values(cls, values: np.ndarray) -> "MetricBounds":
        """Bounds over every series and time step in a ``(..., 9, T)`` block."""
        v = np.moveaxis(np.asarray(values, dtype=float), -2, 0).reshape(len(STREAMS), -1)
        return cls(v.min(axis=1), v.max(axis=1))

    @classmethod
    def from_series(cls, series: Iterable[MetricSeries]) -> "MetricBounds":
        return cls.from_values(np.stack([s.values for s in series]))

    def as_dict(self) -> dict[str, tuple[float, float]]:
        return {k: (float(a), float(b)) for k, a, b in zip(STREAMS, self.lo, self.hi)}


def compute_metrics(traj: Trajectory, r: float | None = None, beta_rule: str = "closer") -> MetricSeries:
    r = traj.config.sensing_range if r is None else r
    return MetricSeries(stream_values(traj.positions, r, beta_rule))


def normalize_values(values: np.ndarray, bounds: MetricBounds) -> np.ndarray:
    """Min-max map each stream of a ``(..., 9, T)`` block; degenerate streams go to 0.
    No clipping: later populations may leave the recorded range."""
    span = bounds.hi - bounds.lo
    ok = span > 0
    scaled = (np.asarray(values) - bounds.lo[:, None]) / np.where(ok, span, 1.0)[:, None]
    return np.where(ok[:, None], scaled, 0.0)


def normalize(series: MetricSeries, bounds: MetricBounds) -> MetricSeries:
    return MetricSeries(normalize_values(series.values, bounds))

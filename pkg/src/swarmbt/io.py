"""Trajectory and metrics CSV files.

Trajectory format: header ``t,agent,x,y``, one row per (frame, agent),
frames ascending, agents ascending within a frame. Floats are written with
``repr`` so files round-trip exactly and are byte-stable.
"""
from __future__ import annotations

import csv
import io
from pathlib import Path

import numpy as np

from .metrics import STREAMS, MetricSeries
from .sim import ArenaConfig, Trajectory

TRAJECTORY_HEADER = ["t", "agent", "x", "y"]


class TrajectoryFormatError(ValueError):
    pass


def format_trajectory(traj: Trajectory) -> str:
    buf = io.StringIO()
    buf.write(",".join(TRAJECTORY_HEADER) + "\n")
    for t, frame in enumerate(traj.positions):
        for i, (x, y) in enumerate(frame):
            buf.write(f"{t},{i},{float(x)!r},{float(y)!r}\n")
    return buf.getvalue()


def write_trajectory(traj: Trajectory, path: str | Path) -> None:
    Path(path).write_text(format_trajectory(traj), newline="")


def parse_trajectory(text: str, config: ArenaConfig | None = None, source: str = "<string>") -> Trajectory:
    """Parse and validate a trajectory CSV. Errors name the first bad row
    (1-based line number, header is line 1)."""
    rows = csv.reader(io.StringIO(text))
    header = next(rows, None)
    if header is None or [h.strip() for h in header] != TRAJECTORY_HEADER:
        raise TrajectoryFormatError(f"{source}: line 1: expected header {','.join(TRAJECTORY_HEADER)}")
    frames: list[list[tuple[float, float]]] = []
    for lineno, row in enumerate(rows, start=2):
        if not row:
            continue
        if len(row) != 4:
            raise TrajectoryFormatError(f"{source}: line {lineno}: expected 4 fields, got {len(row)}")
        try:
            t, agent = int(row[0]), int(row[1])
            x, y = float(row[2]), float(row[3])
        except ValueError:
            raise TrajectoryFormatError(f"{source}: line {lineno}: cannot parse {','.join(row)!r}") from None
        if not (np.isfinite(x) and np.isfinite(y)):
            raise TrajectoryFormatError(f"{source}: line {lineno}: non-finite position")
        if t == len(frames) and agent == 0:
            frames.append([])
        if t != len(frames) - 1 or agent != len(frames[-1]):
            raise TrajectoryFormatError(
                f"{source}: line {lineno}: expected frame {len(frames) - 1} agent "
                f"{len(frames[-1]) if frames else 0} or the next frame, got t={t} agent={agent}"
            )
        if t > 0 and agent >= len(frames[0]):
            raise TrajectoryFormatError(f"{source}: line {lineno}: agent {agent} not present in frame 0")
        frames[-1].append((x, y))
    if not frames:
        raise TrajectoryFormatError(f"{source}: no data rows")
    n = len(frames[0])
    for t, f in enumerate(frames):
        if len(f) != n:
            # line of the first missing row: header + full frames before + rows present
            line = 2 + t * n + len(f)
            raise TrajectoryFormatError(
                f"{source}: line {line}: frame {t} has {len(f)} agents, frame 0 has {n}"
            )
    base = config or ArenaConfig()
    cfg = ArenaConfig(**{**base.__dict__, "agent_count": n, "steps": len(frames) - 1})
    return Trajectory(cfg, np.array(frames, dtype=float))


def read_trajectory(path: str | Path, config: ArenaConfig | None = None) -> Trajectory:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise OSError(f"cannot read {path}: {exc.strerror}") from exc
    return parse_trajectory(text, config, source=str(path))


def format_metrics(series: MetricSeries) -> str:
    buf = io.StringIO()
    buf.write(",".join(("t",) + STREAMS) + "\n")
    for t, col in enumerate(series.values.T):
        buf.write(",".join([str(t)] + [repr(float(v)) for v in col]) + "\n")
    return buf.getvalue()


def write_metrics(series: MetricSeries, path: str | Path) -> None:
    Path(path).write_text(format_metrics(series), newline="")


def read_metrics(path: str | Path) -> MetricSeries:
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if rows[0] != ["t", *STREAMS]:
        raise ValueError(f"{path}: unexpected metrics header")
    return MetricSeries(np.array([[float(v) for v in r[1:]] for r in rows[1:]]).T)

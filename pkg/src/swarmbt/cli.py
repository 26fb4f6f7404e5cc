"""Command-line interface.

    swarmbt simulate --tree "seq(northeast,aggregation,random)" --seed 1 --out obs.csv
    swarmbt extract obs.csv --seed 2 --out report.json
    swarmbt metrics obs.csv --out metrics.csv
    swarmbt evaluate "seq(a,b,c)" "seq(a,b,d)"
    swarmbt bench --n 20 --leaves 3 --seed 0 --out-dir bench/ --jobs 4
    swarmbt discriminate --pairs 30 --leaves 3 --seed 0 --out-dir disc/

Every random choice derives from ``--seed`` (or ``seed`` in ``--config``),
which is mandatory where randomness is involved. A config file holds flat
``key = value`` lines using the long option names with underscores; flags
override it.
"""
from __future__ import annotations

import argparse
import csv
import json
import logging
import sys
from dataclasses import asdict, fields
from pathlib import Path

import numpy as np

from . import __version__
from .bt import parse
from .evaluation import discrimination_study, jaccard, run_benchmark
from .evolve import EvolutionConfig, extract
from .io import read_trajectory, write_metrics, write_trajectory
from .metrics import STREAMS, compute_metrics
from .plots import grouped_bars, line_chart
from .sim import ArenaConfig, init_state, simulate

ARENA_KEYS = {f.name for f in fields(ArenaConfig)}
EVO_KEYS = {f.name for f in fields(EvolutionConfig)} - {"seed", "leaf_count"}
INT_KEYS = {"agent_count", "steps", "population_size", "generations", "elitism_size",
            "tournament_size", "seed", "leaves", "n", "pairs", "jobs"}
BOOL_KEYS = {"constrain_originals"}


class CLIError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise CLIError(message)


def read_config_file(path: str | Path) -> dict:
    out = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise CLIError(f"{path}:{lineno}: expected key = value")
        key, value = (s.strip() for s in line.split("=", 1))
        key = key.replace("-", "_")
        try:
            if key in BOOL_KEYS:
                if value.lower() not in ("true", "false", "1", "0", "yes", "no"):
                    raise ValueError(value)
                out[key] = value.lower() in ("true", "1", "yes")
            elif key in INT_KEYS:
                out[key] = int(value)
            elif key in ARENA_KEYS | EVO_KEYS | {"radius"}:
                out[key] = float(value)
            else:
                raise CLIError(f"{path}:{lineno}: unknown key {key!r}")
        except ValueError:
            raise CLIError(f"{path}:{lineno}: bad value {value!r} for {key}") from None
    return out


def _settings(args) -> dict:
    """Config-file values overridden by explicitly given flags."""
    merged = read_config_file(args.config) if getattr(args, "config", None) else {}
    merged.update({k: v for k, v in vars(args).items() if v is not None and k not in ("config", "func")})
    return merged


def _arena(s: dict) -> ArenaConfig:
    return ArenaConfig(**{k: s[k] for k in ARENA_KEYS if k in s})


def _evo(s: dict, seed: int) -> EvolutionConfig:
    kw = {k: s[k] for k in EVO_KEYS if k in s}
    return EvolutionConfig(seed=seed, leaf_count=s.get("leaves", 3), **kw)


def _seed(s: dict) -> int:
    if "seed" not in s:
        raise CLIError("--seed is required (no wall-clock default)")
    return int(s["seed"])


def _add_arena(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("arena")
    g.add_argument("--side-length", dest="side_length", type=float)
    g.add_argument("--agents", dest="agent_count", type=int)
    g.add_argument("--agent-radius", dest="agent_radius", type=float)
    g.add_argument("--sensing-range", dest="sensing_range", type=float)
    g.add_argument("--speed", type=float)
    g.add_argument("--dt", type=float)
    g.add_argument("--steps", type=int)
    g.add_argument("--radius", type=float, help="local-density radius (default: sensing range)")


def _add_evo(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("evolution")
    g.add_argument("--population", dest="population_size", type=int)
    g.add_argument("--generations", type=int)
    g.add_argument("--elitism", dest="elitism_size", type=int)
    g.add_argument("--tournament", dest="tournament_size", type=int)
    g.add_argument("--crossover-rate", dest="crossover_rate", type=float)
    g.add_argument("--mutation-rate", dest="mutation_rate", type=float)


def cmd_simulate(args) -> None:
    s = _settings(args)
    tree = parse(args.tree)
    arena = _arena(s)
    rng = np.random.default_rng(_seed(s))
    traj = simulate(tree, init_state(arena, rng), arena, rng)
    write_trajectory(traj, args.out)
    print(f"frames={len(traj)} agents={traj.agent_count} tree={tree} -> {args.out}")


def _history_rows(result):
    for g, ((best, mean), tree) in enumerate(zip(result.history, result.best_trees)):
        yield g, best, mean, str(tree)


def cmd_extract(args) -> None:
    s = _settings(args)
    seed = _seed(s)
    arena = _arena(s)
    obs = read_trajectory(args.observation, arena)
    cfg = _evo(s, seed)

    def show(gen, best, mean, tree):
        print(f"{gen}\t{best!r}\t{mean!r}\t{tree}", flush=True)

    result = extract(obs, cfg, radius=s.get("radius"), on_generation=show)
    report = {
        "observation": str(args.observation),
        "best_tree": str(result.best_tree),
        "best_fitness": result.best_fitness,
        "history": [
            {"generation": g, "best_fitness": b, "mean_fitness": m, "best_tree": t}
            for g, b, m, t in _history_rows(result)
        ],
        "bounds": {k: list(v) for k, v in result.bounds.as_dict().items()},
        "config": asdict(cfg),
        "arena": asdict(obs.config),
    }
    Path(args.out).write_text(json.dumps(report, indent=2) + "\n")
    if args.log:
        with open(args.log, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["generation", "best_fitness", "mean_fitness", "best_tree"])
            for g, b, m, t in _history_rows(result):
                w.writerow([g, repr(b), repr(m), t])


def cmd_metrics(args) -> None:
    s = _settings(args)
    traj = read_trajectory(args.trajectory, _arena(s))
    series = compute_metrics(traj, s.get("radius"), args.beta_rule)
    write_metrics(series, args.out)
    print(f"frames={len(traj)} agents={traj.agent_count} -> {args.out}")


def cmd_evaluate(args) -> None:
    print(jaccard(parse(args.tree_a), parse(args.tree_b), args.mode))


def cmd_bench(args) -> None:
    s = _settings(args)
    seed = _seed(s)
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    evo = _evo(s, seed)

    def progress(t):
        print(f"trial {t.index}: {t.original} -> {t.extracted} jaccard={t.jaccard:.3f} {t.cls}",
              file=sys.stderr, flush=True)

    report = run_benchmark(args.n, args.leaves, evo, _arena(s), seed, s.get("radius"),
                           args.jobs, progress)
    with open(out / "benchmark.csv", "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["trial", "original", "extracted", "jaccard", "final_fitness", "class"])
        for t in report.trials:
            w.writerow([t.index, t.original, t.extracted, repr(t.jaccard), repr(t.final_fitness), t.cls])
    with open(out / "learning_curves.csv", "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["trial", "generation", "best_fitness", "mean_fitness"])
        for t in report.trials:
            for g, (b, m) in enumerate(t.history):
                w.writerow([t.index, g, repr(b), repr(m)])
    summary = {**report.summary(), "leaf_count": args.leaves, "seed": seed,
               "confusion": report.confusion()}
    (out / "summary.json").write_text(json.dumps(summary, indent=2) + "\n")
    hist = np.array([t.history for t in report.trials])
    line_chart({"best fitness": hist[:, :, 0].mean(0).tolist(),
                "average fitness": hist[:, :, 1].mean(0).tolist()},
               f"learning curves over {len(report.trials)} trials", out / "learning_curves.svg")
    s = report.summary()
    print(f"trials={s['trials']} exact={s['exact']} high={s['high_similarity']} "
          f"low={s['low_similarity']} mean_jaccard={s['mean_jaccard']:.3f}")
    if report.zero_jaccard_trials:
        print(f"WARNING zero-similarity extraction in trials {report.zero_jaccard_trials}")


def cmd_discriminate(args) -> None:
    s = _settings(args)
    seed = _seed(s)
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    report = discrimination_study(args.pairs, args.leaves, _arena(s), seed, s.get("radius"),
                                  args.normalization)
    with open(out / "discrimination.csv", "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["pair", "setting", "metric", "distance"])
        for pair, setting, name, v in report.rows():
            w.writerow([pair, setting, name, repr(v)])
    means = report.means()
    grouped_bars(list(STREAMS), {"same tree": list(means["same"].values()),
                                 "different trees": list(means["different"].values())},
                 "mean metric distance", out / "discrimination.svg")
    for name in STREAMS:
        print(f"{name}\tsame={means['same'][name]:.4f}\tdifferent={means['different'][name]:.4f}")
    print(f"discriminating streams: {len(report.discriminating_streams())}/{len(STREAMS)}")


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="swarmbt", description="Extract behavior-tree swarm controllers from trajectories.")
    p.add_argument("--version", action="version", version=__version__)
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    c = sub.add_parser("simulate", help="simulate a tree and write a trajectory CSV")
    c.add_argument("--tree", required=True)
    c.add_argument("--seed", type=int)
    c.add_argument("--out", required=True)
    c.add_argument("--config")
    _add_arena(c)
    c.set_defaults(func=cmd_simulate)

    c = sub.add_parser("extract", help="evolve a tree matching an observed trajectory")
    c.add_argument("observation")
    c.add_argument("--seed", type=int)
    c.add_argument("--out", required=True, help="JSON report path")
    c.add_argument("--log", help="optional CSV generation log")
    c.add_argument("--leaves", type=int, help="leaf count of candidate trees (default 3)")
    c.add_argument("--config")
    _add_arena(c)
    _add_evo(c)
    c.set_defaults(func=cmd_extract)

    c = sub.add_parser("metrics", help="compute the metric streams of a trajectory")
    c.add_argument("trajectory")
    c.add_argument("--out", required=True)
    c.add_argument("--beta-rule", choices=("closer", "farther"), default="closer")
    c.add_argument("--config")
    _add_arena(c)
    c.set_defaults(func=cmd_metrics)

    c = sub.add_parser("evaluate", help="Jaccard similarity of two trees")
    c.add_argument("tree_a")
    c.add_argument("tree_b")
    c.add_argument("--mode", choices=("token", "char"), default="token")
    c.set_defaults(func=cmd_evaluate)

    c = sub.add_parser("bench", help="random-original recovery benchmark")
    c.add_argument("--n", type=int, default=100)
    c.add_argument("--leaves", type=int, default=3)
    c.add_argument("--seed", type=int)
    c.add_argument("--out-dir", required=True)
    c.add_argument("--jobs", type=int, default=1)
    c.add_argument("--config")
    _add_arena(c)
    _add_evo(c)
    c.set_defaults(func=cmd_bench)

    c = sub.add_parser("discriminate", help="same-tree vs different-tree metric distances")
    c.add_argument("--pairs", type=int, default=100)
    c.add_argument("--leaves", type=int, default=3)
    c.add_argument("--seed", type=int)
    c.add_argument("--out-dir", required=True)
    c.add_argument("--normalization", choices=("pair", "none"), default="pair")
    c.add_argument("--config")
    _add_arena(c)
    c.set_defaults(func=cmd_discriminate)
    return p


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING)
        args.func(args)
    except (CLIError, ValueError, OSError, RuntimeError) as exc:
        msg = " ".join(str(exc).split())
        print(f"swarmbt: error: {msg}", file=sys.stderr)
        return 2 if isinstance(exc, CLIError) else 1
    return 0


if __name__ == "__main__":
    sys.exit(main())

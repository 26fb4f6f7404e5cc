#!/usr/bin/env python
"""Recovery versus tree size: one benchmark per leaf count.

    python scripts/arity_scaling.py --n 100 --leaves 3 4 5 6 --jobs 8
"""
from __future__ import annotations

import argparse
from pathlib import Path

from swarmbt.evaluation import run_benchmark
from swarmbt.evolve import EvolutionConfig


def main() -> None:
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--n", type=int, default=100)
    p.add_argument("--leaves", type=int, nargs="+", default=[3, 4, 5, 6])
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--out", default="runs/arity_scaling.csv")
    args = p.parse_args()

    Path(args.out).parent.mkdir(parents=True, exist_ok=True)
    rows = ["leaves,trials,exact,high,low,mean_jaccard,zero_jaccard"]
    for leaves in args.leaves:
        r = run_benchmark(args.n, leaves, EvolutionConfig(), seed=args.seed, jobs=args.jobs)
        rows.append(f"{leaves},{args.n},{r.exact_count},{r.high_similarity_count},"
                    f"{r.low_similarity_count},{r.mean_jaccard!r},{len(r.zero_jaccard_trials)}")
        print(rows[-1], flush=True)
    Path(args.out).write_text("\n".join(rows) + "\n")


if __name__ == "__main__":
    main()

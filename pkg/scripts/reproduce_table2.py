#!/usr/bin/env python
"""Random-original recovery benchmark (100 trials, 3 leaves by default).

    python scripts/reproduce_table2.py --seed 0 --jobs 8 --out-dir runs/table2
"""
from __future__ import annotations

import argparse
import json
from pathlib import Path

from swarmbt.cli import main as cli


def main() -> None:
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--n", type=int, default=100)
    p.add_argument("--leaves", type=int, default=3)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--out-dir", default="runs/table2")
    args = p.parse_args()

    code = cli(["bench", "--n", str(args.n), "--leaves", str(args.leaves), "--seed", str(args.seed),
                "--jobs", str(args.jobs), "--out-dir", args.out_dir])
    if code:
        raise SystemExit(code)
    summary = json.loads((Path(args.out_dir) / "summary.json").read_text())
    print(f"{'Accuracy':<36}{summary['exact']}")
    print(f"{'controllers with high similarity':<36}{summary['high_similarity']}")
    print(f"{'controllers with low similarity':<36}{summary['low_similarity']}")
    print(f"{'Average Jaccard Index (all)':<36}{summary['mean_jaccard']:.3f}")
    conf = summary["confusion"]
    print("\naction        present  missed  most common replacement")
    for tok in conf["present"]:
        repl = conf["replaced_by"][tok]
        top = max(repl, key=repl.get) if repl else "-"
        print(f"{tok:<14}{conf['present'][tok]:>7}{conf['missed'][tok]:>8}  {top}")


if __name__ == "__main__":
    main()

#!/usr/bin/env python
"""Same-tree vs different-tree metric distances (100 pairs per setting).

Writes discrimination.csv and a bar chart; box plots can be drawn from the CSV.
"""
from __future__ import annotations

import argparse

from swarmbt.cli import main as cli


def main() -> None:
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--pairs", type=int, default=100)
    p.add_argument("--leaves", type=int, default=3)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out-dir", default="runs/discrimination")
    args = p.parse_args()
    raise SystemExit(cli(["discriminate", "--pairs", str(args.pairs), "--leaves", str(args.leaves),
                          "--seed", str(args.seed), "--out-dir", args.out_dir]))


if __name__ == "__main__":
    main()

#!/usr/bin/env python3
"""Scatter data: objective value at the random start versus after local descent.

Writes initial_vs_optimized.csv plus per-instance sample correlations; low
correlation means the start value does not predict the basin a descent lands in.
"""

import argparse

from intervalwalk.experiments import ExperimentConfig, run_initial_vs_optimized
from intervalwalk.optimize import Sense


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", default="results/scatter")
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--threads", type=int, default=2)
    parser.add_argument("--cells", default="8x8", help="VERTICESxSTEPS[,...]")
    parser.add_argument("--instances", type=int, default=10)
    parser.add_argument("--starts", type=int, default=300)
    parser.add_argument("--sense", choices=["min", "max"], default="max")
    args = parser.parse_args()

    cells = tuple(tuple(int(p) for p in cell.split("x")) for cell in args.cells.split(","))
    config = ExperimentConfig(
        cells=cells,
        instances=args.instances,
        starts=args.starts,
        seed=args.seed,
        sense=Sense(args.sense),
    )
    csv_path, summary_path = run_initial_vs_optimized(config, args.out, threads=args.threads)
    print(f"wrote {csv_path}")
    print(f"wrote {summary_path}")


if __name__ == "__main__":
    main()

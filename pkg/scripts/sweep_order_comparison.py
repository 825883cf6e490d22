#!/usr/bin/env python3
"""Compare where left-to-right and right-to-left sweeps land from identical starts.

Writes sweep_comparison.csv with per-extremum hit frequencies for both orders
and the per-instance fraction of starts on which the two orders disagree.
"""

import argparse

from intervalwalk.experiments import ExperimentConfig, run_sweep_comparison


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", default="results/sweep")
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--threads", type=int, default=2)
    parser.add_argument("--cells", default="6x4", help="VERTICESxSTEPS[,...]")
    parser.add_argument("--instances", type=int, default=20)
    parser.add_argument("--starts", type=int, default=200)
    args = parser.parse_args()

    cells = tuple(tuple(int(p) for p in cell.split("x")) for cell in args.cells.split(","))
    config = ExperimentConfig(
        cells=cells, instances=args.instances, starts=args.starts, seed=args.seed
    )
    csv_path, summary_path = run_sweep_comparison(config, args.out, threads=args.threads)
    print(f"wrote {csv_path}")
    print(f"wrote {summary_path}")


if __name__ == "__main__":
    main()

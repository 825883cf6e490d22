"""Experiment runners emitting plot-ready CSV files plus a JSON run summary.

Four experiments over grids of random instances: a census of unique local
extrema, a comparison of the two sweep orders, initial-vs-optimized value
scatter data, and best-so-far deviation curves with and without local
optimization.  Every run is bit-deterministic for a given seed: each unit of
work draws from a substream keyed by (seed, experiment, role, cell, instance),
so neither scheduling nor worker count can change the output files.
"""

from __future__ import annotations

import csv
import json
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .generate import GenParams, generate_instance
from .optimize import (
    OptimizationProblem,
    Sense,
    SweepOrder,
    local_optimize,
    multistart,
    random_extremal_schedule,
)
from .rng import derive_seed, substream

# experiment ids and stream roles for substream addressing
_EXP_COUNT, _EXP_SWEEP, _EXP_SCATTER, _EXP_DEV = 1, 2, 3, 4
_ROLE_GEN, _ROLE_MIN, _ROLE_MAX, _ROLE_SHUFFLE = 0, 1, 2, 3

#: Reference mean extrema counts for this instance family, measured at the
#: larger published scale (200 parameter sets, 1500 starts per set); recorded
#: in run summaries for qualitative trend comparison only.
REFERENCE_MEAN_EXTREMA = {
    (4, 2): 1.9,
    (4, 4): 13.4,
    (4, 6): 80.6,
    (6, 2): 3.2,
    (6, 4): 46.8,
    (6, 6): 251.2,
    (8, 2): 5.3,
    (8, 4): 100.3,
    (8, 6): 411.4,
}

_DEFAULT_CELLS = tuple((v, n) for v in (4, 6, 8) for n in (2, 4, 6))


@dataclass(frozen=True)
class ExperimentConfig:
    """Grid and sampling parameters shared by all experiment runners.

    `cells` lists (vertices, steps) pairs; `instances` random instances are
    generated per cell and `starts` random extremal schedules are optimized
    per instance.  The remaining fields mirror the instance generator.
    """

    cells: tuple[tuple[int, int], ...] = _DEFAULT_CELLS
    instances: int = 50
    starts: int = 300
    seed: int = 0
    sense: Sense = Sense.MIN
    orders: tuple[SweepOrder, ...] = (SweepOrder.LEFT_TO_RIGHT, SweepOrder.RIGHT_TO_LEFT)
    disconnect_fraction: float = 0.25
    lower_mean: float = 0.8
    width_mean: float = 1.0
    qf_mean: float = 1.5
    marginal_slack: float = 0.1

    def __post_init__(self):
        cells = tuple((int(v), int(n)) for v, n in self.cells)
        if not cells:
            raise ValueError("need at least one (vertices, steps) cell")
        for v, n in cells:
            if v < 2 or n < 1:
                raise ValueError(f"bad cell ({v}, {n}): vertices >= 2 and steps >= 1 required")
        if self.instances < 1 or self.starts < 1:
            raise ValueError("instances and starts must be at least 1")
        if not self.orders:
            raise ValueError("need at least one sweep order")
        object.__setattr__(self, "cells", cells)
        object.__setattr__(self, "orders", tuple(self.orders))

    def gen_params(self, vertices: int, seed: int) -> GenParams:
        return GenParams(
            s=vertices,
            disconnect_fraction=self.disconnect_fraction,
            lower_mean=self.lower_mean,
            width_mean=self.width_mean,
            qf_mean=self.qf_mean,
            marginal_slack=self.marginal_slack,
            seed=seed,
        )


def config_to_dict(config: ExperimentConfig) -> dict:
    return {
        "cells": [list(cell) for cell in config.cells],
        "instances": config.instances,
        "starts": config.starts,
        "seed": config.seed,
        "sense": config.sense.value,
        "orders": [o.value for o in config.orders],
        "disconnect_fraction": config.disconnect_fraction,
        "lower_mean": config.lower_mean,
        "width_mean": config.width_mean,
        "qf_mean": config.qf_mean,
        "marginal_slack": config.marginal_slack,
    }


def config_from_dict(data: dict) -> ExperimentConfig:
    """Build a config from a parsed JSON document; unknown keys are rejected."""
    if not isinstance(data, dict):
        raise ValueError("experiment config must be a JSON object")
    known = set(config_to_dict(ExperimentConfig()))
    unknown = set(data) - known
    if unknown:
        raise ValueError(f"unknown config fields: {', '.join(sorted(unknown))}")
    kwargs = dict(data)
    if "cells" in kwargs:
        kwargs["cells"] = tuple(tuple(cell) for cell in kwargs["cells"])
    if "sense" in kwargs:
        kwargs["sense"] = Sense(kwargs["sense"])
    if "orders" in kwargs:
        kwargs["orders"] = tuple(SweepOrder(o) for o in kwargs["orders"])
    return ExperimentConfig(**kwargs)


def load_config(path) -> ExperimentConfig:
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ValueError(f"not a JSON document: {exc}") from exc
    return config_from_dict(data)


def _write_csv(path: Path, header: list[str], rows) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)


def _write_summary(path: Path, payload: dict) -> None:
    path.write_text(json.dumps(payload, indent=2) + "\n", encoding="utf-8")


def _map_tasks(func, tasks, threads: int):
    if threads <= 1:
        return [func(task) for task in tasks]
    with ProcessPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(func, tasks))


def _instance_for(config, exp_id, ci, inst):
    vertices, steps = config.cells[ci]
    params = config.gen_params(vertices, derive_seed(config.seed, exp_id, _ROLE_GEN, ci, inst))
    bounds, q, f = generate_instance(params)
    return bounds, q, f, steps


# --- unique local extrema census ---------------------------------------------


def _count_task(args):
    config, ci, inst = args
    bounds, q, f, steps = _instance_for(config, _EXP_COUNT, ci, inst)
    order = config.orders[0]
    report_min = multistart(
        OptimizationProblem(bounds, q, f, steps, Sense.MIN),
        config.starts,
        derive_seed(config.seed, _EXP_COUNT, _ROLE_MIN, ci, inst),
        order,
    )
    report_max = multistart(
        OptimizationProblem(bounds, q, f, steps, Sense.MAX),
        config.starts,
        derive_seed(config.seed, _EXP_COUNT, _ROLE_MAX, ci, inst),
        order,
    )
    return ci, inst, len(report_min.unique_extrema), len(report_max.unique_extrema)


def run_extrema_count(config: ExperimentConfig, out_dir, threads: int = 1) -> tuple[Path, Path]:
    """Count deduplicated local minima and maxima discovered per instance.

    CSV columns: vertices, steps, instance_id, unique_local_minima,
    unique_local_maxima.  After each cell's instances one summary row with
    instance_id = "mean" carries the per-cell sample means.
    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    tasks = [(config, ci, inst) for ci in range(len(config.cells)) for inst in range(config.instances)]
    results = _map_tasks(_count_task, tasks, threads)

    rows = []
    cell_stats = []
    for ci, (vertices, steps) in enumerate(config.cells):
        mins, maxs = [], []
        for rci, inst, n_min, n_max in results:
            if rci != ci:
                continue
            rows.append([vertices, steps, inst, n_min, n_max])
            mins.append(n_min)
            maxs.append(n_max)
        mean_min = float(np.mean(mins))
        mean_max = float(np.mean(maxs))
        rows.append([vertices, steps, "mean", mean_min, mean_max])
        cell_stats.append(
            {
                "vertices": vertices,
                "steps": steps,
                "mean_unique_local_minima": mean_min,
                "mean_unique_local_maxima": mean_max,
                "reference_mean_extrema": REFERENCE_MEAN_EXTREMA.get((vertices, steps)),
            }
        )

    csv_path = out_dir / "extrema_counts.csv"
    _write_csv(
        csv_path,
        ["vertices", "steps", "instance_id", "unique_local_minima", "unique_local_maxima"],
        rows,
    )
    summary_path = out_dir / "extrema_counts_summary.json"
    _write_summary(summary_path, {"config": config_to_dict(config), "cells": cell_stats})
    return csv_path, summary_path


# --- sweep-order comparison ---------------------------------------------------


def _sweep_task(args):
    config, ci, inst = args
    bounds, q, f, steps = _instance_for(config, _EXP_SWEEP, ci, inst)
    out = []
    for sense, role in ((Sense.MIN, _ROLE_MIN), (Sense.MAX, _ROLE_MAX)):
        problem = OptimizationProblem(bounds, q, f, steps, sense)
        seed = derive_seed(config.seed, _EXP_SWEEP, role, ci, inst)
        census: dict[tuple, list] = {}
        disagreements = 0
        for idx in range(config.starts):
            start = random_extremal_schedule(bounds, steps, substream(seed, idx))
            run_lr = local_optimize(problem, start, SweepOrder.LEFT_TO_RIGHT)
            run_rl = local_optimize(problem, start, SweepOrder.RIGHT_TO_LEFT)
            if run_lr.selections != run_rl.selections:
                disagreements += 1
            for column, run in ((0, run_lr), (1, run_rl)):
                entry = census.setdefault(run.selections, [run.value, 0, 0])
                entry[1 + column] += 1
        reverse = sense is Sense.MAX
        ordered = sorted(
            census.items(), key=lambda item: (-item[1][0] if reverse else item[1][0], item[0])
        )
        fraction = disagreements / config.starts
        for _, (value, hits_lr, hits_rl) in ordered:
            out.append(
                (sense.value, value, hits_lr / config.starts, hits_rl / config.starts, fraction)
            )
    return ci, inst, out


def run_sweep_comparison(config: ExperimentConfig, out_dir, threads: int = 1) -> tuple[Path, Path]:
    """Feed identical starts to both sweep orders and compare where they land.

    CSV columns: vertices, steps, instance_id, sense, extremum_value,
    freq_left_to_right, freq_right_to_left, order_disagreement_fraction (the
    per-instance fraction of starts whose two descents reached different
    extrema, repeated on each of its rows).
    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    tasks = [(config, ci, inst) for ci in range(len(config.cells)) for inst in range(config.instances)]
    results = _map_tasks(_sweep_task, tasks, threads)

    rows = []
    disagreement_stats = []
    for ci, inst, entries in results:
        vertices, steps = config.cells[ci]
        for sense, value, freq_lr, freq_rl, fraction in entries:
            rows.append([vertices, steps, inst, sense, value, freq_lr, freq_rl, fraction])
        disagreement_stats.append(
            {
                "vertices": vertices,
                "steps": steps,
                "instance_id": inst,
                "disagreement_fraction": {
                    sense: fraction
                    for sense, _, _, _, fraction in entries
                }
                if entries
                else {},
            }
        )

    csv_path = out_dir / "sweep_comparison.csv"
    _write_csv(
        csv_path,
        [
            "vertices",
            "steps",
            "instance_id",
            "sense",
            "extremum_value",
            "freq_left_to_right",
            "freq_right_to_left",
            "order_disagreement_fraction",
        ],
        rows,
    )
    summary_path = out_dir / "sweep_comparison_summary.json"
    _write_summary(
        summary_path,
        {"config": config_to_dict(config), "instances": disagreement_stats},
    )
    return csv_path, summary_path


# --- initial value vs optimized value -----------------------------------------


def _scatter_task(args):
    config, ci, inst = args
    bounds, q, f, steps = _instance_for(config, _EXP_SCATTER, ci, inst)
    problem = OptimizationProblem(bounds, q, f, steps, config.sense)
    role = _ROLE_MIN if config.sense is Sense.MIN else _ROLE_MAX
    seed = derive_seed(config.seed, _EXP_SCATTER, role, ci, inst)
    pairs = []
    for idx in range(config.starts):
        start = random_extremal_schedule(bounds, steps, substream(seed, idx))
        run = local_optimize(problem, start, config.orders[0])
        pairs.append((run.start_value, run.value))
    return ci, inst, pairs


def run_initial_vs_optimized(
    config: ExperimentConfig, out_dir, threads: int = 1
) -> tuple[Path, Path]:
    """Emit (start value, locally optimized value) pairs for scatter plots.

    CSV columns: vertices, steps, instance_id, start_id, start_value,
    optimized_value.  The run summary records the per-instance sample
    correlation between the two columns (null when degenerate).
    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    tasks = [(config, ci, inst) for ci in range(len(config.cells)) for inst in range(config.instances)]
    results = _map_tasks(_scatter_task, tasks, threads)

    rows = []
    correlations = []
    for ci, inst, pairs in results:
        vertices, steps = config.cells[ci]
        started = np.array([p[0] for p in pairs])
        optimized = np.array([p[1] for p in pairs])
        for idx, (sv, ov) in enumerate(pairs):
            rows.append([vertices, steps, inst, idx, sv, ov])
        r = None
        if started.std() > 0.0 and optimized.std() > 0.0:
            r = float(np.corrcoef(started, optimized)[0, 1])
        correlations.append(
            {"vertices": vertices, "steps": steps, "instance_id": inst, "correlation": r}
        )

    csv_path = out_dir / "initial_vs_optimized.csv"
    _write_csv(
        csv_path,
        ["vertices", "steps", "instance_id", "start_id", "start_value", "optimized_value"],
        rows,
    )
    summary_path = out_dir / "initial_vs_optimized_summary.json"
    _write_summary(
        summary_path,
        {"config": config_to_dict(config), "instances": correlations},
    )
    return csv_path, summary_path


# --- deviation curves ----------------------------------------------------------


def _deviation_task(args):
    config, ci, inst = args
    bounds, q, f, steps = _instance_for(config, _EXP_DEV, ci, inst)
    if np.any(q < 0.0) or np.any(f < 0.0):
        raise ValueError("deviation curves need nonnegative q and f")
    problem = OptimizationProblem(bounds, q, f, steps, config.sense)
    role = _ROLE_MIN if config.sense is Sense.MIN else _ROLE_MAX
    seed = derive_seed(config.seed, _EXP_DEV, role, ci, inst)
    start_values = np.empty(config.starts)
    optimized_values = np.empty(config.starts)
    for idx in range(config.starts):
        start = random_extremal_schedule(bounds, steps, substream(seed, idx))
        run = local_optimize(problem, start, config.orders[0])
        start_values[idx] = run.start_value
        optimized_values[idx] = run.value

    shuffle = substream(config.seed, _EXP_DEV, _ROLE_SHUFFLE, ci, inst).permutation(config.starts)
    if config.sense is Sense.MIN:
        best = float(optimized_values.min())
        running_opt = np.minimum.accumulate(optimized_values[shuffle])
        running_rand = np.minimum.accumulate(start_values[shuffle])
        dev_opt = (running_opt - best) / best * 100.0
        dev_rand = (running_rand - best) / best * 100.0
    else:
        best = float(optimized_values.max())
        running_opt = np.maximum.accumulate(optimized_values[shuffle])
        running_rand = np.maximum.accumulate(start_values[shuffle])
        dev_opt = (best - running_opt) / best * 100.0
        dev_rand = (best - running_rand) / best * 100.0
    return ci, inst, best, dev_opt, dev_rand


def run_deviation_curves(config: ExperimentConfig, out_dir, threads: int = 1) -> tuple[Path, Path]:
    """Best-so-far relative deviation versus sample size, with and without
    local optimization.

    For each parameter set the starts are replayed in a shuffled order; the
    deviation at sample size m is the gap between the best value among the
    first m starts and the best value over the whole budget, in percent.
    CSV columns: sample_size, avg_rel_dev_optimized, avg_rel_dev_random,
    max_rel_dev_optimized, max_rel_dev_random, aggregated over all parameter
    sets (cells x instances).
    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    tasks = [(config, ci, inst) for ci in range(len(config.cells)) for inst in range(config.instances)]
    results = _map_tasks(_deviation_task, tasks, threads)

    dev_opt = np.vstack([r[3] for r in results])
    dev_rand = np.vstack([r[4] for r in results])
    rows = [
        [
            m + 1,
            float(dev_opt[:, m].mean()),
            float(dev_rand[:, m].mean()),
            float(dev_opt[:, m].max()),
            float(dev_rand[:, m].max()),
        ]
        for m in range(config.starts)
    ]

    csv_path = out_dir / "deviation_curves.csv"
    _write_csv(
        csv_path,
        [
            "sample_size",
            "avg_rel_dev_optimized",
            "avg_rel_dev_random",
            "max_rel_dev_optimized",
            "max_rel_dev_random",
        ],
        rows,
    )
    summary_path = out_dir / "deviation_curves_summary.json"
    _write_summary(
        summary_path,
        {
            "config": config_to_dict(config),
            "parameter_sets": len(results),
            "best_values": [
                {
                    "vertices": config.cells[ci][0],
                    "steps": config.cells[ci][1],
                    "instance_id": inst,
                    "best_value": best,
                }
                for ci, inst, best, _, _ in results
            ],
        },
    )
    return csv_path, summary_path

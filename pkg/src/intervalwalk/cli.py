"""Command line interface: instance tools and experiment runners.

Subcommands: validate | bounds | oracle | gen | exp-count | exp-sweep |
exp-scatter | exp-dev.  Every seeded command writes bit-identical files on
repeated runs.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys
from pathlib import Path

import numpy as np

from .experiments import (
    ExperimentConfig,
    load_config,
    run_deviation_curves,
    run_extrema_count,
    run_initial_vs_optimized,
    run_sweep_comparison,
)
from .generate import GenParams, generate_instance
from .graph import StateSpace, validate
from .instancefile import ProblemInstance, load_instance, save_instance
from .optimize import MultistartReport, Sense, SweepOrder, multistart
from .oracle import BudgetExceededError, exact_bounds


def _fail(message: str, code: int) -> int:
    print(f"error: {message}", file=sys.stderr)
    return code


def _load(path: str) -> ProblemInstance:
    try:
        return load_instance(path)
    except OSError as exc:
        raise ValueError(f"cannot read {path}: {exc}") from exc


def cmd_validate(args) -> int:
    try:
        instance = _load(args.instance)
    except ValueError as exc:
        return _fail(str(exc), 2)
    report = validate(instance.bounds)
    print(report)
    return 0 if report.ok else 1


def _schedule_json(labels, selections):
    return [
        [[labels[x], labels[y], choice.name.lower()] for (x, y), choice in zip(sel.edges, sel.choices)]
        for sel in selections
    ]


def _print_report(labels, sense: Sense, report: MultistartReport) -> None:
    kind = "lower" if sense is Sense.MIN else "upper"
    print(f"{kind} bound: {report.best.value!r}")
    word = "minima" if sense is Sense.MIN else "maxima"
    values = ", ".join(
        f"{value!r} (hits {hits})" for _, value, hits in report.unique_extrema
    )
    print(f"  unique local {word}: {len(report.unique_extrema)} [{values}]")
    for step, sel in enumerate(report.best.selections, start=1):
        parts = (
            ", ".join(
                f"{{{labels[x]},{labels[y]}}}={choice.name.lower()}"
                for (x, y), choice in zip(sel.edges, sel.choices)
            )
            or "(no free edges)"
        )
        print(f"  step {step}: {parts}")


def _report_json(labels, report: MultistartReport) -> dict:
    return {
        "value": report.best.value,
        "schedule": _schedule_json(labels, report.best.selections),
        "unique_extrema": [
            {"value": value, "hits": hits, "schedule": _schedule_json(labels, sels)}
            for sels, value, hits in report.unique_extrema
        ],
    }


def cmd_bounds(args) -> int:
    try:
        instance = _load(args.instance)
    except ValueError as exc:
        return _fail(str(exc), 2)
    report = validate(instance.bounds)
    if not report.ok:
        return _fail(f"instance is not valid:\n{report}", 1)
    if instance.steps < 1:
        return _fail("instance has steps = 0; nothing to optimize", 1)
    order = SweepOrder(args.strategy)
    senses = (Sense.MIN, Sense.MAX) if args.sense == "both" else (Sense(args.sense),)
    labels = instance.states.labels
    results = {}
    for sense in senses:
        rep = multistart(instance.problem(sense), args.starts, args.seed, order)
        _print_report(labels, sense, rep)
        results[sense.value] = _report_json(labels, rep)
    if args.out:
        payload = {
            "starts": args.starts,
            "seed": args.seed,
            "strategy": order.value,
            "steps": instance.steps,
            "results": results,
        }
        Path(args.out).write_text(json.dumps(payload, indent=2) + "\n", encoding="utf-8")
        print(f"wrote {args.out}")
    return 0


def cmd_oracle(args) -> int:
    try:
        instance = _load(args.instance)
    except ValueError as exc:
        return _fail(str(exc), 2)
    report = validate(instance.bounds)
    if not report.ok:
        return _fail(f"instance is not valid:\n{report}", 1)
    try:
        result = exact_bounds(
            instance.bounds, instance.q, instance.f, instance.steps, budget=args.budget
        )
    except BudgetExceededError as exc:
        return _fail(str(exc), 1)
    labels = instance.states.labels
    print(f"exact lower bound: {result.minimum!r} ({len(result.argmin)} optimal schedules)")
    print(f"exact upper bound: {result.maximum!r} ({len(result.argmax)} optimal schedules)")
    if args.out:
        payload = {
            "steps": instance.steps,
            "minimum": result.minimum,
            "maximum": result.maximum,
            "argmin": [_schedule_json(labels, sched) for sched in result.argmin],
            "argmax": [_schedule_json(labels, sched) for sched in result.argmax],
        }
        Path(args.out).write_text(json.dumps(payload, indent=2) + "\n", encoding="utf-8")
        print(f"wrote {args.out}")
    return 0


def cmd_gen(args) -> int:
    params = GenParams(
        s=args.vertices,
        disconnect_fraction=args.disconnect_fraction,
        lower_mean=args.lower_mean,
        width_mean=args.width_mean,
        qf_mean=args.qf_mean,
        marginal_slack=args.marginal_slack,
        seed=args.seed,
    )
    bounds, q, f = generate_instance(params)
    instance = ProblemInstance(StateSpace.of_size(args.vertices), bounds, q, f, args.steps)
    save_instance(args.out, instance)
    pairs = args.vertices * (args.vertices - 1) // 2
    edges = int(np.count_nonzero(bounds.upper) // 2)
    print(f"wrote {args.out}")
    print(
        f"  vertices {args.vertices}, steps {args.steps}, edges {edges}/{pairs} "
        f"(absent fraction {1 - edges / pairs:.3f})"
    )
    print(
        f"  mean lower weight {bounds.free_lower.mean():.4f}, "
        f"mean interval width {(bounds.free_upper - bounds.free_lower).mean():.4f}"
    )
    return 0


def _parse_cells(text: str) -> tuple[tuple[int, int], ...]:
    cells = []
    for part in text.split(","):
        v, _, n = part.strip().partition("x")
        cells.append((int(v), int(n)))
    return tuple(cells)


def _experiment_config(args, base: ExperimentConfig) -> ExperimentConfig:
    config = load_config(args.config) if args.config else base
    overrides = {}
    if args.cells is not None:
        overrides["cells"] = _parse_cells(args.cells)
    if args.instances is not None:
        overrides["instances"] = args.instances
    if args.starts is not None:
        overrides["starts"] = args.starts
    if args.seed is not None:
        overrides["seed"] = args.seed
    if args.sense is not None:
        overrides["sense"] = Sense(args.sense)
    if args.strategy is not None:
        overrides["orders"] = (SweepOrder(args.strategy),)
    return dataclasses.replace(config, **overrides) if overrides else config


def _run_experiment(args, runner, base: ExperimentConfig) -> int:
    try:
        config = _experiment_config(args, base)
    except (ValueError, OSError) as exc:
        return _fail(str(exc), 2)
    csv_path, summary_path = runner(config, args.out, threads=args.threads)
    print(f"wrote {csv_path}")
    print(f"wrote {summary_path}")
    return 0


def cmd_exp_count(args) -> int:
    return _run_experiment(args, run_extrema_count, ExperimentConfig())


def cmd_exp_sweep(args) -> int:
    base = ExperimentConfig(instances=20, starts=100)
    return _run_experiment(args, run_sweep_comparison, base)


def cmd_exp_scatter(args) -> int:
    base = ExperimentConfig(cells=((8, 8),), instances=10, starts=300, sense=Sense.MAX)
    return _run_experiment(args, run_initial_vs_optimized, base)


def cmd_exp_dev(args) -> int:
    base = ExperimentConfig(cells=((8, 8),), instances=30, starts=500)
    return _run_experiment(args, run_deviation_curves, base)


def _add_experiment_args(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--config", help="JSON experiment config file")
    sub.add_argument("--cells", help="grid cells as VERTICESxSTEPS[,...], e.g. 4x2,6x4")
    sub.add_argument("--instances", type=int, help="instances per cell")
    sub.add_argument("--starts", type=int, help="starts per instance")
    sub.add_argument("--seed", type=int, help="master seed")
    sub.add_argument("--sense", choices=["min", "max"], help="optimization sense")
    sub.add_argument(
        "--strategy",
        choices=[o.value for o in SweepOrder],
        help="sweep order for the local optimizer",
    )
    sub.add_argument("--out", default="results", help="output directory")
    sub.add_argument("--threads", type=int, default=1, help="worker processes")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="intervalwalk",
        description="Expectation bounds for random walks on graphs with interval weights.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="check an instance file against the model constraints")
    p.add_argument("instance")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("bounds", help="multistart local optimization bounds")
    p.add_argument("instance")
    p.add_argument("--starts", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument(
        "--strategy",
        choices=[o.value for o in SweepOrder],
        default=SweepOrder.LEFT_TO_RIGHT.value,
    )
    p.add_argument("--sense", choices=["min", "max", "both"], default="both")
    p.add_argument("--out", help="write a machine-readable JSON result record")
    p.set_defaults(func=cmd_bounds)

    p = sub.add_parser("oracle", help="exact bounds by exhaustive enumeration (small instances)")
    p.add_argument("instance")
    p.add_argument("--budget", type=int, default=2**24, help="maximum schedule evaluations")
    p.add_argument("--out", help="write a machine-readable JSON result record")
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("gen", help="generate a random valid instance file")
    p.add_argument("--vertices", type=int, required=True)
    p.add_argument("--steps", type=int, default=2)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.add_argument("--disconnect-fraction", type=float, default=0.25)
    p.add_argument("--lower-mean", type=float, default=0.8)
    p.add_argument("--width-mean", type=float, default=1.0)
    p.add_argument("--qf-mean", type=float, default=1.5)
    p.add_argument("--marginal-slack", type=float, default=0.1)
    p.set_defaults(func=cmd_gen)

    for name, func, blurb in (
        ("exp-count", cmd_exp_count, "census of unique local extrema per instance"),
        ("exp-sweep", cmd_exp_sweep, "left-to-right vs right-to-left sweep comparison"),
        ("exp-scatter", cmd_exp_scatter, "initial vs optimized value pairs"),
        ("exp-dev", cmd_exp_dev, "deviation curves with and without local optimization"),
    ):
        p = sub.add_parser(name, help=blurb)
        _add_experiment_args(p)
        p.set_defaults(func=func)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    raise SystemExit(main())

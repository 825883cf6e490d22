"""Local descent over per-step endpoint choices, and multistart global search.

A schedule of weight functions is improved one step at a time: with all other
steps fixed, the best replacement for step k is the one-step minimizer for
the mass pushed forward to k and the payoff folded backward to k.  Sweeping
the step index until nothing improves yields a local optimum; multistart
repeats the descent from many random extremal schedules and keeps the best
fixed point found.
"""

from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import rng as rngmod
from .chain import Schedule, backward_step, forward_step, transition_matrix
from .graph import (
    TOL,
    EdgeSelection,
    IntervalBounds,
    WeightFunction,
    one_step_minimizer,
    selection_of,
    weight_from_selection,
    weight_matrix_from_mask,
)
from .oracle import BudgetExceededError


class Sense(enum.Enum):
    MIN = "min"
    MAX = "max"


class SweepOrder(enum.Enum):
    LEFT_TO_RIGHT = "left-to-right"
    RIGHT_TO_LEFT = "right-to-left"


@dataclass(frozen=True, eq=False)
class OptimizationProblem:
    """Bound the n-step expectation <q, T_w1 ... T_wn f> over admissible weights."""

    bounds: IntervalBounds
    q: np.ndarray
    f: np.ndarray
    n: int
    sense: Sense = Sense.MIN

    def __post_init__(self):
        q = np.array(self.q, dtype=float)
        f = np.array(self.f, dtype=float)
        s = self.bounds.size
        if q.shape != (s,) or f.shape != (s,):
            raise ValueError(f"q and f must be vectors of length {s}")
        if self.n < 1:
            raise ValueError("need at least one step")
        q.setflags(write=False)
        f.setflags(write=False)
        object.__setattr__(self, "q", q)
        object.__setattr__(self, "f", f)


@dataclass(frozen=True)
class LocalOptimum:
    """A sweep fixed point: no single-step replacement improves the objective.

    `trace` holds the objective at the start and after each accepted
    replacement, in the problem's own sense (so it decreases for MIN runs and
    increases for MAX runs).
    """

    selections: tuple[EdgeSelection, ...]
    value: float
    start_value: float
    sweeps: int
    improvements: int
    trace: tuple[float, ...]

    def schedule(self, bounds: IntervalBounds) -> Schedule:
        """Materialize the optimized weight functions."""
        return tuple(weight_from_selection(bounds, sel) for sel in self.selections)


@dataclass(frozen=True)
class MultistartReport:
    """Aggregate of many local descents: the best fixed point plus a census
    of every distinct one, keyed by its canonical selection schedule."""

    best: LocalOptimum
    unique_extrema: tuple[tuple[tuple[EdgeSelection, ...], float, int], ...]
    starts: int
    seed: int | None

    def distinct_values(self, atol: float = 1e-9) -> tuple[float, ...]:
        """Extremum values clustered at `atol` (distinct selections can tie)."""
        values = sorted(v for _, v, _ in self.unique_extrema)
        out: list[float] = []
        for v in values:
            if not out or v - out[-1] > atol:
                out.append(v)
        return tuple(out)


def improve_at(
    problem: OptimizationProblem, schedule: Sequence[WeightFunction], k: int
) -> tuple[WeightFunction, float]:
    """Best single replacement for step k, all other steps fixed.

    Pushes the initial mass forward through steps before k and folds the
    payoff backward through steps after k, then picks the one-step extremal
    optimizer between them.  Returns the replacement weight function and the
    objective value of the schedule with step k replaced, in the problem's
    sense.  By construction the returned value never loses to the current
    schedule's value.
    """
    schedule = tuple(schedule)
    if len(schedule) != problem.n:
        raise ValueError(f"schedule has {len(schedule)} steps, problem wants {problem.n}")
    if not 0 <= k < problem.n:
        raise IndexError(f"step index {k} out of range for {problem.n} steps")
    bounds = problem.bounds
    f_eff = problem.f if problem.sense is Sense.MIN else -problem.f
    ql = problem.q
    for w in schedule[:k]:
        ql = forward_step(bounds, ql, w)
    fr = f_eff
    for w in reversed(schedule[k + 1 :]):
        fr = backward_step(bounds, w, fr)
    replacement, _ = one_step_minimizer(bounds, ql, fr)
    value = float(ql @ (transition_matrix(bounds, replacement) @ fr))
    return replacement, (value if problem.sense is Sense.MIN else -value)


def _descend(bounds, q, f, mats, masks, order, tol):
    """Sweep single-step replacements until a full pass changes nothing.

    Minimizes <q, P_1 ... P_n f>; callers handle MAX by negating f.  `mats`
    (transition matrices) and `masks` (endpoint masks, None while a step is
    interior) are mutated in place.  Prefix mass / suffix payoff vectors are
    cached per sweep; the sweep direction guarantees the cached side is never
    stale when read.
    """
    n = len(mats)
    marg = bounds.marginal
    marg_col = marg[:, None]
    i_e, j_e = bounds._free_idx
    lo_e = bounds.free_lower
    up_e = bounds.free_upper
    lower_base = bounds.lower

    def candidate(ql, fr):
        h = ql / marg
        g = (h[i_e] - h[j_e]) * (fr[j_e] - fr[i_e])
        mask = g <= 0.0
        m = lower_base.copy()
        chosen = np.where(mask, up_e, lo_e)
        m[i_e, j_e] = chosen
        m[j_e, i_e] = chosen
        np.fill_diagonal(m, marg - m.sum(axis=1))
        return mask, m / marg_col

    def fold_value():
        g = f
        for p in reversed(mats):
            g = p @ g
        return float(q @ g)

    value = fold_value()
    trace = [value]
    sweeps = 0
    improvements = 0

    while True:
        sweeps += 1
        changed = False
        if order is SweepOrder.LEFT_TO_RIGHT:
            suffix = [f] * (n + 1)
            for k in range(n - 1, -1, -1):
                suffix[k] = mats[k] @ suffix[k + 1]
            ql = q
            for k in range(n):
                fr = suffix[k + 1]
                mask, mat = candidate(ql, fr)
                v_new = float(ql @ (mat @ fr))
                threshold = tol * max(1.0, abs(value))
                if v_new < value - threshold:
                    mats[k], masks[k] = mat, mask
                    value = v_new
                    trace.append(value)
                    improvements += 1
                    changed = True
                elif masks[k] is None and v_new <= value + threshold:
                    # pin an interior step to its equal-value extremal form
                    mats[k], masks[k] = mat, mask
                    value = v_new
                    changed = True
                ql = ql @ mats[k]
        else:
            prefix = [q] * (n + 1)
            for k in range(n):
                prefix[k + 1] = prefix[k] @ mats[k]
            fr = f
            for k in range(n - 1, -1, -1):
                ql = prefix[k]
                mask, mat = candidate(ql, fr)
                v_new = float(ql @ (mat @ fr))
                threshold = tol * max(1.0, abs(value))
                if v_new < value - threshold:
                    mats[k], masks[k] = mat, mask
                    value = v_new
                    trace.append(value)
                    improvements += 1
                    changed = True
                elif masks[k] is None and v_new <= value + threshold:
                    mats[k], masks[k] = mat, mask
                    value = v_new
                    changed = True
                fr = mats[k] @ fr
        if not changed:
            break

    return fold_value(), trace, sweeps, improvements


def _finish(problem, masks, value, trace, sweeps, improvements) -> LocalOptimum:
    bounds = problem.bounds
    for k, mask in enumerate(masks):
        if mask is None:
            raise RuntimeError(f"step {k} could not be pinned to an extremal function")
    selections = tuple(EdgeSelection.from_upper_mask(bounds, m) for m in masks)
    if problem.sense is Sense.MAX:
        value = -value
        trace = [-v for v in trace]
    return LocalOptimum(selections, value, trace[0], sweeps, improvements, tuple(trace))


def local_optimize(
    problem: OptimizationProblem,
    start: Sequence[WeightFunction],
    order: SweepOrder = SweepOrder.LEFT_TO_RIGHT,
    tol: float = TOL,
) -> LocalOptimum:
    """Run replacement sweeps from `start` until a fixed point is reached.

    A replacement is accepted only when it beats the current objective by
    more than tol * max(1, |value|), which rules out cycling among equal
    extremal schedules and forces termination.  Interior (non-extremal) start
    steps are pinned to an extremal function of no worse value on first
    visit, so the result is always a schedule of extremal weight functions.
    """
    start = tuple(start)
    if len(start) != problem.n:
        raise ValueError(f"start has {len(start)} steps, problem wants {problem.n}")
    bounds = problem.bounds
    f_eff = problem.f if problem.sense is Sense.MIN else -problem.f
    mats = [transition_matrix(bounds, w) for w in start]
    masks = []
    for w in start:
        sel = selection_of(bounds, w)
        masks.append(None if sel is None else sel.upper_mask())
    value, trace, sweeps, improvements = _descend(
        bounds, problem.q, f_eff, mats, masks, order, tol
    )
    return _finish(problem, masks, value, trace, sweeps, improvements)


def _optimize_from_masks(problem, start_masks, order, tol) -> LocalOptimum:
    """Descent starting from per-step endpoint masks (fast path, no
    WeightFunction materialization)."""
    bounds = problem.bounds
    f_eff = problem.f if problem.sense is Sense.MIN else -problem.f
    marg_col = bounds.marginal[:, None]
    mats = [weight_matrix_from_mask(bounds, m) / marg_col for m in start_masks]
    masks = [np.array(m, dtype=bool) for m in start_masks]
    value, trace, sweeps, improvements = _descend(
        bounds, problem.q, f_eff, mats, masks, order, tol
    )
    return _finish(problem, masks, value, trace, sweeps, improvements)


def _random_upper_masks(bounds: IntervalBounds, n: int, rng: np.random.Generator) -> np.ndarray:
    """Endpoint masks of n random extremal weight functions.

    Each step draws two uniform random state rankings and takes the sign of
    the edge gradient they induce, which covers exactly the selections a
    one-step optimization could ever produce.
    """
    i, j = bounds._free_idx
    masks = np.empty((n, len(i)), dtype=bool)
    s = bounds.size
    for t in range(n):
        h = rng.permutation(s).astype(float)
        f = rng.permutation(s).astype(float)
        masks[t] = (h[i] - h[j]) * (f[j] - f[i]) <= 0.0
    return masks


def random_extremal_schedule(
    bounds: IntervalBounds, n: int, seed: int | np.random.Generator
) -> Schedule:
    """A schedule of n independently sampled random extremal weight functions.

    Deterministic for an integer seed; pass a Generator to draw from an
    existing stream.
    """
    rng = seed if isinstance(seed, np.random.Generator) else rngmod.substream(seed)
    masks = _random_upper_masks(bounds, n, rng)
    return tuple(
        weight_from_selection(bounds, EdgeSelection.from_upper_mask(bounds, m)) for m in masks
    )


def selection_sort_key(selections: Sequence[EdgeSelection]) -> tuple:
    """Canonical ordering key for a per-step selection schedule."""
    return tuple(tuple(int(c) for c in sel.choices) for sel in selections)


def _aggregate(runs, starts, seed, sense) -> MultistartReport:
    census: dict[tuple, tuple[LocalOptimum, int]] = {}
    for run in runs:
        key = run.selections
        if key in census:
            first, hits = census[key]
            census[key] = (first, hits + 1)
        else:
            census[key] = (run, 1)
    reverse = sense is Sense.MAX
    ordered = sorted(
        census.items(),
        key=lambda item: (
            -item[1][0].value if reverse else item[1][0].value,
            selection_sort_key(item[0]),
        ),
    )
    unique = tuple((key, run.value, hits) for key, (run, hits) in ordered)
    best = ordered[0][1][0]
    return MultistartReport(best, unique, starts, seed)


def multistart(
    problem: OptimizationProblem,
    starts: int,
    seed: int,
    order: SweepOrder = SweepOrder.LEFT_TO_RIGHT,
    tol: float = TOL,
) -> MultistartReport:
    """Local descent from `starts` random extremal schedules.

    Each start draws from its own substream keyed by (seed, start index), so
    the report is reproducible and independent of how the runs are executed.
    """
    if starts < 1:
        raise ValueError("need at least one start")
    runs = []
    for idx in range(starts):
        stream = rngmod.substream(seed, idx)
        masks = _random_upper_masks(problem.bounds, problem.n, stream)
        runs.append(_optimize_from_masks(problem, masks, order, tol))
    return _aggregate(runs, starts, seed, problem.sense)


def multistart_exhaustive(
    problem: OptimizationProblem,
    order: SweepOrder = SweepOrder.LEFT_TO_RIGHT,
    tol: float = TOL,
    budget: int = 2**16,
) -> MultistartReport:
    """Local descent from every extremal schedule.

    Because each global optimum is itself a start and descent never worsens a
    start, the best fixed point equals the exact global optimum; useful as a
    cross-check against the enumeration oracle on small instances.
    """
    e = len(problem.bounds.free_edges)
    total = (1 << e) ** problem.n
    if total > budget:
        raise BudgetExceededError(
            f"exhaustive multistart over {e} free edges and {problem.n} steps needs "
            f"{total} starts, over the budget of {budget}"
        )
    per_step = [np.array(bits, dtype=bool) for bits in itertools.product((False, True), repeat=e)]
    runs = []
    for combo in itertools.product(per_step, repeat=problem.n):
        runs.append(_optimize_from_masks(problem, list(combo), order, tol))
    return _aggregate(runs, total, None, problem.sense)

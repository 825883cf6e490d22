"""Exact expectation bounds on small instances by exhaustive enumeration.

Optima over admissible weight schedules are always attained at per-step
extremal weight functions, so enumerating the 2^e endpoint selections per
step (e = number of free edges) and folding every combination gives ground
truth.  The enumeration refuses instead of approximating when the requested
work exceeds its budget.
"""

from __future__ import annotations

import itertools
from typing import NamedTuple

import numpy as np

from .graph import EdgeChoice, EdgeSelection, IntervalBounds, WeightFunction, weight_from_selection

#: Absolute tolerance for collecting all schedules tied with an optimum.
ARGOPT_ATOL = 1e-12


class BudgetExceededError(RuntimeError):
    """Raised instead of returning an approximate answer when an exact
    enumeration would exceed its budget."""


class ExactBounds(NamedTuple):
    minimum: float
    maximum: float
    argmin: tuple[tuple[EdgeSelection, ...], ...]
    argmax: tuple[tuple[EdgeSelection, ...], ...]


def enumerate_extremal(
    bounds: IntervalBounds, cap: int = 20
) -> list[tuple[EdgeSelection, WeightFunction]]:
    """All 2^e extremal weight functions, in lexicographic selection order
    (LOWER before UPPER, first edge most significant)."""
    e = len(bounds.free_edges)
    if e > cap:
        raise BudgetExceededError(
            f"{e} free edges would enumerate 2^{e} extremal functions, over the cap of 2^{cap}"
        )
    out = []
    for bits in itertools.product((EdgeChoice.LOWER, EdgeChoice.UPPER), repeat=e):
        selection = EdgeSelection(bounds.free_edges, bits)
        out.append((selection, weight_from_selection(bounds, selection)))
    return out


def _transition_stack(bounds: IntervalBounds) -> np.ndarray:
    """Transition matrices of all 2^e extremal weight functions, stacked in
    lexicographic selection order."""
    i, j = bounds._free_idx
    e = len(i)
    s = bounds.size
    m = 1 << e
    shifts = np.arange(e - 1, -1, -1, dtype=np.uint64)
    bits = ((np.arange(m, dtype=np.uint64)[:, None] >> shifts[None, :]) & 1).astype(bool)
    mats = np.broadcast_to(bounds.lower, (m, s, s)).copy()
    chosen = np.where(bits, bounds.free_upper[None, :], bounds.free_lower[None, :])
    mats[:, i, j] = chosen
    mats[:, j, i] = chosen
    diag = np.arange(s)
    mats[:, diag, diag] = bounds.marginal[None, :] - mats.sum(axis=2)
    return mats / bounds.marginal[None, :, None]


class _ArgTracker:
    """Running optimum plus every schedule within ARGOPT_ATOL of it."""

    def __init__(self, sign: float):
        self.sign = sign  # +1 tracks a minimum, -1 a maximum
        self.best = np.inf
        self.entries: list[tuple[float, tuple[int, ...]]] = []

    def offer(self, values: np.ndarray, prefix: tuple[int, ...]) -> None:
        vals = self.sign * values
        low = float(vals.min())
        if low < self.best:
            self.best = low
            self.entries = [(v, p) for v, p in self.entries if v <= self.best + ARGOPT_ATOL]
        for k in np.flatnonzero(vals <= self.best + ARGOPT_ATOL):
            self.entries.append((float(vals[k]), prefix + (int(k),)))

    def result(self) -> tuple[float, tuple[tuple[int, ...], ...]]:
        kept = sorted(p for v, p in self.entries if v <= self.best + ARGOPT_ATOL)
        return self.sign * self.best, tuple(kept)


def exact_bounds(
    bounds: IntervalBounds, q, f, n: int, budget: int = 2**24, cap: int = 20
) -> ExactBounds:
    """Exact minimum and maximum of the n-step expectation over extremal
    schedules, with every optimal schedule within 1e-12 of the optimum.

    Refuses (BudgetExceededError) when the (2^e)^n schedule evaluations would
    exceed `budget`, or when 2^e extremal functions exceed 2^`cap`.
    """
    if n < 0:
        raise ValueError("step count must be nonnegative")
    q = np.asarray(q, dtype=float)
    f = np.asarray(f, dtype=float)
    e = len(bounds.free_edges)
    if e > cap:
        raise BudgetExceededError(
            f"{e} free edges would enumerate 2^{e} extremal functions, over the cap of 2^{cap}"
        )
    total = (1 << e) ** n
    if total > budget:
        raise BudgetExceededError(
            f"enumerating {n} steps over {e} free edges needs (2^{e})^{n} = {total} "
            f"evaluations, over the budget of {budget}"
        )
    if n == 0:
        value = float(q @ f)
        return ExactBounds(value, value, ((),), ((),))

    stack = _transition_stack(bounds)
    m = stack.shape[0]
    mins = _ArgTracker(+1.0)
    maxs = _ArgTracker(-1.0)

    def explore(depth: int, ql: np.ndarray, prefix: tuple[int, ...]) -> None:
        pushed = np.einsum("x,mxy->my", ql, stack)
        if depth == n - 1:
            values = pushed @ f
            mins.offer(values, prefix)
            maxs.offer(values, prefix)
        else:
            for k in range(m):
                explore(depth + 1, pushed[k], prefix + (k,))

    explore(0, q, ())

    selections: dict[int, EdgeSelection] = {}

    def schedule_of(prefix: tuple[int, ...]) -> tuple[EdgeSelection, ...]:
        out = []
        for k in prefix:
            if k not in selections:
                bits = tuple(
                    EdgeChoice.UPPER if (k >> (e - 1 - b)) & 1 else EdgeChoice.LOWER
                    for b in range(e)
                )
                selections[k] = EdgeSelection(bounds.free_edges, bits)
            out.append(selections[k])
        return tuple(out)

    minimum, argmin = mins.result()
    maximum, argmax = maxs.result()
    return ExactBounds(
        minimum,
        maximum,
        tuple(schedule_of(p) for p in argmin),
        tuple(schedule_of(p) for p in argmax),
    )

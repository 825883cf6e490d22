"""Shared fixtures and hypothesis strategies for the test suite."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from intervalwalk import (
    EdgeChoice,
    EdgeSelection,
    IntervalBounds,
    WeightFunction,
    weight_from_selection,
)

settings.register_profile(
    "suite",
    derandomize=True,
    max_examples=60,
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("suite")


@dataclass(frozen=True)
class TwoStateExample:
    """The worked two-state instance: one free edge, q = (1, 0), f = (0, 1).

    `w_up` picks the upper endpoint 0.9 (matrix [[0.1, 0.9], [0.9, 0.1]]),
    `w_lo` the lower endpoint 0.2 (matrix [[0.8, 0.2], [0.2, 0.8]]).  Known
    two-step values: 0.18 from (w_up, w_up), 0.32 from (w_lo, w_lo), 0.74
    from either mixed schedule.
    """

    bounds: IntervalBounds
    q: np.ndarray
    f: np.ndarray
    w_up: WeightFunction
    w_lo: WeightFunction


@pytest.fixture
def two_state() -> TwoStateExample:
    bounds = IntervalBounds(
        lower=[[0.0, 0.2], [0.2, 0.0]],
        upper=[[0.0, 0.9], [0.9, 0.0]],
        marginal=[1.0, 1.0],
    )
    w_up = weight_from_selection(bounds, EdgeSelection(bounds.free_edges, (EdgeChoice.UPPER,)))
    w_lo = weight_from_selection(bounds, EdgeSelection(bounds.free_edges, (EdgeChoice.LOWER,)))
    return TwoStateExample(bounds, np.array([1.0, 0.0]), np.array([0.0, 1.0]), w_up, w_lo)


@st.composite
def interval_bounds(draw, max_states: int = 6, degenerate_edges: bool = True) -> IntervalBounds:
    """Valid interval bounds on a connected random graph.

    Connectivity comes from a random spanning tree; extra edges are optional.
    Some edges may be degenerate (lower == upper) when `degenerate_edges`.
    """
    s = draw(st.integers(2, max_states))
    edges = set()
    for i in range(1, s):
        edges.add((draw(st.integers(0, i - 1)), i))
    for i in range(s):
        for j in range(i + 1, s):
            if (i, j) not in edges and draw(st.booleans()):
                edges.add((i, j))
    lower = np.zeros((s, s))
    upper = np.zeros((s, s))
    for i, j in sorted(edges):
        lo = draw(st.floats(0.05, 2.0))
        if degenerate_edges and draw(st.integers(0, 3)) == 0:
            width = 0.0
        else:
            width = draw(st.floats(0.01, 1.5))
        lower[i, j] = lower[j, i] = lo
        upper[i, j] = upper[j, i] = lo + width
    slack = draw(st.floats(0.01, 0.5))
    marginal = (1.0 + slack) * upper.sum(axis=1)
    return IntervalBounds(lower, upper, marginal)


@st.composite
def bounds_q_f(draw, max_states: int = 6, nonnegative: bool = False):
    """A valid instance together with q and f vectors."""
    bounds = draw(interval_bounds(max_states=max_states))
    low = 0.0 if nonnegative else -4.0
    values = st.floats(low, 4.0)
    q = np.array(draw(st.lists(values, min_size=bounds.size, max_size=bounds.size)))
    f = np.array(draw(st.lists(values, min_size=bounds.size, max_size=bounds.size)))
    return bounds, q, f


@st.composite
def edge_selections(draw, bounds: IntervalBounds) -> EdgeSelection:
    choices = tuple(
        EdgeChoice.UPPER if draw(st.booleans()) else EdgeChoice.LOWER
        for _ in bounds.free_edges
    )
    return EdgeSelection(bounds.free_edges, choices)


def random_weight(bounds: IntervalBounds, rng: np.random.Generator) -> WeightFunction:
    """A uniformly sampled admissible weight function (not extremal in general)."""
    offdiag = bounds.lower.copy()
    i, j = np.triu_indices(bounds.size, k=1)
    u = rng.random(len(i))
    vals = bounds.lower[i, j] + u * (bounds.upper[i, j] - bounds.lower[i, j])
    offdiag[i, j] = vals
    offdiag[j, i] = vals
    loop = bounds.marginal - offdiag.sum(axis=1)
    return WeightFunction(offdiag, loop)

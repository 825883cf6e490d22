"""Local descent sweeps, random extremal schedules, and multistart search."""

import numpy as np
import pytest

from conftest import random_weight
from intervalwalk import (
    EdgeChoice,
    GenParams,
    OptimizationProblem,
    Sense,
    SweepOrder,
    close,
    expectation,
    generate_instance,
    improve_at,
    local_optimize,
    multistart,
    multistart_exhaustive,
    random_extremal_schedule,
    selection_of,
)
from intervalwalk.oracle import BudgetExceededError


def two_state_problem(two_state, sense=Sense.MIN, n=2):
    return OptimizationProblem(two_state.bounds, two_state.q, two_state.f, n, sense)


def naive_local_optimize(problem, start, order, tol=1e-12):
    """Reference sweep built only from the public single-step operations."""
    schedule = list(start)
    value = expectation(problem.bounds, problem.q, schedule, problem.f)
    better = (lambda new, cur, thr: new < cur - thr) if problem.sense is Sense.MIN else (
        lambda new, cur, thr: new > cur + thr
    )
    indices = range(problem.n) if order is SweepOrder.LEFT_TO_RIGHT else range(
        problem.n - 1, -1, -1
    )
    while True:
        changed = False
        for k in indices:
            replacement, new_value = improve_at(problem, schedule, k)
            if better(new_value, value, tol * max(1.0, abs(value))):
                schedule[k] = replacement
                value = new_value
                changed = True
        if not changed:
            return tuple(schedule), value


class TestImproveAt:
    def test_flips_first_step_to_match_suffix(self, two_state):
        problem = two_state_problem(two_state)
        replacement, value = improve_at(problem, (two_state.w_up, two_state.w_lo), 0)
        assert replacement.matrix[0, 1] == pytest.approx(0.2)
        assert value == pytest.approx(0.32, abs=1e-12)

    def test_keeps_optimal_step(self, two_state):
        problem = two_state_problem(two_state)
        replacement, value = improve_at(problem, (two_state.w_up, two_state.w_up), 0)
        assert replacement.matrix[0, 1] == pytest.approx(0.9)
        assert value == pytest.approx(0.18, abs=1e-12)

    def test_second_step_stays(self, two_state):
        problem = two_state_problem(two_state)
        replacement, value = improve_at(problem, (two_state.w_lo, two_state.w_lo), 1)
        assert replacement.matrix[0, 1] == pytest.approx(0.2)
        assert value == pytest.approx(0.32, abs=1e-12)

    def test_index_out_of_range(self, two_state):
        problem = two_state_problem(two_state)
        with pytest.raises(IndexError):
            improve_at(problem, (two_state.w_up, two_state.w_up), 2)

    def test_never_worsens(self):
        rng = np.random.default_rng(17)
        for seed in range(20):
            bounds, q, f = generate_instance(GenParams(s=4, seed=seed))
            n = int(rng.integers(1, 4))
            for sense in (Sense.MIN, Sense.MAX):
                problem = OptimizationProblem(bounds, q, f, n, sense)
                schedule = random_extremal_schedule(bounds, n, int(rng.integers(1 << 30)))
                value = expectation(bounds, q, schedule, f)
                for k in range(n):
                    _, new_value = improve_at(problem, schedule, k)
                    if sense is Sense.MIN:
                        assert new_value <= value + 1e-12 * max(1.0, abs(value))
                    else:
                        assert new_value >= value - 1e-12 * max(1.0, abs(value))


class TestLocalOptimize:
    def test_pure_upper_start_is_already_optimal(self, two_state):
        problem = two_state_problem(two_state)
        result = local_optimize(problem, (two_state.w_up, two_state.w_up))
        assert result.value == pytest.approx(0.18, abs=1e-12)
        assert result.improvements == 0
        assert result.trace == (result.start_value,)

    def test_pure_lower_start_is_a_local_minimum(self, two_state):
        problem = two_state_problem(two_state)
        result = local_optimize(problem, (two_state.w_lo, two_state.w_lo))
        assert result.value == pytest.approx(0.32, abs=1e-12)
        assert result.improvements == 0

    def test_mixed_start_left_to_right(self, two_state):
        problem = two_state_problem(two_state)
        result = local_optimize(problem, (two_state.w_up, two_state.w_lo))
        assert result.value == pytest.approx(0.32, abs=1e-12)
        assert [c for sel in result.selections for c in sel.choices] == [
            EdgeChoice.LOWER,
            EdgeChoice.LOWER,
        ]
        assert result.start_value == pytest.approx(0.74, abs=1e-12)

    def test_mixed_start_right_to_left_finds_other_basin(self, two_state):
        problem = two_state_problem(two_state)
        result = local_optimize(problem, (two_state.w_up, two_state.w_lo), SweepOrder.RIGHT_TO_LEFT)
        assert result.value == pytest.approx(0.18, abs=1e-12)

    def test_wrong_length_start_rejected(self, two_state):
        problem = two_state_problem(two_state)
        with pytest.raises(ValueError):
            local_optimize(problem, (two_state.w_up,))

    def test_matches_naive_reference_sweep(self):
        rng = np.random.default_rng(23)
        for seed in range(15):
            bounds, q, f = generate_instance(GenParams(s=4, seed=100 + seed))
            n = int(rng.integers(1, 5))
            sense = Sense.MIN if seed % 2 else Sense.MAX
            problem = OptimizationProblem(bounds, q, f, n, sense)
            start = random_extremal_schedule(bounds, n, seed)
            for order in SweepOrder:
                mine = local_optimize(problem, start, order)
                ref_schedule, ref_value = naive_local_optimize(problem, start, order)
                assert close(mine.value, ref_value)
                assert mine.selections == tuple(
                    selection_of(bounds, w) for w in ref_schedule
                )

    def test_fixed_point_and_monotone_trace(self):
        rng = np.random.default_rng(29)
        for seed in range(25):
            bounds, q, f = generate_instance(GenParams(s=int(rng.integers(3, 6)), seed=seed))
            n = int(rng.integers(1, 5))
            sense = Sense.MIN if seed % 2 else Sense.MAX
            problem = OptimizationProblem(bounds, q, f, n, sense)
            start = random_extremal_schedule(bounds, n, 1000 + seed)
            for order in SweepOrder:
                result = local_optimize(problem, start, order)
                diffs = np.diff(result.trace)
                assert np.all(diffs < 0) if sense is Sense.MIN else np.all(diffs > 0)
                assert close(
                    result.value,
                    expectation(bounds, q, result.schedule(bounds), f),
                )
                for k in range(n):
                    _, candidate = improve_at(problem, result.schedule(bounds), k)
                    gap = result.value - candidate if sense is Sense.MIN else candidate - result.value
                    assert gap <= 1e-12 * max(1.0, abs(result.value))
                for sel in result.selections:
                    assert sel is not None and len(sel) == len(bounds.free_edges)
                assert 1 <= result.sweeps <= 2 ** (len(bounds.free_edges) * n)

    def test_interior_start_is_pinned_to_extremal(self, two_state):
        problem = two_state_problem(two_state)
        rng = np.random.default_rng(31)
        start = (random_weight(two_state.bounds, rng), random_weight(two_state.bounds, rng))
        assert selection_of(two_state.bounds, start[0]) is None
        result = local_optimize(problem, start)
        assert len(result.selections) == 2
        assert result.value <= result.start_value + 1e-12


class TestRandomExtremalSchedule:
    def test_steps_live_on_the_two_candidates(self, two_state):
        schedule = random_extremal_schedule(two_state.bounds, 8, 5)
        for w in schedule:
            assert w.matrix[0, 1] in (pytest.approx(0.2), pytest.approx(0.9))

    def test_deterministic_given_seed(self, two_state):
        a = random_extremal_schedule(two_state.bounds, 5, 123)
        b = random_extremal_schedule(two_state.bounds, 5, 123)
        for wa, wb in zip(a, b):
            np.testing.assert_array_equal(wa.matrix, wb.matrix)

    def test_all_steps_are_admissible_and_extremal(self):
        bounds, _, _ = generate_instance(GenParams(s=6, seed=2))
        schedule = random_extremal_schedule(bounds, 6, 9)
        for w in schedule:
            np.testing.assert_allclose(w.row_sums, bounds.marginal, rtol=1e-12)
            assert np.all(w.loop >= 0)
            assert selection_of(bounds, w) is not None


class TestMultistart:
    def test_two_state_min_finds_both_basins(self, two_state):
        problem = two_state_problem(two_state)
        report = multistart(problem, 32, seed=0)
        assert report.best.value == pytest.approx(0.18, abs=1e-12)
        values = report.distinct_values()
        assert len(values) == 2
        assert values[0] == pytest.approx(0.18, abs=1e-12)
        assert values[1] == pytest.approx(0.32, abs=1e-12)

    def test_two_state_max(self, two_state):
        problem = two_state_problem(two_state, Sense.MAX)
        report = multistart(problem, 32, seed=0)
        assert report.best.value == pytest.approx(0.74, abs=1e-12)

    def test_deterministic_and_consistent(self, two_state):
        problem = two_state_problem(two_state)
        a = multistart(problem, 25, seed=42)
        b = multistart(problem, 25, seed=42)
        assert a == b
        assert sum(hits for _, _, hits in a.unique_extrema) == 25
        assert a.best.value == min(value for _, value, _ in a.unique_extrema)

    def test_best_never_worse_than_any_start(self, two_state):
        problem = two_state_problem(two_state)
        report = multistart(problem, 16, seed=3)
        assert report.best.value <= 0.18 + 1e-12

    def test_rejects_zero_starts(self, two_state):
        with pytest.raises(ValueError):
            multistart(two_state_problem(two_state), 0, seed=0)


class TestMultistartExhaustive:
    def test_two_state_enumerates_four_starts(self, two_state):
        problem = two_state_problem(two_state)
        report = multistart_exhaustive(problem)
        assert report.starts == 4
        assert report.seed is None
        assert report.best.value == pytest.approx(0.18, abs=1e-12)
        assert report.distinct_values() == pytest.approx((0.18, 0.32), abs=1e-12)

    def test_budget_refusal(self):
        bounds, q, f = generate_instance(GenParams(s=6, seed=0))
        problem = OptimizationProblem(bounds, q, f, 4)
        with pytest.raises(BudgetExceededError):
            multistart_exhaustive(problem, budget=2**10)

    def test_matches_oracle_on_small_instances(self):
        from intervalwalk import exact_bounds

        for seed in range(8):
            bounds, q, f = generate_instance(GenParams(s=3, seed=seed))
            n = 1 + seed % 3
            res = exact_bounds(bounds, q, f, n)
            lo = multistart_exhaustive(OptimizationProblem(bounds, q, f, n, Sense.MIN))
            hi = multistart_exhaustive(OptimizationProblem(bounds, q, f, n, Sense.MAX))
            assert close(lo.best.value, res.minimum)
            assert close(hi.best.value, res.maximum)


class TestMaxIsMinOfNegated:
    def test_reduction_identity(self):
        for seed in range(6):
            bounds, q, f = generate_instance(GenParams(s=4, seed=seed))
            pmax = OptimizationProblem(bounds, q, f, 2, Sense.MAX)
            pneg = OptimizationProblem(bounds, q, -f, 2, Sense.MIN)
            a = multistart(pmax, 20, seed=7)
            b = multistart(pneg, 20, seed=7)
            assert close(a.best.value, -b.best.value)

"""Oracle tests: enumerations against reverse-order enumerations and
closed forms, grid-path behavior, finite differences, isometry bounds."""

import itertools
import math

import numpy as np
import pytest

from conftest import random_problem
from ntk.errors import ContractViolationError, EnumerationBudgetError
from ntk.oracles import (brute_force_binary_ot, brute_force_lp_min,
                         estimate_ric, exhaustive_ric, finite_diff_grad,
                         grid_min_g_alpha)
from ntk.regularizers import Regularizer, eval_g_alpha
from ntk.thresholding import bottom_k_indices


def reverse_order_ot(a, y, u, k):
    """Same exhaustive minimization, enumerated in reverse lexicographic
    order (tie-breaking may differ; the value may not)."""
    n = len(u)
    scaled = a * u
    best = math.inf
    for combo in reversed(list(itertools.combinations(range(n), k))):
        r = y - scaled[:, combo].sum(axis=1)
        best = min(best, float(r @ r))
    return best


class TestBinaryOt:
    def test_exact_fit(self):
        res = brute_force_binary_ot(np.eye(3), [1.0, 0.0, 0.0],
                                    [1.0, 1.0, 1.0], 1)
        np.testing.assert_array_equal(res.argmin, [0])
        assert res.value == 0.0
        assert res.candidates_examined == 3

    def test_zero_u_returns_first_support(self):
        y = np.array([1.0, 2.0])
        res = brute_force_binary_ot(np.eye(2), y, [0.0, 0.0], 1)
        np.testing.assert_array_equal(res.argmin, [0])
        assert res.value == pytest.approx(float(y @ y))

    def test_matches_reverse_enumeration(self):
        rng = np.random.default_rng(70)
        for _ in range(20):
            a, y, u, _ = random_problem(rng, 5, 10, 3)
            forward = brute_force_binary_ot(a, y, u, 3)
            assert forward.value == pytest.approx(
                reverse_order_ot(a, y, u, 3), rel=1e-12)

    def test_budget_guard_names_bound(self):
        with pytest.raises(EnumerationBudgetError, match="1000000"):
            brute_force_binary_ot(np.zeros((2, 40)), np.zeros(2),
                                  np.zeros(40), 20)


class TestLpMin:
    def test_two_smallest(self):
        res = brute_force_lp_min([3.0, 1.0, 2.0], 2)
        np.testing.assert_array_equal(res.argmin, [1, 2])
        assert res.value == 3.0

    def test_distinct_entries_match_selection(self):
        rng = np.random.default_rng(71)
        for _ in range(100):
            n = int(rng.integers(2, 12))
            k = int(rng.integers(1, n + 1))
            c = rng.standard_normal(n)
            res = brute_force_lp_min(c, k)
            np.testing.assert_array_equal(res.argmin, bottom_k_indices(c, k))

    def test_tie_rule(self):
        res = brute_force_lp_min([1.0, 1.0], 1)
        np.testing.assert_array_equal(res.argmin, [0])
        res = brute_force_lp_min([0.5, 2.0, 0.5, 0.5], 2)
        np.testing.assert_array_equal(res.argmin, [0, 2])

    def test_value_is_sum_of_k_smallest(self):
        rng = np.random.default_rng(72)
        for _ in range(50):
            c = rng.standard_normal(9)
            res = brute_force_lp_min(c, 4)
            assert res.value == math.fsum(sorted(c.tolist())[:4])


class TestGridOracle:
    def test_huge_alpha_forces_binary(self):
        rng = np.random.default_rng(73)
        a, y, u, _ = random_problem(rng, 4, 5, 2)
        res = grid_min_g_alpha(a, y, u, 2, 1e9, Regularizer("quad"), 0.1)
        offsets = np.abs(res.argmin - np.round(res.argmin))
        assert offsets.max() <= 0.1

    def test_small_alpha_identity_fit(self):
        # With identity sensing, unit u, and a target already on the grid
        # with level sum k, the grid minimizer at tiny alpha is the
        # per-coordinate clamp of y itself.
        n, k = 4, 2
        y = np.array([0.9, 0.1, 0.7, 0.3])
        u = np.ones(n)
        res = grid_min_g_alpha(np.eye(n), y, u, k, 1e-9, Regularizer("quad"), 0.1)
        np.testing.assert_allclose(res.argmin, y, atol=1e-12)

    def test_alpha_path_monotonicity(self):
        rng = np.random.default_rng(74)
        n, k, step = 5, 2, 0.1
        a, y, u, _ = random_problem(rng, 4, n, k)
        reg = Regularizer("quad")
        slack = 2 * step * n
        phis, fs = [], []
        for alpha in (1.0, 10.0, 100.0, 1000.0):
            res = grid_min_g_alpha(a, y, u, k, alpha, reg, step)
            residual = y - a @ (u * res.argmin)
            f = float(residual @ residual)
            fs.append(f)
            phis.append((res.value - f) / alpha)
        assert all(phis[i + 1] <= phis[i] + slack for i in range(3))
        assert all(fs[i + 1] >= fs[i] - slack for i in range(3))

    def test_guards(self):
        with pytest.raises(EnumerationBudgetError):
            grid_min_g_alpha(np.zeros((3, 7)), np.zeros(3), np.zeros(7), 2,
                             1.0, Regularizer("quad"), 0.1)
        with pytest.raises(ContractViolationError):
            grid_min_g_alpha(np.eye(4), np.zeros(4), np.ones(4), 2,
                             1.0, Regularizer("quad"), 0.2)


class TestFiniteDifferences:
    def test_linear_exact(self):
        c = np.array([1.5, -2.0, 0.25])
        got = finite_diff_grad(lambda w: float(c @ w), np.array([0.1, 0.2, 0.3]),
                               1e-6)
        assert np.abs(got - c).max() <= 1e-10

    def test_quadratic_exact(self):
        rng = np.random.default_rng(75)
        q = rng.standard_normal((4, 4))
        w = rng.standard_normal(4)
        got = finite_diff_grad(lambda p: float(p @ q @ p), w, 1e-5)
        want = (q + q.T) @ w
        assert np.abs(got - want).max() <= 1e-6

    def test_objective_cross_check(self):
        rng = np.random.default_rng(76)
        a, y, u, _ = random_problem(rng, 5, 9, 3)
        w = rng.uniform(0.1, 0.9, size=9)
        reg = Regularizer("log")
        got = finite_diff_grad(
            lambda p: eval_g_alpha(a, y, u, p, 2.0, reg).g_value, w, 1e-6)
        want = eval_g_alpha(a, y, u, w, 2.0, reg).gradient
        assert np.linalg.norm(got - want) <= 1e-5 * max(1.0, np.linalg.norm(want))


class TestRicEstimates:
    def test_orthonormal_defect_vanishes(self):
        rng = np.random.default_rng(77)
        q, _ = np.linalg.qr(rng.standard_normal((10, 10)))
        assert estimate_ric(q, 3, samples=50, seed=1).delta_lower <= 1e-12

    def test_order_one_unit_columns(self):
        rng = np.random.default_rng(78)
        a = rng.standard_normal((8, 12))
        a /= np.linalg.norm(a, axis=0)
        assert estimate_ric(a, 1, samples=100, seed=2).delta_lower <= 1e-12

    def test_sampled_below_exhaustive(self):
        rng = np.random.default_rng(79)
        for trial in range(20):
            a = rng.standard_normal((8, 11))
            a /= np.linalg.norm(a, axis=0)
            order = 1 + trial % 3
            sampled = estimate_ric(a, order, samples=60, seed=trial)
            assert sampled.delta_lower <= exhaustive_ric(a, order) + 1e-12

    def test_monotone_in_samples(self):
        rng = np.random.default_rng(80)
        a = rng.standard_normal((9, 12))
        a /= np.linalg.norm(a, axis=0)
        previous = 0.0
        for samples in (5, 20, 80):
            value = estimate_ric(a, 2, samples=samples, seed=4).delta_lower
            assert value >= previous - 1e-15
            previous = value

    def test_monotone_in_order(self):
        rng = np.random.default_rng(81)
        a = rng.standard_normal((10, 12))
        a /= np.linalg.norm(a, axis=0)
        values = [estimate_ric(a, order, samples=40, seed=5).delta_lower
                  for order in (1, 2, 3, 4)]
        assert all(values[i + 1] >= values[i] - 1e-15 for i in range(3))

    def test_exhaustive_guard(self):
        with pytest.raises(EnumerationBudgetError):
            exhaustive_ric(np.zeros((4, 13)), 2)

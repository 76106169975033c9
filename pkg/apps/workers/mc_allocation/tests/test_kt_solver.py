import itertools
import unittest

import numpy as np

from mc_allocation.application.kt_solver import active_mask, solve_k_given_lambda, solve_optimal, total_for_lambda
from mc_allocation.application.misclassification import dh_dk, dh_dk_terms, h, h_terms
from mc_allocation.config.solver import SolverConfig
from mc_allocation.domain.errors import DegenerateHypothesisError, InvalidInputError
from mc_allocation.domain.values import Allocation, PValueSet


class KGivenLambdaTests(unittest.TestCase):
    def test_stationarity(self):
        for p, alpha, lam in ((0.3, 0.1, 1e-4), (0.001, 0.01, 1e-3), (0.5, 0.0002, 1e-9)):
            k = solve_k_given_lambda(p, alpha, lam)
            self.assertGreater(k, 0.0)
            self.assertAlmostEqual(dh_dk(p, alpha, k) / -lam, 1.0, delta=1e-8, msg=f"p={p}")

    def test_larger_lambda_gives_smaller_k(self):
        ks = [solve_k_given_lambda(0.3, 0.1, lam) for lam in (1e-6, 1e-5, 1e-4)]
        self.assertGreater(ks[0], ks[1])
        self.assertGreater(ks[1], ks[2])

    def test_agrees_with_grid_scan(self):
        p, alpha, lam = 0.02, 0.1, 1e-6
        k = solve_k_given_lambda(p, alpha, lam)
        grid = np.geomspace(1.0, 1e4, 100_001)
        gap = dh_dk_terms(np.full(grid.shape, p), alpha, grid) + lam
        # dh/dk + lambda changes sign once, from negative to positive
        first = int(np.argmax(gap > 0.0))
        self.assertGreater(first, 0)
        self.assertLessEqual(grid[first - 1], k * (1 + 1e-9))
        self.assertGreaterEqual(grid[first], k * (1 - 1e-9))

    def test_degenerate_inputs(self):
        with self.assertRaises(DegenerateHypothesisError):
            solve_k_given_lambda(0.1, 0.1, 1e-3)
        with self.assertRaises(DegenerateHypothesisError):
            solve_k_given_lambda(0.0, 0.1, 1e-3)
        with self.assertRaises(InvalidInputError):
            solve_k_given_lambda(0.3, 0.1, 0.0)


class SolveOptimalTests(unittest.TestCase):
    def test_budget_and_stationarity(self):
        p = PValueSet(np.array([0.001, 0.05, 0.3, 0.02, 0.8]), 0.01)
        sol = solve_optimal(p, 1000.0)
        self.assertLessEqual(sol.budget_error, 1e-2)
        self.assertLessEqual(sol.stationarity_residual, 1e-9)
        grad = dh_dk_terms(p.values, p.alpha, sol.allocation.budgets)
        np.testing.assert_allclose(grad / -sol.lambda_star, 1.0, rtol=1e-8)
        self.assertFalse(sol.allocation.is_discrete)

    def test_degenerate_hypotheses_get_zero(self):
        p = PValueSet(np.array([0.0, 0.3, 0.05, 1.0]), 0.1)
        sol = solve_optimal(p, 500.0)
        self.assertEqual(sol.degenerate, (0, 3))
        self.assertEqual(sol.allocation.budgets[0], 0.0)
        self.assertEqual(sol.allocation.budgets[3], 0.0)
        self.assertLessEqual(sol.budget_error, 1e-2)
        np.testing.assert_array_equal(active_mask(p), [False, True, True, False])

    def test_boundary_within_eps_is_degenerate(self):
        p = PValueSet(np.array([0.1 + 1e-13, 0.3]), 0.1)
        sol = solve_optimal(p, 100.0)
        self.assertEqual(sol.degenerate, (0,))

    def test_all_degenerate_raises(self):
        p = PValueSet(np.array([0.0, 1.0]), 0.1)
        with self.assertRaises(DegenerateHypothesisError):
            solve_optimal(p, 100.0)

    def test_invalid_budget(self):
        p = PValueSet(np.array([0.3]), 0.1)
        with self.assertRaises(InvalidInputError):
            solve_optimal(p, 0.0)

    def test_single_hypothesis_takes_everything(self):
        p = PValueSet(np.array([0.3]), 0.1)
        sol = solve_optimal(p, 250.0)
        self.assertAlmostEqual(float(sol.allocation.budgets[0]), 250.0, delta=1e-6)

    def test_total_decreases_in_lambda(self):
        p = PValueSet(np.array([0.001, 0.05, 0.3]), 0.01)
        totals = [total_for_lambda(p, lam) for lam in (1e-7, 1e-6, 1e-5, 1e-4)]
        self.assertTrue(all(a > b for a, b in zip(totals, totals[1:])))

    def test_floor_flag(self):
        p = PValueSet(np.array([0.3, 0.5]), 0.1)
        sol = solve_optimal(p, 1.0, SolverConfig(k_floor=1.0))
        self.assertTrue(sol.infeasible_floor)
        self.assertEqual(sol.floored, ())
        self.assertLessEqual(sol.budget_error, 1e-2)

    def test_floor_lifts_far_hypotheses(self):
        p = PValueSet(np.array([0.009, 0.012, 0.999]), 0.01)
        free = solve_optimal(p, 1000.0)
        self.assertLess(free.allocation.budgets[2], 1.0)
        self.assertEqual(free.floored, ())

        sol = solve_optimal(p, 1000.0, SolverConfig(k_floor=1.0))
        self.assertFalse(sol.infeasible_floor)
        self.assertEqual(sol.floored, (2,))
        self.assertEqual(sol.allocation.budgets[2], 1.0)
        self.assertLessEqual(sol.budget_error, 1e-2)
        # the others stay stationary at the common multiplier
        grad = dh_dk_terms(p.values[:2], p.alpha, sol.allocation.budgets[:2])
        np.testing.assert_allclose(grad / -sol.lambda_star, 1.0, rtol=1e-8)
        self.assertLess(sol.allocation.budgets[:2].sum(), free.allocation.budgets[:2].sum())

    def test_symmetric_pair_splits_evenly(self):
        for q in (0.02, 0.3, 0.9):
            sol = solve_optimal(PValueSet(np.array([q, q]), 0.1), 500.0)
            k = sol.allocation.budgets
            self.assertEqual(k[0], k[1], msg=f"q={q}")
            self.assertAlmostEqual(float(k[0]), 250.0, delta=1e-2, msg=f"q={q}")

    def test_no_improving_transfer(self):
        p = PValueSet(np.array([0.001, 0.05, 0.3, 0.02, 0.8, 0.011]), 0.01)
        budget = 2000.0
        sol = solve_optimal(p, budget)
        base = h(p, sol.allocation).value
        eps = 1e-3 * budget / p.m
        k = sol.allocation.budgets
        for i, j in itertools.permutations(range(p.m), 2):
            if k[i] < eps:
                continue
            moved = k.copy()
            moved[i] -= eps
            moved[j] += eps
            change = h(p, Allocation.continuous(moved)).value - base
            self.assertGreaterEqual(change, -1e-9 * base, msg=f"{i} -> {j}")


class GlobalOptimalityTests(unittest.TestCase):
    def _grid_min(self, p: PValueSet, budget: float) -> float:
        step = budget / 400
        best = np.inf
        if p.m == 2:
            k1 = np.arange(401) * step
            k = np.stack([k1, budget - k1], axis=1)
        else:
            rows = [(i * step, j * step, budget - (i + j) * step) for i, j in itertools.product(range(401), repeat=2) if i + j <= 400]
            k = np.array(rows)
        k = np.clip(k, 0.0, None)
        terms, _ = h_terms(np.broadcast_to(p.values, k.shape), p.alpha, k)
        best = min(best, float(terms.sum(axis=1).min()))
        return best

    def test_kt_beats_simplex_grid(self):
        instances = [
            np.array([0.3, 0.05]),
            np.array([0.02, 0.5]),
            np.array([0.3, 0.05, 0.15]),
            np.array([0.01, 0.2, 0.6]),
        ]
        for values in instances:
            p = PValueSet(values, 0.1)
            for budget in (50.0, 200.0):
                sol = solve_optimal(p, budget)
                self.assertLessEqual(h(p, sol.allocation).value, self._grid_min(p, budget) + 1e-8, msg=f"{values}, K={budget}")

    def test_kt_beats_constant(self):
        p = PValueSet(np.array([0.001, 0.004, 0.05, 0.3, 0.7]), 0.01)
        sol = solve_optimal(p, 5000.0)
        const = Allocation.continuous(np.full(5, 1000.0))
        self.assertLess(h(p, sol.allocation).value, h(p, const).value)


if __name__ == "__main__":
    unittest.main()

import unittest

import numpy as np

from mc_allocation.application.greedy import batch_proposal, choose_next, greedy_allocate
from mc_allocation.application.misclassification import g, g_i
from mc_allocation.config.solver import GreedyConfig
from mc_allocation.domain.errors import InfeasibleBudgetError, InvalidInputError
from mc_allocation.domain.values import Allocation, PValueSet


class BatchProposalTests(unittest.TestCase):
    def test_first_jump_lands_on_lattice(self):
        alpha = 1 / 5000
        b, d = batch_proposal(0.3 * alpha, alpha, 1, 5000)
        self.assertEqual(b, 4999)
        self.assertAlmostEqual(d, g_i(0.3 * alpha, alpha, 5000) - g_i(0.3 * alpha, alpha, 1), places=15)

    def test_full_jump_after_lattice(self):
        b, _ = batch_proposal(0.3 / 5000, 1 / 5000, 5000, 5000)
        self.assertEqual(b, 5000)

    def test_above_threshold_single_step(self):
        b, d = batch_proposal(0.5, 0.1, 0, 10)
        self.assertEqual(b, 1)
        self.assertAlmostEqual(d, -0.5, places=15)

    def test_skips_over_jump_boundary(self):
        # g_i(0.5, 0.1, k) rises at k=10; the first strict decrease from k=9 is at k=13
        b, d = batch_proposal(0.5, 0.1, 9, 10)
        self.assertEqual(b, 4)
        self.assertLess(d, 0.0)

    def test_certain_hypothesis_has_no_improvement(self):
        _, d = batch_proposal(1.0, 0.1, 5, 10)
        self.assertEqual(d, 0.0)


class ChooseNextTests(unittest.TestCase):
    def test_examples(self):
        self.assertEqual(choose_next(np.array([-0.5, -0.1]), np.array([1, 1])), 0)
        self.assertEqual(choose_next(np.array([-0.5, -0.4]), np.array([5000, 1])), 1)

    def test_ties_go_to_lowest_index(self):
        self.assertEqual(choose_next(np.array([-0.2, -0.2, -0.2]), np.array([2, 2, 2])), 0)

    def test_saturated(self):
        self.assertIsNone(choose_next(np.zeros(3), np.ones(3)))

    def test_literal_flag_picks_worst_ratio(self):
        self.assertEqual(choose_next(np.array([-0.5, -0.1]), np.array([1, 1]), literal_argmax=True), 1)

    def test_matches_brute_force(self):
        rng = np.random.default_rng(11)
        for _ in range(200):
            m = int(rng.integers(1, 12))
            d = -rng.uniform(0.0, 1.0, size=m) * (rng.uniform(size=m) < 0.8)
            b = rng.integers(1, 50, size=m)
            chosen = choose_next(d, b)
            ratios = [(-d[i] / b[i]) if d[i] < 0 else -np.inf for i in range(m)]
            if max(ratios) == -np.inf:
                self.assertIsNone(chosen)
            else:
                self.assertEqual(ratios[chosen], max(ratios))
                self.assertEqual(chosen, ratios.index(max(ratios)))

    def test_shape_mismatch(self):
        with self.assertRaises(InvalidInputError):
            choose_next(np.array([-0.1]), np.array([1, 2]))


class GreedyAllocateTests(unittest.TestCase):
    def test_hand_computed_instance(self):
        res = greedy_allocate(PValueSet(np.array([0.01, 0.5]), 0.1), 20)
        np.testing.assert_array_equal(res.allocation.budgets, [10, 9])
        self.assertEqual(res.unspent_budget, 1)
        self.assertFalse(res.saturated)

    def test_matches_exhaustive_split_of_spent_budget(self):
        p = PValueSet(np.array([0.5, 0.9]), 0.1)
        res = greedy_allocate(p, 6)
        np.testing.assert_array_equal(res.allocation.budgets, [3, 2])
        spent = res.allocation.total()
        best = min(g(p, Allocation.discrete([a, spent - a])).value for a in range(spent + 1))
        self.assertAlmostEqual(g(p, res.allocation).value, best, places=12)
        self.assertAlmostEqual(g(p, res.allocation).value, 0.135, places=12)

    def test_objective_strictly_decreases(self):
        p = PValueSet(np.array([0.01, 0.02, 0.05, 0.3, 0.5, 0.15]), 0.1)
        res = greedy_allocate(p, 300)
        trace = np.array(res.objective_trace)
        self.assertTrue(np.all(np.diff(trace) < 0))
        self.assertAlmostEqual(trace[-1], g(p, res.allocation).value, places=9)

    def test_budget_and_lattice(self):
        p = PValueSet(np.array([0.01, 0.02, 0.05, 0.3, 0.5]), 0.1)
        res = greedy_allocate(p, 300)
        self.assertLessEqual(res.allocation.total(), 300)
        for k in res.allocation.budgets[:3]:
            self.assertTrue(k == 1 or k % 10 == 0, msg=f"k={k}")

    def test_infeasible_budget(self):
        with self.assertRaises(InfeasibleBudgetError) as ctx:
            greedy_allocate(PValueSet(np.array([0.01, 0.02]), 0.1), 1)
        self.assertEqual(ctx.exception.min_budget, 2)
        self.assertEqual(ctx.exception.exit_code, 3)

    def test_saturates_on_certain_hypotheses(self):
        res = greedy_allocate(PValueSet(np.array([0.0, 1.0]), 0.1), 100)
        self.assertTrue(res.saturated)
        # one sample for p=0 at start, one for p=1 before g hits 0
        self.assertEqual(res.unspent_budget, 98)

    def test_budget_stop_is_not_saturation(self):
        # at k=9 the next decrease of g_i needs 4 more samples, which do not fit inside K=12
        res = greedy_allocate(PValueSet(np.array([0.5]), 0.1), 12)
        np.testing.assert_array_equal(res.allocation.budgets, [9])
        self.assertFalse(res.saturated)
        self.assertEqual(res.unspent_budget, 3)
        self.assertLess(g_i(0.5, 0.1, 13), g_i(0.5, 0.1, 9))

    def test_budget_stop_with_room_left(self):
        res = greedy_allocate(PValueSet(np.array([0.5]), 0.1), 14)
        np.testing.assert_array_equal(res.allocation.budgets, [13])
        self.assertFalse(res.saturated)

    def test_literal_flag_is_recorded(self):
        res = greedy_allocate(PValueSet(np.array([0.5, 0.9]), 0.1), 6, GreedyConfig(literal_argmax=True))
        self.assertTrue(res.literal_argmax)
        self.assertLessEqual(res.allocation.total(), 6)

    def test_deterministic(self):
        p = PValueSet(np.array([0.04, 0.2, 0.6, 0.09]), 0.1)
        a = greedy_allocate(p, 150)
        b = greedy_allocate(p, 150)
        np.testing.assert_array_equal(a.allocation.budgets, b.allocation.budgets)


if __name__ == "__main__":
    unittest.main()

import math
import unittest

import numpy as np

from mc_allocation.application import experiments
from mc_allocation.application.hypotheses import generate_mixture
from mc_allocation.application.kt_solver import solve_optimal
from mc_allocation.application.misclassification import g, h, plus_one_terms
from mc_allocation.config.experiment import Estimator
from mc_allocation.config.thompson import ThompsonSettings
from mc_allocation.domain.errors import InvalidInputError
from mc_allocation.domain.values import Allocation, MixtureConfig, PValueSet

FAST_THOMPSON = ThompsonSettings(iterations=20, posterior_draws=10)


class EmpiricalTests(unittest.TestCase):
    def test_zero_p_values_with_large_k(self):
        p = PValueSet(np.zeros(4), 0.1)
        runs = experiments.empirical_misclassifications(p, Allocation.discrete([100] * 4), 5, seed=1)
        self.assertEqual(runs, [0] * 5)

    def test_zero_samples_misclassify_every_rejection(self):
        p = PValueSet(np.array([0.01, 0.5, 0.02]), 0.1)
        runs = experiments.empirical_misclassifications(p, Allocation.discrete([0, 0, 0]), 4, seed=1)
        self.assertEqual(runs, [2] * 4)

    def test_raw_estimator_zero_samples_reject(self):
        p = PValueSet(np.array([0.3, 0.5]), 0.1)
        runs = experiments.empirical_misclassifications(p, Allocation.discrete([0, 0]), 3, 0, Estimator.RAW)
        self.assertEqual(runs, [2] * 3)

    def test_continuous_allocation_rejected(self):
        p = PValueSet(np.array([0.3, 0.5]), 0.1)
        with self.assertRaises(InvalidInputError):
            experiments.empirical_misclassifications(p, Allocation.continuous([1.5, 2.5]), 3, 0)

    def test_mean_matches_enumeration(self):
        p = PValueSet(np.array([0.05, 0.13]), 0.1)
        k = Allocation.discrete([20, 30])
        r = 20_000
        for estimator, terms in (
            (Estimator.PLUS_ONE, plus_one_terms(p.values, p.alpha, k.budgets)),
            (Estimator.RAW, g(p, k).per_hypothesis),
        ):
            runs = experiments.empirical_misclassifications(p, k, r, seed=17, estimator=estimator)
            expected = float(np.sum(terms))
            se = math.sqrt(float(np.sum(terms * (1 - terms))) / r)
            self.assertLess(abs(float(np.mean(runs)) - expected), 4 * se, msg=estimator.value)

    def test_reproducible_prefix(self):
        p = generate_mixture(MixtureConfig(m=30, seed=2), alpha=0.01)
        k = experiments.constant_allocation(p.m, 3000)
        a = experiments.empirical_misclassifications(p, k, 5, seed=8)
        b = experiments.empirical_misclassifications(p, k, 3, seed=8)
        self.assertEqual(a[:3], b)


class ProfileTests(unittest.TestCase):
    alpha = 1 / 5000

    def test_below_threshold_rises_then_drops(self):
        prof = experiments.profile_g(0.3 * self.alpha, self.alpha, 5000)
        values = np.array([v for _, v in prof])
        self.assertEqual(len(prof), 5001)
        self.assertTrue(np.all(np.diff(values[1:5000]) > 0))
        self.assertLess(values[5000], values[4999])

    def test_above_threshold_falls_then_rises(self):
        values = np.array([v for _, v in experiments.profile_g(5 * self.alpha, self.alpha, 5000)])
        self.assertTrue(np.all(np.diff(values[1:5000]) < 0))
        self.assertGreater(values[5000], values[4999])

    def test_profiles_vanish(self):
        for p in (0.3 * self.alpha, 5 * self.alpha):
            values = np.array([v for _, v in experiments.profile_g(p, self.alpha, 200_000)])
            self.assertLess(values[-5000:].max(), 0.05)

    def test_invalid_k_max(self):
        with self.assertRaises(InvalidInputError):
            experiments.profile_g(0.1, 0.2, 0)


class ProtocolTests(unittest.TestCase):
    def setUp(self) -> None:
        self.p = generate_mixture(MixtureConfig(m=50, seed=1))

    def test_table1_reports(self):
        reports = experiments.table1_protocol(self.p, 20_000, 3, seed=4, thompson_settings=FAST_THOMPSON)
        self.assertEqual([r.strategy for r in reports], ["optimal_kt", "thompson", "constant"])
        by = {r.strategy: r for r in reports}
        kt = by["optimal_kt"]
        self.assertIsNotNone(kt.theoretical_continuous)
        self.assertLessEqual(kt.theoretical_continuous, by["constant"].theoretical + 1e-9)
        self.assertLessEqual(kt.theoretical_continuous, by["thompson"].theoretical + 1e-9)
        for rep in reports:
            self.assertEqual(len(rep.empirical_runs), 3)
            self.assertAlmostEqual(rep.empirical_mean, sum(rep.empirical_runs) / 3)
            self.assertEqual(rep.estimator, Estimator.PLUS_ONE)
            self.assertEqual(rep.m, 50)

    def test_table1_with_greedy(self):
        reports = experiments.table1_protocol(
            self.p, 5000, 2, seed=4, thompson_settings=FAST_THOMPSON, include_greedy=True
        )
        self.assertEqual(reports[-1].strategy, "greedy")
        self.assertIn("unspent_budget", reports[-1].parameters)

    def test_report_serialises_with_upper_case_budget(self):
        rep = experiments.table1_protocol(self.p, 20_000, 2, seed=4, thompson_settings=FAST_THOMPSON)[0]
        dumped = rep.model_dump(mode="json", by_alias=True)
        self.assertEqual(dumped["K"], 20_000)
        self.assertEqual(dumped["schema_version"], 1)
        self.assertEqual(dumped["rng"], "numpy.PCG64+SeedSequence")

    def test_budget_grid(self):
        grid = experiments.budget_grid(10_000, 1_000_000, 25)
        self.assertEqual(len(grid), 25)
        self.assertEqual(grid[0], 10_000)
        self.assertEqual(grid[-1], 1_000_000)
        self.assertTrue(all(b > a for a, b in zip(grid, grid[1:])))

    def test_convergence_study(self):
        p = generate_mixture(MixtureConfig(m=30, seed=6))
        grid = [2_000, 5_000, 10_000]
        points = experiments.convergence_study(p, grid, 5, seed=3, thompson_settings=FAST_THOMPSON, threads=2)
        self.assertEqual([pt.budget for pt in points], grid)
        for pt in points:
            self.assertLessEqual(pt.q05, pt.q50)
            self.assertLessEqual(pt.q50, pt.q95)
            bound = p.m / (p.m - h(p, solve_optimal(p, pt.budget).allocation).value)
            self.assertLessEqual(pt.q95, bound + 1e-12)

    def test_convergence_ratio_can_be_zero(self):
        # plus-one estimates stay above alpha for k < 99, so both hypotheses are always misclassified
        p = PValueSet(np.array([0.001, 0.002]), 0.01)
        points = experiments.convergence_study(p, [10, 20], 3, seed=0, thompson_settings=FAST_THOMPSON, threads=1)
        self.assertEqual([pt.budget for pt in points], [10, 20])
        for pt in points:
            self.assertEqual((pt.q05, pt.q50, pt.q95), (0.0, 0.0, 0.0))

    def test_convergence_independent_of_threads(self):
        p = generate_mixture(MixtureConfig(m=20, seed=6))
        grid = [1_000, 3_000]
        one = experiments.convergence_study(p, grid, 4, seed=3, thompson_settings=FAST_THOMPSON, threads=1)
        many = experiments.convergence_study(p, grid, 4, seed=3, thompson_settings=FAST_THOMPSON, threads=4)
        self.assertEqual([x.model_dump() for x in one], [x.model_dump() for x in many])

    def test_grid_must_increase(self):
        with self.assertRaises(InvalidInputError):
            experiments.convergence_study(self.p, [5000, 5000], 2)

    def test_compare_allocations(self):
        cmp = experiments.compare_allocations(PValueSet(np.array([0.001, 0.05, 0.3, 0.9]), 0.1), 400)
        self.assertEqual(cmp.kt_rounded.total(), 400)
        self.assertLessEqual(cmp.greedy.allocation.total(), 400)
        np.testing.assert_array_equal(cmp.constant.budgets, [100] * 4)
        self.assertAlmostEqual(cmp.kt.allocation.total(), 400, delta=1e-2)

    def test_constant_allocation(self):
        np.testing.assert_array_equal(experiments.constant_allocation(500, 1000).budgets, np.full(500, 2))


if __name__ == "__main__":
    unittest.main()

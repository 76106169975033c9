import logging
import os
import unittest
from unittest import mock

from mc_allocation.logging_setup import ExtraFormatter
from mc_allocation.settings import Settings


class SettingsTests(unittest.TestCase):
    def test_defaults(self):
        with mock.patch.dict(os.environ, {"APP_ENV": "production"}, clear=True):
            settings = Settings()
        self.assertEqual(settings.LOG_LEVEL, "INFO")
        self.assertEqual(settings.thompson.iterations, 1000)
        self.assertEqual(settings.thompson.posterior_draws, 100)
        self.assertEqual(settings.experiment.alpha_star, 0.1)
        self.assertEqual(settings.solver.degeneracy_eps, 1e-12)

    def test_nested_env_overrides(self):
        env = {
            "APP_ENV": "production",
            "THOMPSON__ITERATIONS": "250",
            "SOLVER__STATIONARITY_TOL": "1e-10",
            "APP__LOG_LEVEL": "DEBUG",
        }
        with mock.patch.dict(os.environ, env, clear=True):
            settings = Settings()
        self.assertEqual(settings.thompson.iterations, 250)
        self.assertEqual(settings.solver.stationarity_tol, 1e-10)
        self.assertEqual(settings.LOG_LEVEL, "DEBUG")

    def test_solver_budget_tolerance(self):
        solver = Settings().solver
        self.assertEqual(solver.budget_tol(1e3), 1.0)
        self.assertEqual(solver.budget_tol(1e10), 100.0)


class FormatterTests(unittest.TestCase):
    def test_extras_are_appended_as_json(self):
        fmt = ExtraFormatter("%(levelprefix)s %(message)s%(extra)s", use_colors=False)
        record = logging.LogRecord("mc_allocation", logging.INFO, __file__, 1, "kt solution", None, None)
        record.K = 1000
        record.lambda_star = 0.5
        line = fmt.format(record)
        self.assertIn("kt solution", line)
        self.assertTrue(line.endswith('{"K": 1000, "lambda_star": 0.5}'))

    def test_no_extras(self):
        fmt = ExtraFormatter("%(message)s%(extra)s", use_colors=False)
        record = logging.LogRecord("mc_allocation", logging.INFO, __file__, 1, "plain", None, None)
        self.assertEqual(fmt.format(record), "plain")


if __name__ == "__main__":
    unittest.main()

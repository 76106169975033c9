from .app import AppConfig, LogLevel
from .experiment import Estimator, ExperimentConfig
from .solver import GreedyConfig, SolverConfig
from .thompson import ThompsonSettings

__all__ = [
    "AppConfig",
    "LogLevel",
    "Estimator",
    "ExperimentConfig",
    "GreedyConfig",
    "SolverConfig",
    "ThompsonSettings",
]

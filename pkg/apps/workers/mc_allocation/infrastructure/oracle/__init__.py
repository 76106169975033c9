from .simulated import SimulatedOracle

__all__ = ["SimulatedOracle"]

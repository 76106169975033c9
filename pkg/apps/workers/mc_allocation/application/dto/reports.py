from __future__ import annotations

import math
from typing import Any, Literal

from pydantic import Field, model_validator

from mc_allocation.application.dto.common import SCHEMA_VERSION, MyBaseModel
from mc_allocation.config.experiment import Estimator

Strategy = Literal["optimal_kt", "greedy", "thompson", "constant"]


class MisclassificationReport(MyBaseModel):
    """
    Theoretical vs. empirical misclassifications of one allocation strategy.
    `theoretical` is h on the allocation that was sampled; for the KT strategy
    `theoretical_continuous` is h on the solution before rounding.
    """
    schema_version: int = SCHEMA_VERSION
    strategy: Strategy
    m: int = Field(gt=0)
    alpha: float = Field(gt=0.0, lt=1.0)
    budget: int = Field(alias="K", ge=0)
    r: int = Field(gt=0)
    seed: int = Field(ge=0)
    rng: str
    estimator: Estimator
    theoretical: float
    theoretical_continuous: float | None = None
    empirical_runs: list[int]
    empirical_mean: float
    allocation_file: str | None = None
    parameters: dict[str, Any] = Field(default_factory=dict)

    @model_validator(mode="after")
    def _check_counts(self):
        if len(self.empirical_runs) != self.r:
            raise ValueError("empirical_runs must hold r entries")
        if any(not (0 <= e <= self.m) for e in self.empirical_runs):
            raise ValueError("empirical runs must lie in [0, m]")
        if not (0.0 <= self.theoretical <= self.m):
            raise ValueError("theoretical must lie in [0, m]")
        expected = math.fsum(self.empirical_runs) / self.r
        if not math.isclose(self.empirical_mean, expected, rel_tol=1e-12, abs_tol=1e-12):
            raise ValueError("empirical_mean must equal mean(empirical_runs)")
        return self


class ConvergencePoint(MyBaseModel):
    """5/50/95% quantiles of the correct-classification ratio at one budget K."""
    budget: int = Field(alias="K", gt=0)
    q05: float = Field(ge=0.0)
    q50: float = Field(ge=0.0)
    q95: float = Field(ge=0.0)

    @model_validator(mode="after")
    def _check_order(self):
        if not (self.q05 <= self.q50 <= self.q95):
            raise ValueError("quantiles must satisfy q05 <= q50 <= q95")
        return self


class Provenance(MyBaseModel):
    """
    Sidecar metadata that makes an output file reproducible on its own.
    No timestamps: reruns must be byte-identical.
    """
    schema_version: int = SCHEMA_VERSION
    tool: str = "mc_allocation"
    version: str
    command: list[str] = Field(default_factory=list)
    seed: int | None = None
    rng: str | None = None
    alpha: float | None = None
    m: int | None = None
    budget: int | float | None = Field(default=None, alias="K")
    parameters: dict[str, Any] = Field(default_factory=dict)

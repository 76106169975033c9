from __future__ import annotations

import math
from pathlib import Path
from typing import Literal

from pydantic import Field, field_validator, model_validator

from mc_allocation.application.dto.common import MyBaseModel
from mc_allocation.config.experiment import Estimator
from mc_allocation.domain.errors import InvalidInputError

StrategyName = Literal["kt", "greedy", "thompson", "constant", "all"]


class CliConfig(MyBaseModel):
    """
    Validated options of one `mcalloc` invocation.
    Exactly one of `alpha` (absolute) or `alpha_star` (divided by m) is set.
    """
    command: Literal["generate", "allocate", "report", "converge", "profile"]
    input: Path | None = None
    allocation_input: Path | None = None
    out: Path | None = None
    fmt: Literal["csv", "json"] = "csv"

    m: int | None = Field(default=None, gt=0)
    pi0: float | None = Field(default=None, ge=0.0, le=1.0)
    alpha: float | None = Field(default=None, gt=0.0, lt=1.0)
    alpha_star: float | None = Field(default=None, gt=0.0, lt=1.0)
    budget: float | None = Field(default=None, alias="K", gt=0.0)
    iterations: int | None = Field(default=None, alias="it", gt=0)
    posterior_draws: int | None = Field(default=None, alias="d", gt=0)
    repetitions: int | None = Field(default=None, alias="r", gt=0)
    seed: int = Field(default=0, ge=0)
    threads: int | None = Field(default=None, gt=0)

    strategy: StrategyName = "kt"
    estimator: Estimator = Estimator.PLUS_ONE
    literal_argmax: bool = False
    warm_up: bool = False
    sort_output: bool = True

    k_min: int | None = Field(default=None, gt=0)
    k_max: int | None = Field(default=None, gt=0)
    steps: int | None = Field(default=None, gt=1)
    full_grid: bool = False

    p: float | None = Field(default=None, ge=0.0, le=1.0)
    profile_k_max: int | None = Field(default=None, ge=1)

    @field_validator("budget")
    @classmethod
    def _finite_budget(cls, v: float | None) -> float | None:
        if v is not None and not math.isfinite(v):
            raise ValueError("K must be finite")
        return v

    @model_validator(mode="after")
    def _check_threshold(self):
        if self.alpha is not None and self.alpha_star is not None:
            raise ValueError("pass either alpha or alpha_star, not both")
        if self.alpha is None and self.alpha_star is None:
            raise ValueError("one of alpha or alpha_star is required")
        if self.k_min is not None and self.k_max is not None and self.k_max <= self.k_min:
            raise ValueError("k_max must exceed k_min")
        return self

    def effective_alpha(self, m: int) -> float:
        """alpha as given, or alpha_star / m."""
        if self.alpha is not None:
            return float(self.alpha)
        alpha = float(self.alpha_star) / int(m)
        if not (0.0 < alpha < 1.0):
            raise InvalidInputError(f"derived alpha {alpha!r} outside (0, 1)", field="alpha_star")
        return alpha

    def integer_budget(self) -> int:
        """K normalised for discrete strategies (`1e6` -> 1000000)."""
        if self.budget is None:
            raise InvalidInputError("is required", field="K")
        if self.budget != math.floor(self.budget):
            raise InvalidInputError(f"must be an integer for this strategy, got {self.budget!r}", field="K")
        return int(self.budget)

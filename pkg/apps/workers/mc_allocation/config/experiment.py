from enum import Enum

from pydantic import BaseModel, ConfigDict, Field, model_validator


class Estimator(str, Enum):
    RAW = "raw"
    PLUS_ONE = "plus_one"


class ExperimentConfig(BaseModel):
    """Defaults for synthetic p-value sets and the evaluation protocols."""

    model_config = ConfigDict(extra="ignore", frozen=True)

    m: int = Field(default=500, gt=0)
    pi0: float = Field(default=0.5, ge=0.0, le=1.0)
    beta_shape1: float = Field(default=0.25, gt=0.0)
    beta_shape2: float = Field(default=25.0, gt=0.0)
    alpha_star: float = Field(default=0.1, gt=0.0, lt=1.0)
    budget: int = Field(default=1_000_000, gt=0)
    repetitions: int = Field(default=10, gt=0)
    seed: int = Field(default=42, ge=0)
    estimator: Estimator = Field(default=Estimator.PLUS_ONE)

    # Desk-scale convergence grid; `full_grid_*` is the long 1e5..1e7 x 100 study.
    grid_k_min: int = Field(default=10_000, gt=0)
    grid_k_max: int = Field(default=1_000_000, gt=0)
    grid_steps: int = Field(default=25, gt=1)
    full_grid_k_min: int = Field(default=100_000, gt=0)
    full_grid_k_max: int = Field(default=10_000_000, gt=0)
    full_grid_steps: int = Field(default=100, gt=1)

    threads: int | None = Field(default=None, gt=0, description="None means available parallelism")

    @model_validator(mode="after")
    def _check_grid(self):
        if self.grid_k_max <= self.grid_k_min:
            raise ValueError("grid_k_max must exceed grid_k_min")
        if self.full_grid_k_max <= self.full_grid_k_min:
            raise ValueError("full_grid_k_max must exceed full_grid_k_min")
        return self

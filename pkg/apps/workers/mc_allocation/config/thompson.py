from pydantic import BaseModel, ConfigDict, Field


class ThompsonSettings(BaseModel):
    """Defaults for the Thompson-sampling allocator.

    The run-level `ThompsonConfig` value object is built from these plus the
    budget and seed of a concrete run.
    """

    model_config = ConfigDict(extra="ignore", frozen=True)

    iterations: int = Field(default=1000, gt=0)
    posterior_draws: int = Field(default=100, gt=0)
    warm_up: bool = Field(default=False, description="Draw one sample per hypothesis before the first iteration")

from pydantic import BaseModel, ConfigDict, Field


class SolverConfig(BaseModel):
    """Tolerances and iteration caps for the continuous (Kuhn-Tucker) solver."""

    model_config = ConfigDict(extra="ignore", frozen=True)

    stationarity_tol: float = Field(default=1e-9, gt=0.0, description="Relative tolerance on |dh/dk + lambda| / lambda")
    degeneracy_eps: float = Field(default=1e-12, ge=0.0, description="Hypotheses with |p - alpha| <= eps are excluded")
    max_outer_iter: int = Field(default=200, gt=0)
    max_inner_iter: int = Field(default=200, gt=0)
    k_floor: float = Field(default=0.0, ge=0.0, description="Minimum continuous budget per active hypothesis; relaxed when K < m * k_floor")
    budget_rtol: float = Field(default=1e-8, gt=0.0)
    inner_k_lo: float = Field(default=1e-12, gt=0.0)
    inner_k_hi: float = Field(default=1.0, gt=0.0)
    bracket_growth: float = Field(default=4.0, gt=1.0)

    def budget_tol(self, budget: float) -> float:
        """Absolute tolerance on |sum(k) - K|."""
        return max(1.0, self.budget_rtol * float(budget))


class GreedyConfig(BaseModel):
    """Knobs of the discrete greedy allocator."""

    model_config = ConfigDict(extra="ignore", frozen=True)

    # Literal `argmax d_i / b_i` (selects the worst improvement per sample); audit use only.
    literal_argmax: bool = Field(default=False)
    max_iterations: int | None = Field(default=None, gt=0)

"""Schemas for the sandwich, approximation and deviation experiment reports."""

from typing import List, Optional

from pydantic import BaseModel, Field, field_validator, model_validator

from idslab.core.errors import ConfigError, InvariantViolation


class SandwichParams(BaseModel):
    """
    Parameters of the two-sided bound
    Nbar(E - E^a) - C exp(-E^-tau) <= N(E) <= Nbar(E + E^a) + C exp(-E^-tau).

    C is fitted when left as None.
    """
    alpha: float = Field(..., gt=0.0, le=1.0)
    energies: List[float]
    tau: float = Field(0.5, gt=0.0)
    C: Optional[float] = Field(None, ge=1.0)

    @field_validator("energies")
    @classmethod
    def _positive_ascending(cls, energies: List[float]) -> List[float]:
        if not energies:
            raise ConfigError("sandwich check needs at least one energy")
        if any(e <= 0.0 for e in energies) or any(b <= a for a, b in zip(energies, energies[1:])):
            raise ConfigError("sandwich energies must be positive and strictly ascending")
        return energies


class SandwichRow(BaseModel):
    energy: float
    n: float
    stderr: float
    nbar_lower: float = Field(..., description="Nbar(E - E^alpha), 0 when E - E^alpha <= 0")
    nbar_upper: float = Field(..., description="Nbar(E + E^alpha)")
    remainder: float = Field(..., description="C exp(-E^-tau) with the reported C")
    lower_margin: float
    upper_margin: float
    trend_gap: float = Field(..., description="|N(E) - Nbar(E + E^alpha)|")
    lower_pass: bool
    upper_pass: bool


class SandwichReport(BaseModel):
    alpha: float
    tau: float
    C: float = Field(..., description="Constant used for the pass flags")
    C_required: float = Field(..., description="Smallest C >= 1 making every energy pass at this tau")
    homogenized: str
    rows: List[SandwichRow]
    gap_shrinks_with_energy: bool
    all_pass: bool

    @model_validator(mode="after")
    def _finite(self) -> "SandwichReport":
        for row in self.rows:
            if row.lower_margin != row.lower_margin or row.upper_margin != row.upper_margin:
                raise InvariantViolation(f"non-finite sandwich margin at E={row.energy:g}")
        return self


class ApproximationReport(BaseModel):
    """Two-sided bracket of N(E+eps) - N(E-eps) by periodic approximants."""
    energy: float
    epsilon: float
    n: int
    samples: int
    lower: float
    middle: float
    upper: float
    lower_stderr: float
    middle_stderr: float
    upper_stderr: float
    remainder: float = Field(..., description="exp(-eps^-eta)")
    width: float
    coupling_satisfied: bool = Field(..., description="n >= eps^-rho")
    lower_holds: bool
    upper_holds: bool

    @property
    def holds(self) -> bool:
        return self.lower_holds and self.upper_holds


class DeviationEstimate(BaseModel):
    """Monte Carlo frequency of the large-deviation event on a finite test subspace."""
    n: int
    energy: float
    alpha: float
    trials: int = Field(..., ge=0)
    hits: int = Field(..., ge=0)
    p_hat: float = Field(..., ge=0.0, le=1.0)
    ci_lower: float = Field(0.0, ge=0.0, le=1.0)
    ci_upper: float = Field(1.0, ge=0.0, le=1.0)
    subspace_dim: int = Field(..., ge=0)
    cutoff: float = Field(..., description="Laplacian eigenvalue cutoff defining the test subspace")
    chernoff_rate: Optional[float] = None
    chernoff_bound: Optional[float] = None
    diagnostic: Optional[str] = None

    @model_validator(mode="after")
    def _hits(self) -> "DeviationEstimate":
        if self.hits > self.trials:
            raise InvariantViolation(f"hits={self.hits} exceeds trials={self.trials}")
        return self


class LdRate(BaseModel):
    """P(|mean of m centred draws| >= t) with the bounds that frame it."""
    cells: int
    threshold: float
    probability: float = Field(..., ge=0.0, le=1.0)
    exact: bool = Field(..., description="True when probability is the exact tail")
    hoeffding_bound: float
    chernoff_bound: float
    rate: float = Field(..., description="Chernoff rate per cell; inf when the threshold exceeds the support")


class TailFit(BaseModel):
    """Least-squares fit log(-log p) = tau log(1/E) + b."""
    tau: Optional[float] = None
    intercept: Optional[float] = None
    residual: Optional[float] = None
    points: int
    conforming: bool
    status: str

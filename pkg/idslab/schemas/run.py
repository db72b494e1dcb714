"""Schemas for CLI runs and their results."""

from enum import Enum
from typing import Any, Dict, List, Optional

from pydantic import BaseModel, Field, model_validator

from idslab.core.errors import ConfigError
from idslab.schemas.operator import BCType


class Subcommand(str, Enum):
    """Available lab subcommands."""
    SAMPLE_FIELD = "sample-field"
    BANDS = "bands"
    IDS = "ids"
    HOMOGENIZED = "homogenized"
    SANDWICH = "sandwich"
    APPROX_CHECK = "approx-check"
    DEVIATION = "deviation"
    LD_RATE = "ld-rate"
    SELFTEST = "selftest"


class RunConfig(BaseModel):
    """
    Fully resolved run configuration: CLI flags layered over the config file's
    [run] table layered over defaults. Validated before any computation.
    """
    subcommand: Subcommand
    spec_path: Optional[str] = None
    dimension: Optional[int] = Field(None, ge=1, le=2)
    mesh: Optional[int] = Field(None, ge=1)
    law: Optional[str] = None
    n: int = Field(8, ge=0)
    samples: int = Field(1, ge=1)
    energies: List[float] = Field(default_factory=list)
    e_min: float = Field(0.01, gt=0.0)
    e_max: float = Field(1.0, gt=0.0)
    alphas: List[float] = Field(default_factory=lambda: [0.5, 0.6, 0.7, 0.8])
    theta_nodes: Optional[int] = Field(None, ge=1)
    seed: int = Field(0, ge=0)
    workers: Optional[int] = None
    output_dir: Optional[str] = None
    bc: BCType = BCType.DIRICHLET
    method: str = Field("finite-volume", pattern="^(finite-volume|floquet)$")
    harmonic: bool = False
    bands: int = Field(6, ge=1)
    sample_index: int = Field(0, ge=0)

    # ld-rate
    cells: int = Field(100, ge=1)
    threshold: float = Field(0.2, ge=0.0)

    # approx-check / deviation
    energy: float = Field(0.1, gt=0.0)
    epsilon: float = Field(0.02, gt=0.0)
    trials: int = Field(1000, ge=1)
    cutoff: float = Field(1.0, gt=0.0)
    kinetic_bound: str = Field("upper", pattern="^(upper|lower)$")
    ns: List[int] = Field(default_factory=list)

    @model_validator(mode="after")
    def _check(self) -> "RunConfig":
        if self.e_max <= self.e_min:
            raise ConfigError(f"--energies needs min < max, got {self.e_min}:{self.e_max}")
        if any(not (0.0 < a <= 1.0) for a in self.alphas):
            raise ConfigError(f"alpha values must lie in (0, 1], got {self.alphas}")
        if self.subcommand is Subcommand.DEVIATION and any(not (0.0 < a < 1.0) for a in self.alphas):
            raise ConfigError("the deviation event needs alpha in (0, 1)")
        if any(b <= a for a, b in zip(self.energies, self.energies[1:])):
            raise ConfigError("--E values must be strictly ascending")
        if any(n < 0 for n in self.ns):
            raise ConfigError("box radii must be nonnegative")
        return self


class ToolResult(BaseModel):
    """Outcome of one tool execution."""
    status: str = Field(..., description="success or error")
    tool: str
    message: str
    files: List[str] = Field(default_factory=list)
    summary: List[str] = Field(default_factory=list, description="One line per result file for stdout")
    data: Optional[Dict[str, Any]] = None
    exit_code: int = Field(0, description="Process exit code the CLI returns for this result")

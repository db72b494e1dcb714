"""Schemas for discretized operators and their spectra."""

import math
from enum import Enum
from typing import Optional, Tuple

import numpy as np
import scipy.sparse as sp
from pydantic import BaseModel, ConfigDict, Field, model_validator

from idslab.core.errors import ConfigError
from idslab.schemas.field import FieldKind


class BCType(str, Enum):
    DIRICHLET = "dirichlet"
    NEUMANN = "neumann"
    PERIODIC = "periodic"
    FLOQUET = "floquet"


class BoundaryCondition(BaseModel):
    """
    Boundary condition on the box. For Floquet, theta holds one phase per axis:
    u(x + L e_a) = exp(i theta_a) u(x) across one box traversal.
    """
    model_config = ConfigDict(frozen=True)

    tag: BCType
    theta: Optional[Tuple[float, ...]] = None

    @model_validator(mode="after")
    def _check_theta(self) -> "BoundaryCondition":
        if self.tag is BCType.FLOQUET:
            if self.theta is None:
                raise ConfigError("Floquet boundary condition needs theta")
            if any(not (0.0 <= t < 2.0 * math.pi) for t in self.theta):
                raise ConfigError(f"theta angles must lie in [0, 2pi), got {self.theta}")
        elif self.theta is not None:
            raise ConfigError(f"theta is only meaningful for Floquet, not {self.tag.value}")
        return self

    @classmethod
    def dirichlet(cls) -> "BoundaryCondition":
        return cls(tag=BCType.DIRICHLET)

    @classmethod
    def neumann(cls) -> "BoundaryCondition":
        return cls(tag=BCType.NEUMANN)

    @classmethod
    def periodic(cls) -> "BoundaryCondition":
        return cls(tag=BCType.PERIODIC)

    @classmethod
    def floquet(cls, *theta: float) -> "BoundaryCondition":
        return cls(tag=BCType.FLOQUET, theta=tuple(float(t) % (2.0 * math.pi) for t in theta))

    @property
    def wraps(self) -> bool:
        return self.tag in (BCType.PERIODIC, BCType.FLOQUET)


class StiffnessMatrix(BaseModel):
    """Sparse finite-difference matrix of -div(rho grad) on one box."""
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    matrix: sp.csr_matrix
    dimension: int
    grid_shape: Tuple[int, ...] = Field(..., description="Degrees of freedom per axis")
    h: float
    bc: BoundaryCondition
    field_kind: FieldKind
    n: Optional[int] = None
    seed: Optional[int] = None
    sample_index: Optional[int] = None

    @property
    def n_dof(self) -> int:
        return self.matrix.shape[0]

    @property
    def is_complex(self) -> bool:
        return np.iscomplexobj(self.matrix.data)

    @property
    def norm(self) -> float:
        """Max absolute row sum; bounds the spectral radius."""
        if self.n_dof == 0:
            return 0.0
        return float(np.max(np.asarray(abs(self.matrix).sum(axis=1)).ravel()))

    @property
    def structure(self) -> str:
        """tridiagonal, cyclic (tridiagonal plus wrap corners) or general."""
        if self.dimension == 1 and self.n_dof >= 3:
            return "cyclic" if self.bc.wraps else "tridiagonal"
        return "general"


class SpectrumSlice(BaseModel):
    """Lowest eigenvalues (ascending) with optional eigenvectors as columns."""
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    eigenvalues: np.ndarray
    eigenvectors: Optional[np.ndarray] = None
    method: str = Field(..., pattern="^(dense|inertia|iterative)$")
    energy: Optional[float] = None
    count_below: Optional[int] = None


class InertiaCount(BaseModel):
    """Result of one eigenvalue count: #{lambda <= energy + shift}."""
    count: int = Field(..., ge=0)
    energy: float
    shift: float = Field(..., ge=0.0)
    method: str

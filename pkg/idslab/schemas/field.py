"""Schemas for Anderson-type coefficient fields."""

from enum import Enum
from typing import Annotated, List, Literal, Optional, Tuple, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from idslab.core.errors import ConfigError, InvariantViolation
from idslab.schemas.arrays import FloatArray

_BOUND_TOL = 1e-12


class BernoulliLaw(BaseModel):
    """omega = v1 with probability p, v0 otherwise."""
    model_config = ConfigDict(frozen=True)

    kind: Literal["bernoulli"] = "bernoulli"
    p: float = Field(..., ge=0.0, le=1.0)
    v0: float = 0.0
    v1: float = 1.0

    @property
    def mean(self) -> float:
        return self.p * self.v1 + (1.0 - self.p) * self.v0

    @property
    def variance(self) -> float:
        return self.p * (1.0 - self.p) * (self.v1 - self.v0) ** 2

    @property
    def support(self) -> Tuple[float, ...]:
        values = []
        if self.p < 1.0:
            values.append(self.v0)
        if self.p > 0.0:
            values.append(self.v1)
        return tuple(sorted(set(values)))

    def draw(self, u: np.ndarray) -> np.ndarray:
        return np.where(u < self.p, self.v1, self.v0)

    def __str__(self) -> str:
        return f"bernoulli:{self.p:g}:{self.v0:g}:{self.v1:g}"


class UniformLaw(BaseModel):
    """omega uniform on [a, b]."""
    model_config = ConfigDict(frozen=True)

    kind: Literal["uniform"] = "uniform"
    a: float
    b: float

    @model_validator(mode="after")
    def _ordered(self) -> "UniformLaw":
        if self.b < self.a:
            raise ConfigError(f"uniform law needs a <= b, got a={self.a}, b={self.b}")
        return self

    @property
    def mean(self) -> float:
        return 0.5 * (self.a + self.b)

    @property
    def variance(self) -> float:
        return (self.b - self.a) ** 2 / 12.0

    @property
    def support(self) -> Tuple[float, ...]:
        return tuple(sorted({self.a, self.b}))

    def draw(self, u: np.ndarray) -> np.ndarray:
        return self.a + (self.b - self.a) * u

    def __str__(self) -> str:
        return f"uniform:{self.a:g}:{self.b:g}"


DisorderLaw = Annotated[Union[BernoulliLaw, UniformLaw], Field(discriminator="kind")]


def is_degenerate(law: DisorderLaw) -> bool:
    return law.variance == 0.0


def support_radius(law: DisorderLaw) -> float:
    """Largest deviation |omega - E(omega)| a draw can take."""
    return max(abs(v - law.mean) for v in law.support)


class CoefficientSpec(BaseModel):
    """
    Law of the random field rho(x) = rho_plus(x) + sum_gamma omega_gamma rho_bump(x - gamma).

    rho_plus and rho_bump hold m samples per axis of one unit cell; the bump lives
    in the cell of gamma = 0, so translates never overlap.
    """
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    dimension: int = Field(..., ge=1, le=2)
    mesh: int = Field(..., ge=1, description="Samples per unit cell per axis (h = 1/m)")
    rho_plus: FloatArray
    rho_bump: FloatArray
    disorder: DisorderLaw
    rho_lower: Optional[float] = Field(None, description="Declared essential infimum rho_*")
    rho_upper: Optional[float] = Field(None, description="Declared essential supremum rho^*")

    @model_validator(mode="after")
    def _check_bounds(self) -> "CoefficientSpec":
        shape = (self.mesh,) * self.dimension
        if self.rho_plus.shape != shape:
            raise ConfigError(f"rho_plus must have shape {shape}, got {self.rho_plus.shape}")
        if self.rho_bump.shape != shape:
            raise ConfigError(
                f"rho_bump must be supported inside one unit cell (shape {shape}), got {self.rho_bump.shape}"
            )
        if not (np.all(np.isfinite(self.rho_plus)) and np.all(np.isfinite(self.rho_bump))):
            raise ConfigError("rho_plus and rho_bump must be finite")

        lower, upper = self.rho_lower, self.rho_upper
        for omega in self.disorder.support:
            values = self.rho_plus + omega * self.rho_bump
            lo_idx = np.unravel_index(np.argmin(values), shape)
            hi_idx = np.unravel_index(np.argmax(values), shape)
            if values[lo_idx] <= 0.0:
                raise ConfigError(
                    f"field is nonpositive ({values[lo_idx]:g}) at grid point {tuple(map(int, lo_idx))} for omega={omega:g}"
                )
            if lower is not None and values[lo_idx] < lower - _BOUND_TOL:
                raise ConfigError(
                    f"field {values[lo_idx]:g} < rho_lower={lower:g} at grid point {tuple(map(int, lo_idx))} for omega={omega:g}"
                )
            if upper is not None and values[hi_idx] > upper + _BOUND_TOL:
                raise ConfigError(
                    f"field {values[hi_idx]:g} > rho_upper={upper:g} at grid point {tuple(map(int, hi_idx))} for omega={omega:g}"
                )
        return self

    @property
    def lower_bound(self) -> float:
        """rho_*: the declared bound, else the minimum over grid and support."""
        if self.rho_lower is not None:
            return self.rho_lower
        return float(min(np.min(self.rho_plus + w * self.rho_bump) for w in self.disorder.support))

    @property
    def upper_bound(self) -> float:
        if self.rho_upper is not None:
            return self.rho_upper
        return float(max(np.max(self.rho_plus + w * self.rho_bump) for w in self.disorder.support))

    @property
    def h(self) -> float:
        return 1.0 / self.mesh


class Realization(BaseModel):
    """One draw of the site variables omega_gamma for gamma in the box Lambda_n."""
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    n: int = Field(..., ge=0)
    omega: FloatArray
    master_seed: int
    sample_index: int = Field(..., ge=0)

    @property
    def extent(self) -> int:
        return 2 * self.n + 1


class FieldKind(str, Enum):
    REALIZED = "realized"
    PERIODIZED = "periodized"
    HOMOGENIZED_MEAN = "homogenized-mean"
    HOMOGENIZED_HARMONIC = "homogenized-harmonic"
    RECIPROCAL = "reciprocal"


class FieldOnGrid(BaseModel):
    """
    A coefficient field sampled at cell centres of a box of extent_cells unit
    cells per axis, m samples per cell per axis.

    period_cells is the field's own period in unit cells (None when the field is
    a bare restriction to the box and has no periodic meaning).
    """
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    dimension: int = Field(..., ge=1, le=2)
    mesh: int = Field(..., ge=1)
    extent_cells: int = Field(..., ge=1)
    values: FloatArray
    kind: FieldKind
    rho_lower: float
    rho_upper: float
    period_cells: Optional[int] = None
    n: Optional[int] = None
    seed: Optional[int] = None
    sample_index: Optional[int] = None

    @model_validator(mode="after")
    def _check(self) -> "FieldOnGrid":
        shape = (self.mesh * self.extent_cells,) * self.dimension
        if self.values.shape != shape:
            raise InvariantViolation(f"field values must have shape {shape}, got {self.values.shape}")
        tol = _BOUND_TOL * max(1.0, abs(self.rho_upper))
        if np.any(self.values < self.rho_lower - tol) or np.any(self.values > self.rho_upper + tol):
            bad = np.unravel_index(
                np.argmax((self.values < self.rho_lower - tol) | (self.values > self.rho_upper + tol)), shape
            )
            raise InvariantViolation(
                f"{self.kind.value} field value {self.values[bad]:g} at grid point {tuple(map(int, bad))} "
                f"outside [{self.rho_lower:g}, {self.rho_upper:g}]"
            )
        return self

    @property
    def h(self) -> float:
        return 1.0 / self.mesh

    @property
    def cells_per_axis(self) -> int:
        return self.mesh * self.extent_cells

    @property
    def volume(self) -> float:
        """Continuum volume of the box."""
        return float(self.extent_cells ** self.dimension)

    @property
    def is_periodic_on_box(self) -> bool:
        return self.period_cells is not None and self.extent_cells % self.period_cells == 0

    def tile(self, reps: int) -> "FieldOnGrid":
        """Periodic extension to reps x reps(...) copies of the box."""
        if not self.is_periodic_on_box:
            raise InvariantViolation(f"cannot tile a {self.kind.value} field without a period")
        return self.model_copy(
            update={
                "values": np.tile(self.values, (reps,) * self.dimension),
                "extent_cells": self.extent_cells * reps,
            }
        )

    def cell_centers(self) -> List[np.ndarray]:
        """Coordinates of the sample points along each axis, box centred at the origin."""
        half = self.extent_cells / 2.0
        axis = -half + (np.arange(self.cells_per_axis) + 0.5) * self.h
        return [axis] * self.dimension

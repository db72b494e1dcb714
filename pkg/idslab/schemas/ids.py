"""Schemas for integrated-density-of-states estimates."""

import math
from typing import ClassVar, List, Literal, Optional, Tuple

import numpy as np
from pydantic import BaseModel, Field, model_validator
from scipy.stats import norm

from idslab.core.errors import InvariantViolation, RangeError

_MONO_TOL = 1e-12


class IdsMetadata(BaseModel):
    """Provenance of an IdsCurve."""
    method: str = Field(..., description="finite-volume, floquet, homogenized or homogenized-harmonic")
    bc: str
    dimension: int
    mesh: int
    n: Optional[int] = None
    extent_cells: int
    samples: int = 1
    seed: Optional[int] = None
    theta_nodes: Optional[int] = None
    n_dof: Optional[int] = None
    failed_samples: List[int] = Field(default_factory=list)


class IdsCurve(BaseModel):
    """N(E) on an ascending energy grid, with per-point standard errors."""
    energies: List[float]
    values: List[float]
    stderr: List[float]
    metadata: IdsMetadata

    @model_validator(mode="after")
    def _check(self) -> "IdsCurve":
        if not (len(self.energies) == len(self.values) == len(self.stderr)):
            raise InvariantViolation("energies, values and stderr must have equal length")
        e = np.asarray(self.energies)
        v = np.asarray(self.values)
        if e.size and np.any(np.diff(e) <= 0.0):
            raise InvariantViolation("IDS energies must be strictly ascending")
        if np.any(v < 0.0):
            raise InvariantViolation("IDS values must be nonnegative")
        if v.size and np.any(np.diff(v) < -_MONO_TOL * max(1.0, float(v.max()))):
            raise InvariantViolation(f"{self.metadata.method} IDS is not nondecreasing in E")
        if any(s < 0.0 for s in self.stderr):
            raise InvariantViolation("standard errors must be nonnegative")
        n_dof = self.metadata.n_dof
        if n_dof is not None and v.size:
            top = n_dof / float(self.metadata.extent_cells ** self.metadata.dimension)
            if v.max() > top * (1.0 + 1e-12):
                raise InvariantViolation(f"IDS value {v.max():g} exceeds N_dof/vol = {top:g}")
        return self

    def point_at(self, energy: float) -> Tuple[float, float]:
        """(N, stderr) at a grid energy; exact lookup, no interpolation."""
        try:
            idx = self.energies.index(energy)
        except ValueError:
            raise RangeError(f"IDS curve has no value at E={energy:g}") from None
        return self.values[idx], self.stderr[idx]


class TestFunction(BaseModel):
    """
    Smooth test function phi for <phi, dN>.

    gaussian: normalized Gaussian bump at center with width sigma, truncated at
    6 sigma and renormalized so that its integral is 1.
    mollified-indicator: indicator of [lower, upper] convolved with a Gaussian of
    width sigma; its integral is upper - lower.
    """
    __test__: ClassVar[bool] = False

    shape: Literal["gaussian", "mollified-indicator"] = "gaussian"
    center: float
    width: float = Field(..., gt=0.0)
    half_length: float = Field(0.0, ge=0.0, description="Half length of the indicator window")

    TRUNCATION: ClassVar[float] = 6.0

    @classmethod
    def gaussian(cls, center: float, width: float) -> "TestFunction":
        return cls(shape="gaussian", center=center, width=width)

    @classmethod
    def indicator(cls, lower: float, upper: float, width: float) -> "TestFunction":
        return cls(
            shape="mollified-indicator",
            center=0.5 * (lower + upper),
            width=width,
            half_length=0.5 * (upper - lower),
        )

    @property
    def support(self) -> tuple:
        reach = self.half_length + self.TRUNCATION * self.width
        return self.center - reach, self.center + reach

    def __call__(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        lo, hi = self.support
        inside = (x >= lo) & (x <= hi)
        if self.shape == "gaussian":
            mass = math.erf(self.TRUNCATION / math.sqrt(2.0))
            values = norm.pdf(x, loc=self.center, scale=self.width) / mass
        else:
            a = self.center - self.half_length
            b = self.center + self.half_length
            values = norm.cdf((x - a) / self.width) - norm.cdf((x - b) / self.width)
        return np.where(inside, values, 0.0)


class SmoothedDos(BaseModel):
    """Estimate of <phi, dN> on one box size."""
    value: float
    stderr: float = Field(..., ge=0.0)
    samples: int
    n: int
    bc: str
    median_spacing: Optional[float] = None
    resolved: bool = True


class BandStructure(BaseModel):
    """Band functions E_k(theta) on a midpoint theta grid (1D: one angle per node)."""
    thetas: List[List[float]]
    bands: List[List[float]] = Field(..., description="bands[node][k], ascending in k")
    lipschitz: Optional[float] = Field(None, description="max |E_k(theta') - E_k(theta)| / |theta' - theta| along axis 0")
    extent_cells: int
    dimension: int

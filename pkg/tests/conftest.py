"""Shared fixtures: isolated settings and the standard coefficient specs."""

import numpy as np
import pytest

from idslab.core.config import Settings
from idslab.schemas.field import BernoulliLaw, CoefficientSpec, UniformLaw


def make_spec(
    plus=1.0,
    bump=0.0,
    law=None,
    mesh: int = 4,
    dimension: int = 1,
    **bounds,
) -> CoefficientSpec:
    shape = (mesh,) * dimension
    return CoefficientSpec(
        dimension=dimension,
        mesh=mesh,
        rho_plus=np.broadcast_to(np.asarray(plus, dtype=float), shape),
        rho_bump=np.broadcast_to(np.asarray(bump, dtype=float), shape),
        disorder=law or BernoulliLaw(p=1.0, v0=0.0, v1=0.0),
        **bounds,
    )


@pytest.fixture
def settings(tmp_path) -> Settings:
    return Settings(OUTPUT_DIR=str(tmp_path / "out"), WORKERS=1)


@pytest.fixture
def free_spec() -> CoefficientSpec:
    """rho = 1, no disorder."""
    return make_spec()


@pytest.fixture
def bernoulli_spec() -> CoefficientSpec:
    """rho = 1 + omega on each cell, omega ~ Bernoulli(1/2) on {0, 1}."""
    return make_spec(plus=1.0, bump=1.0, law=BernoulliLaw(p=0.5))


@pytest.fixture
def half_bernoulli_spec() -> CoefficientSpec:
    """rho = 1 + omega, omega ~ Bernoulli(1/2) on {0, 1/2}."""
    return make_spec(plus=1.0, bump=1.0, law=BernoulliLaw(p=0.5, v0=0.0, v1=0.5))


@pytest.fixture
def uniform_spec() -> CoefficientSpec:
    return make_spec(plus=1.0, bump=1.0, law=UniformLaw(a=0.0, b=1.0))


@pytest.fixture
def two_phase_spec() -> CoefficientSpec:
    """Periodic two-phase background {1, 2} along the cell, no disorder."""
    values = np.where((np.arange(8) + 0.5) / 8 < 0.5, 1.0, 2.0)
    return make_spec(plus=values, mesh=8)

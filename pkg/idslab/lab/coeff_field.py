"""
Anderson-type coefficient fields: sampling, periodization and averaging.

A box of radius n holds (2n+1)^d unit cells; each cell carries m^d samples.
Cell gamma contributes rho_plus + omega_gamma * rho_bump on its own samples,
which is the whole sum over translates because the bump lives in one cell.
"""

from typing import Optional, Tuple

import numpy as np

from idslab.core.config import Settings, settings as default_settings
from idslab.core.errors import ConfigError, DomainError
from idslab.core.logging import get_logger
from idslab.schemas.field import (
    BernoulliLaw,
    CoefficientSpec,
    FieldKind,
    FieldOnGrid,
    Realization,
    UniformLaw,
)

logger = get_logger("coeff_field")


def site_uniforms(master_seed: int, sample_index: int, count: int) -> np.ndarray:
    """
    Counter-based uniforms for one realization.

    Philox is keyed by (master_seed, sample_index); site k of the box reads
    counter position k, so a sample never depends on which worker draws it or
    on how many samples were drawn before it.
    """
    key = np.array([master_seed, sample_index], dtype=np.uint64)
    generator = np.random.Generator(np.random.Philox(key=key))
    return generator.random(count)


def check_box_size(spec: CoefficientSpec, n: int, config: Settings) -> None:
    if n < 0:
        raise ConfigError(f"box radius n must be >= 0, got {n}")
    cells = spec.mesh * (2 * n + 1)
    if cells > config.MAX_CELLS_PER_AXIS:
        raise ConfigError(
            f"m*(2n+1) = {cells} grid cells per axis exceeds the cap {config.MAX_CELLS_PER_AXIS}"
        )


def _box_field(spec: CoefficientSpec, omega: np.ndarray) -> np.ndarray:
    reps = omega.shape[0]
    background = np.tile(spec.rho_plus, (reps,) * spec.dimension)
    return background + np.kron(omega, spec.rho_bump)


def sample_field(
    spec: CoefficientSpec,
    n: int,
    seed: int,
    idx: int,
    config: Optional[Settings] = None,
) -> Tuple[Realization, FieldOnGrid]:
    """Draw omega on Lambda_n and evaluate the field at every sample point of the box."""
    config = config or default_settings
    check_box_size(spec, n, config)
    extent = 2 * n + 1
    shape = (extent,) * spec.dimension
    u = site_uniforms(seed, idx, extent ** spec.dimension).reshape(shape)
    omega = spec.disorder.draw(u)
    realization = Realization(n=n, omega=omega, master_seed=seed, sample_index=idx)
    field = FieldOnGrid(
        dimension=spec.dimension,
        mesh=spec.mesh,
        extent_cells=extent,
        values=_box_field(spec, omega),
        kind=FieldKind.REALIZED,
        rho_lower=spec.lower_bound,
        rho_upper=spec.upper_bound,
        n=n,
        seed=seed,
        sample_index=idx,
    )
    logger.debug("sampled n=%d seed=%d idx=%d mean=%.6g", n, seed, idx, float(field.values.mean()))
    return realization, field


def periodize(realization: Realization, spec: CoefficientSpec) -> FieldOnGrid:
    """
    The (2n+1)Z^d-periodic field built from one realization, on its fundamental domain.

    Translates by (2n+1)Z^d of a bump supported in one cell land in distinct
    cells, so periodic copies never overlap.
    """
    extent = realization.extent
    if realization.omega.shape != (extent,) * spec.dimension:
        raise ConfigError(
            f"realization of shape {realization.omega.shape} does not match a d={spec.dimension} box of radius {realization.n}"
        )
    if spec.rho_bump.shape != (spec.mesh,) * spec.dimension:
        raise ConfigError("periodized bumps overlap: rho_bump support exceeds one unit cell")
    return FieldOnGrid(
        dimension=spec.dimension,
        mesh=spec.mesh,
        extent_cells=extent,
        values=_box_field(spec, realization.omega),
        kind=FieldKind.PERIODIZED,
        rho_lower=spec.lower_bound,
        rho_upper=spec.upper_bound,
        period_cells=extent,
        n=realization.n,
        seed=realization.master_seed,
        sample_index=realization.sample_index,
    )


def mean_field(spec: CoefficientSpec) -> FieldOnGrid:
    """rho_bar = rho_plus + E(omega) rho_bump on one unit cell."""
    return FieldOnGrid(
        dimension=spec.dimension,
        mesh=spec.mesh,
        extent_cells=1,
        values=spec.rho_plus + spec.disorder.mean * spec.rho_bump,
        kind=FieldKind.HOMOGENIZED_MEAN,
        rho_lower=spec.lower_bound,
        rho_upper=spec.upper_bound,
        period_cells=1,
        n=0,
    )


def _mean_reciprocal(spec: CoefficientSpec) -> np.ndarray:
    plus, bump = spec.rho_plus, spec.rho_bump
    law = spec.disorder
    if isinstance(law, BernoulliLaw):
        return law.p / (plus + law.v1 * bump) + (1.0 - law.p) / (plus + law.v0 * bump)
    assert isinstance(law, UniformLaw)
    if law.b == law.a:
        return 1.0 / (plus + law.a * bump)
    # E[1/(plus + w bump)] for w ~ U(a, b); the bump-free points reduce to 1/plus
    width = law.b - law.a
    safe = np.where(bump == 0.0, 1.0, bump)
    integrated = np.log((plus + law.b * safe) / (plus + law.a * safe)) / (width * safe)
    return np.where(bump == 0.0, 1.0 / plus, integrated)


def harmonic_mean_field(spec: CoefficientSpec) -> FieldOnGrid:
    """Pointwise 1 / E[1 / rho_omega(x)] on one unit cell."""
    return FieldOnGrid(
        dimension=spec.dimension,
        mesh=spec.mesh,
        extent_cells=1,
        values=1.0 / _mean_reciprocal(spec),
        kind=FieldKind.HOMOGENIZED_HARMONIC,
        rho_lower=spec.lower_bound,
        rho_upper=spec.upper_bound,
        period_cells=1,
        n=0,
    )


def reciprocal_field(field: FieldOnGrid) -> FieldOnGrid:
    """1/rho pointwise, switching between the rho and 1/rho operator conventions."""
    if np.any(field.values <= 0.0):
        bad = np.unravel_index(np.argmax(field.values <= 0.0), field.values.shape)
        raise DomainError(f"cannot invert nonpositive field value at grid point {tuple(map(int, bad))}")
    return field.model_copy(
        update={
            "values": 1.0 / field.values,
            "kind": FieldKind.RECIPROCAL,
            "rho_lower": 1.0 / field.rho_upper,
            "rho_upper": 1.0 / field.rho_lower,
        }
    )


def tiled_mean(spec: CoefficientSpec, extent: int, harmonic: bool = False) -> FieldOnGrid:
    """The homogenized comparison field tiled over a box of `extent` cells."""
    base = harmonic_mean_field(spec) if harmonic else mean_field(spec)
    return base.tile(extent)

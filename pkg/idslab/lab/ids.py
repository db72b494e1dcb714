"""
Integrated density of states, three ways.

finite-volume  Monte Carlo mean of box eigenvalue counts per unit volume
floquet        midpoint average of Floquet fiber counts for a periodic field
homogenized    floquet applied to the mean (or harmonic-mean) field

Counts are divided by the continuum volume extent^d, never by the dof count,
so curves at different mesh widths are comparable.
"""

import math
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np

from idslab.core.config import Settings, settings as default_settings
from idslab.core.errors import ComputationError, ConfigError, DomainError, IdsLabError, RangeError
from idslab.core.logging import get_logger
from idslab.core.parallel import run_tasks
from idslab.lab.coeff_field import check_box_size, periodize, sample_field, tiled_mean
from idslab.lab.discretize import assemble
from idslab.lab.spectral import eigen_counts, full_spectrum, lowest_eigenpairs
from idslab.schemas.field import CoefficientSpec, FieldOnGrid
from idslab.schemas.ids import BandStructure, IdsCurve, IdsMetadata, SmoothedDos, TestFunction
from idslab.schemas.operator import BoundaryCondition

logger = get_logger("ids")


def energy_grid(e_min: float, e_max: float, per_decade: Optional[int] = None, config: Optional[Settings] = None) -> List[float]:
    """Geometric grid from e_min to e_max, refined toward zero."""
    config = config or default_settings
    per_decade = per_decade or config.ENERGIES_PER_DECADE
    if not (0.0 < e_min < e_max):
        raise ConfigError(f"energy grid needs 0 < e_min < e_max, got {e_min}, {e_max}")
    points = max(2, int(math.ceil(per_decade * math.log10(e_max / e_min))) + 1)
    return [float(e) for e in np.geomspace(e_min, e_max, points)]


def free_ids(energies, dimension: int, c: float = 1.0) -> np.ndarray:
    """IDS of -c*Laplacian in the continuum: sqrt(E/c)/pi in 1D, E/(4 pi c) in 2D."""
    e = np.clip(np.asarray(energies, dtype=float), 0.0, None)
    if dimension == 1:
        return np.sqrt(e / c) / math.pi
    if dimension == 2:
        return e / (4.0 * math.pi * c)
    raise ConfigError(f"no closed form for d={dimension}")


def _check_energies(energies: Sequence[float]) -> np.ndarray:
    e = np.asarray(energies, dtype=float)
    if e.ndim != 1 or e.size == 0:
        raise ConfigError("need a nonempty list of energies")
    if not np.all(np.isfinite(e)) or np.any(np.diff(e) <= 0.0):
        raise ConfigError("energies must be finite and strictly ascending")
    return e


def mean_and_stderr(rows: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """Sample mean and standard error along axis 0; exactly zero error where all rows agree."""
    constant = np.all(rows == rows[0], axis=0)
    mean = np.where(constant, rows[0], rows.mean(axis=0))
    if rows.shape[0] < 2:
        return mean, np.zeros(rows.shape[1])
    stderr = rows.std(axis=0, ddof=1) / math.sqrt(rows.shape[0])
    return mean, np.where(constant, 0.0, stderr)


def box_field(spec: CoefficientSpec, n: int, bc: BoundaryCondition, seed: int, idx: int, config: Settings) -> FieldOnGrid:
    """The field a finite-volume sample is assembled from: periodized when the bc wraps."""
    realization, field = sample_field(spec, n, seed, idx, config)
    if bc.wraps:
        return periodize(realization, spec)
    return field


def _sample_counts(task) -> Tuple[int, Optional[np.ndarray], Optional[int], Optional[str]]:
    spec, n, bc, energies, seed, idx, averaging, config = task
    try:
        field = box_field(spec, n, bc, seed, idx, config)
        stiffness = assemble(field, bc, averaging)
        return idx, eigen_counts(stiffness, energies, config), stiffness.n_dof, None
    except ConfigError:
        raise
    except IdsLabError as exc:
        return idx, None, None, str(exc)


def finite_volume_ids(
    spec: CoefficientSpec,
    n: int,
    bc: BoundaryCondition,
    energies: Sequence[float],
    samples: int = 1,
    seed: int = 0,
    workers: Optional[int] = None,
    averaging: str = "arithmetic",
    config: Optional[Settings] = None,
) -> IdsCurve:
    """Mean and standard error over samples of N_Lambda(E) = count(E) / (2n+1)^d."""
    config = config or default_settings
    if samples < 1:
        raise ConfigError(f"samples must be >= 1, got {samples}")
    check_box_size(spec, n, config)
    e = _check_energies(energies)
    tasks = [(spec, n, bc, e, seed, idx, averaging, config) for idx in range(samples)]
    results = run_tasks(_sample_counts, tasks, workers, config)

    failed = [idx for idx, counts, _, _ in results if counts is None]
    for idx, counts, _, message in results:
        if counts is None:
            logger.warning("sample seed=%d idx=%d aborted: %s", seed, idx, message)
    kept = [counts for _, counts, _, _ in results if counts is not None]
    if not kept:
        raise ComputationError(f"all {samples} finite-volume samples failed (seed={seed})")
    n_dof = next(dof for _, counts, dof, _ in results if counts is not None)

    volume = float((2 * n + 1) ** spec.dimension)
    rows = np.vstack(kept).astype(float) / volume
    mean, stderr = mean_and_stderr(rows)
    return IdsCurve(
        energies=e.tolist(),
        values=mean.tolist(),
        stderr=stderr.tolist(),
        metadata=IdsMetadata(
            method="finite-volume",
            bc=bc.tag.value,
            dimension=spec.dimension,
            mesh=spec.mesh,
            n=n,
            extent_cells=2 * n + 1,
            samples=len(kept),
            seed=seed,
            n_dof=n_dof,
            failed_samples=failed,
        ),
    )


def theta_grid(nodes: int, dimension: int) -> np.ndarray:
    """
    Midpoint nodes 2 pi (k + 1/2) / K on [0, 2 pi)^d, shape (K^d, d).

    A single node per axis is theta = 0, the periodic operator.
    """
    if nodes < 1:
        raise ConfigError(f"theta_nodes must be >= 1, got {nodes}")
    if nodes == 1:
        return np.zeros((1, dimension))
    axis = 2.0 * math.pi * (np.arange(nodes) + 0.5) / nodes
    mesh = np.meshgrid(*([axis] * dimension), indexing="ij")
    return np.stack([m.ravel() for m in mesh], axis=1)


def _fiber_counts(task) -> np.ndarray:
    field, theta, energies, averaging, config = task
    stiffness = assemble(field, BoundaryCondition.floquet(*theta), averaging)
    return eigen_counts(stiffness, energies, config)


def _floquet_average(
    field: FieldOnGrid,
    energies: np.ndarray,
    nodes: int,
    averaging: str,
    workers: Optional[int],
    config: Settings,
) -> np.ndarray:
    thetas = theta_grid(nodes, field.dimension)
    tasks = [(field, tuple(theta), energies, averaging, config) for theta in thetas]
    counts = np.vstack(run_tasks(_fiber_counts, tasks, workers, config)).astype(float)
    return counts.mean(axis=0) / field.volume


def floquet_ids(
    field: FieldOnGrid,
    energies: Sequence[float],
    theta_nodes: Optional[int] = None,
    workers: Optional[int] = None,
    averaging: str = "arithmetic",
    config: Optional[Settings] = None,
    method: str = "floquet",
) -> IdsCurve:
    """
    N(E) = vol^-1 * mean over the theta grid of #{E_k(theta) <= E}.

    With theta_nodes=None the node count per axis starts at THETA_START and
    doubles until no positive value moves by more than THETA_REL_TOL, or until
    THETA_CAP.
    """
    config = config or default_settings
    if not field.is_periodic_on_box:
        raise DomainError(f"floquet IDS needs a field periodic on its box, got a {field.kind.value} field")
    e = _check_energies(energies)

    if theta_nodes is not None:
        nodes = theta_nodes
        values = _floquet_average(field, e, nodes, averaging, workers, config)
    else:
        nodes = config.THETA_START
        values = _floquet_average(field, e, nodes, averaging, workers, config)
        while True:
            if nodes * 2 > config.THETA_CAP:
                logger.warning("theta refinement hit the cap of %d nodes per axis", config.THETA_CAP)
                break
            refined = _floquet_average(field, e, nodes * 2, averaging, workers, config)
            nodes *= 2
            positive = refined > 0.0
            change = np.max(np.abs(refined - values)[positive] / refined[positive]) if positive.any() else 0.0
            values = refined
            logger.debug("theta nodes=%d relative change %.3g", nodes, change)
            if change < config.THETA_REL_TOL:
                break

    n_dof = field.cells_per_axis ** field.dimension
    return IdsCurve(
        energies=e.tolist(),
        values=values.tolist(),
        stderr=[0.0] * e.size,
        metadata=IdsMetadata(
            method=method,
            bc="floquet",
            dimension=field.dimension,
            mesh=field.mesh,
            n=field.n,
            extent_cells=field.extent_cells,
            samples=1,
            seed=field.seed,
            theta_nodes=nodes,
            n_dof=n_dof,
        ),
    )


def homogenized_ids(
    spec: CoefficientSpec,
    energies: Sequence[float],
    theta_nodes: Optional[int] = None,
    harmonic: bool = False,
    supercell: int = 1,
    workers: Optional[int] = None,
    config: Optional[Settings] = None,
) -> IdsCurve:
    """
    Floquet IDS of -div(rho_bar grad) with rho_bar = E(rho_omega), or the
    pointwise harmonic mean when `harmonic` is set. The one-cell field may be
    tiled into a supercell; the IDS is unchanged but the theta average resolves
    small energies far better.
    """
    if supercell < 1:
        raise ConfigError(f"supercell must be >= 1, got {supercell}")
    field = tiled_mean(spec, supercell, harmonic=harmonic)
    method = "homogenized-harmonic" if harmonic else "homogenized"
    return floquet_ids(field, energies, theta_nodes, workers, config=config, method=method)


def interpolate_ids(curve: IdsCurve, energies) -> np.ndarray:
    """
    Monotone piecewise-linear interpolation with the anchor N(0) = 0 when the
    grid starts above zero. Energies <= 0 map to 0; energies above the grid
    raise RangeError.
    """
    e = np.asarray(energies, dtype=float)
    grid = np.asarray(curve.energies, dtype=float)
    values = np.asarray(curve.values, dtype=float)
    if grid[0] > 0.0:
        grid = np.concatenate([[0.0], grid])
        values = np.concatenate([[0.0], values])
    values = np.maximum.accumulate(values)
    if np.any(e > grid[-1] * (1.0 + 1e-12)):
        raise RangeError(f"energy {float(np.max(e)):g} above the curve's range (max {grid[-1]:g})")
    return np.where(e > 0.0, np.interp(e, grid, values), 0.0)


def _spacing_near(eigenvalues: np.ndarray, center: float, neighbours: int = 10) -> Optional[float]:
    if eigenvalues.size < 2:
        return None
    closest = np.sort(eigenvalues[np.argsort(np.abs(eigenvalues - center))[: neighbours + 1]])
    gaps = np.diff(closest)
    return float(np.median(gaps)) if gaps.size else None


def _sample_dos(task) -> Tuple[int, Optional[float], Optional[float], Optional[str]]:
    source, phi, n, bc, seed, idx, config = task
    try:
        if isinstance(source, FieldOnGrid):
            field = source
        else:
            field = box_field(source, n, bc, seed, idx, config)
        eigenvalues = full_spectrum(assemble(field, bc), config)
        value = float(np.sum(phi(eigenvalues))) / field.volume
        return idx, value, _spacing_near(eigenvalues, phi.center), None
    except ConfigError:
        raise
    except IdsLabError as exc:
        return idx, None, None, str(exc)


def smoothed_dos(
    source: Union[CoefficientSpec, FieldOnGrid],
    phi: TestFunction,
    n: int = 0,
    samples: int = 1,
    bc: Optional[BoundaryCondition] = None,
    seed: int = 0,
    workers: Optional[int] = None,
    config: Optional[Settings] = None,
) -> SmoothedDos:
    """
    <phi, dN> on one box: vol^-1 * sum_j phi(lambda_j), averaged over samples
    when `source` is a coefficient law. A fixed field is evaluated once.
    """
    config = config or default_settings
    bc = bc or BoundaryCondition.dirichlet()
    if isinstance(source, FieldOnGrid):
        samples = 1
        n = source.n if source.n is not None else n
    tasks = [(source, phi, n, bc, seed, idx, config) for idx in range(samples)]
    results = run_tasks(_sample_dos, tasks, workers, config)

    errors = [message for _, value, _, message in results if value is None]
    if errors:
        # size-cap and assembly failures hit every sample alike
        raise ComputationError(f"smoothed DOS failed: {errors[0]}")
    values = np.array([[value] for _, value, _, _ in results])
    mean, stderr = mean_and_stderr(values)

    spacings = [s for _, _, s, _ in results if s is not None]
    median_spacing = float(np.median(spacings)) if spacings else None
    resolved = median_spacing is None or phi.width >= 3.0 * median_spacing
    if not resolved:
        logger.warning(
            "test function width %.3g is below 3x the level spacing %.3g near E=%.3g",
            phi.width, median_spacing, phi.center,
        )
    return SmoothedDos(
        value=float(mean[0]),
        stderr=float(stderr[0]),
        samples=samples,
        n=n,
        bc=bc.tag.value,
        median_spacing=median_spacing,
        resolved=resolved,
    )


def _fiber_bands(task) -> np.ndarray:
    field, theta, bands, averaging, config = task
    stiffness = assemble(field, BoundaryCondition.floquet(*theta), averaging)
    return lowest_eigenpairs(stiffness, min(bands, stiffness.n_dof), config).eigenvalues


def band_structure(
    field: FieldOnGrid,
    theta_nodes: int,
    bands: int,
    workers: Optional[int] = None,
    averaging: str = "arithmetic",
    config: Optional[Settings] = None,
) -> BandStructure:
    """
    Lowest `bands` Floquet eigenvalues at every midpoint theta node, with the
    largest observed slope |E_k(theta') - E_k(theta)| / |theta' - theta| between
    neighbouring nodes along axis 0.
    """
    config = config or default_settings
    if not field.is_periodic_on_box:
        raise DomainError(f"band structure needs a field periodic on its box, got a {field.kind.value} field")
    if bands < 1:
        raise ConfigError(f"bands must be >= 1, got {bands}")
    thetas = theta_grid(theta_nodes, field.dimension)
    tasks = [(field, tuple(theta), bands, averaging, config) for theta in thetas]
    energies = np.vstack(run_tasks(_fiber_bands, tasks, workers, config))

    lipschitz = None
    if theta_nodes > 1:
        step = 2.0 * math.pi / theta_nodes
        grid = energies.reshape((theta_nodes,) * field.dimension + (energies.shape[1],))
        lipschitz = float(np.max(np.abs(np.diff(grid, axis=0))) / step)
    return BandStructure(
        thetas=thetas.tolist(),
        bands=energies.tolist(),
        lipschitz=lipschitz,
        extent_cells=field.extent_cells,
        dimension=field.dimension,
    )

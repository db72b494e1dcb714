"""
Monte Carlo frequency of the deviation event on a low-kinetic-energy subspace.

For each trial the periodized field rho^n_omega is compared with the tiled
mean field through B = A(rho^n_omega) - A(rho_bar), which is the discrete
form sum_i <(rho^n_omega - rho_bar) d_i u, d_i u> because assembly is linear
in the face coefficients. B is restricted to the span of the Laplacian
eigenvectors with eigenvalue <= cutoff * E * rho_bound; a trial hits when
the spectral radius of the restriction reaches E^alpha. Any hit exhibits a
test vector in the event, so the frequency bounds its probability from below.
"""

import math
from typing import List, Optional, Sequence, Tuple

import numpy as np
import scipy.linalg as la
from scipy.stats import beta

from idslab.core.config import Settings, settings as default_settings
from idslab.core.errors import ConfigError
from idslab.core.logging import get_logger
from idslab.core.parallel import run_tasks
from idslab.lab.coeff_field import check_box_size, periodize, sample_field, tiled_mean
from idslab.lab.discretize import assemble
from idslab.lab.large_deviations import ld_rate
from idslab.lab.spectral import eigen_count, lowest_eigenpairs
from idslab.schemas.field import CoefficientSpec, FieldKind, FieldOnGrid
from idslab.schemas.operator import BoundaryCondition
from idslab.schemas.reports import DeviationEstimate

logger = get_logger("deviation")

CONFIDENCE = 0.95
TRIALS_PER_TASK = 250


def clopper_pearson(hits: int, trials: int, confidence: float = CONFIDENCE) -> Tuple[float, float]:
    """Exact binomial interval for hits/trials."""
    if trials < 1:
        return 0.0, 1.0
    tail = 0.5 * (1.0 - confidence)
    lower = 0.0 if hits == 0 else float(beta.ppf(tail, hits, trials - hits + 1))
    upper = 1.0 if hits == trials else float(beta.ppf(1.0 - tail, hits + 1, trials - hits))
    return lower, upper


def _unit_field(dimension: int, mesh: int, extent: int) -> FieldOnGrid:
    return FieldOnGrid(
        dimension=dimension,
        mesh=mesh,
        extent_cells=extent,
        values=np.ones((mesh * extent,) * dimension),
        kind=FieldKind.HOMOGENIZED_MEAN,
        rho_lower=1.0,
        rho_upper=1.0,
        period_cells=1,
    )


def low_energy_subspace(
    spec: CoefficientSpec,
    n: int,
    bc: BoundaryCondition,
    level: float,
    config: Settings,
) -> np.ndarray:
    """
    Orthonormal columns spanning the Laplacian eigenvectors with eigenvalue
    <= level. Counting is inclusive, so degenerate clusters stay whole.
    """
    laplacian = assemble(_unit_field(spec.dimension, spec.mesh, 2 * n + 1), bc)
    k = eigen_count(laplacian, level, config)
    if k == 0:
        return np.zeros((laplacian.n_dof, 0))
    return lowest_eigenpairs(laplacian, k, config).eigenvectors


def _trial_radii(task) -> List[float]:
    spec, n, bc, basis, mean_matrix, seed, start, stop, config = task
    radii = []
    for idx in range(start, stop):
        realization, _ = sample_field(spec, n, seed, idx, config)
        field = periodize(realization, spec)
        perturbation = assemble(field, bc).matrix - mean_matrix
        restricted = basis.conj().T @ (perturbation @ basis)
        restricted = 0.5 * (restricted + restricted.conj().T)
        radii.append(float(np.max(np.abs(la.eigvalsh(restricted)))))
    return radii


def deviation_event_probability(
    spec: CoefficientSpec,
    n: int,
    energy: float,
    alpha: float,
    trials: int,
    seed: int = 0,
    cutoff: float = 1.0,
    kinetic_bound: str = "upper",
    theta: Optional[Sequence[float]] = None,
    workers: Optional[int] = None,
    config: Optional[Settings] = None,
) -> DeviationEstimate:
    """
    Estimate P(spectral radius of B on the test subspace >= E^alpha).

    kinetic_bound="upper" caps the subspace at cutoff * E * rho^*;
    "lower" uses cutoff * E * rho_* for the enlarged event. A Floquet twist
    theta moves the subspace off the periodic fiber.
    """
    config = config or default_settings
    if trials < 1:
        raise ConfigError(f"trials must be >= 1, got {trials}")
    if not (0.0 < alpha < 1.0):
        raise ConfigError(f"alpha must lie in (0, 1), got {alpha}")
    if energy <= 0.0 or cutoff <= 0.0:
        raise ConfigError("energy and cutoff must be positive")
    if kinetic_bound not in ("upper", "lower"):
        raise ConfigError(f"kinetic_bound must be 'upper' or 'lower', got {kinetic_bound}")
    check_box_size(spec, n, config)

    bc = BoundaryCondition.floquet(*theta) if theta is not None else BoundaryCondition.periodic()
    bound = spec.upper_bound if kinetic_bound == "upper" else spec.lower_bound
    level = cutoff * energy * bound
    threshold = energy ** alpha
    cells = (2 * n + 1) ** spec.dimension
    reference = ld_rate(spec.disorder, threshold, cells)

    basis = low_energy_subspace(spec, n, bc, level, config)
    if basis.shape[1] == 0:
        return DeviationEstimate(
            n=n, energy=energy, alpha=alpha, trials=trials, hits=0, p_hat=0.0,
            ci_lower=0.0, ci_upper=clopper_pearson(0, trials)[1],
            subspace_dim=0, cutoff=level,
            chernoff_rate=reference.rate if math.isfinite(reference.rate) else None,
            chernoff_bound=reference.chernoff_bound,
            diagnostic=f"empty test subspace: no Laplacian eigenvalue <= {level:.4g}",
        )

    mean_matrix = assemble(tiled_mean(spec, 2 * n + 1), bc).matrix
    tasks = [
        (spec, n, bc, basis, mean_matrix, seed, start, min(start + TRIALS_PER_TASK, trials), config)
        for start in range(0, trials, TRIALS_PER_TASK)
    ]
    radii = np.concatenate([np.asarray(chunk) for chunk in run_tasks(_trial_radii, tasks, workers, config)])
    hits = int(np.count_nonzero(radii >= threshold))
    ci_lower, ci_upper = clopper_pearson(hits, trials)
    logger.info(
        "n=%d E=%.4g alpha=%.2f: %d/%d hits, max radius %.4g vs threshold %.4g (subspace dim %d)",
        n, energy, alpha, hits, trials, float(radii.max()), threshold, basis.shape[1],
    )
    return DeviationEstimate(
        n=n,
        energy=energy,
        alpha=alpha,
        trials=trials,
        hits=hits,
        p_hat=hits / trials,
        ci_lower=ci_lower,
        ci_upper=ci_upper,
        subspace_dim=int(basis.shape[1]),
        cutoff=level,
        chernoff_rate=reference.rate if math.isfinite(reference.rate) else None,
        chernoff_bound=reference.chernoff_bound,
    )

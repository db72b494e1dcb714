"""
Bracket of the IDS increment by periodic approximants:

    E[N^n(E+eps/2)] - E[N^n(E-eps/2)] - r  <=  N(E+eps) - N(E-eps)
                                           <=  E[N^n(E+2eps)] - E[N^n(E-2eps)] + r

with r = exp(-eps^-eta). The outer terms are Floquet IDS of periodized
samples, the middle one a finite-volume count on a box of radius
reference_n (4n by default) drawn with the same (seed, index). Bracket
checks use the standard error of the per-sample difference.
"""

import math
from typing import Optional, Tuple

import numpy as np

from idslab.core.config import Settings, settings as default_settings
from idslab.core.errors import ComputationError, ConfigError, IdsLabError
from idslab.core.logging import get_logger
from idslab.core.parallel import run_tasks
from idslab.lab.coeff_field import check_box_size, periodize, sample_field
from idslab.lab.discretize import assemble
from idslab.lab.ids import floquet_ids, mean_and_stderr
from idslab.lab.spectral import eigen_counts
from idslab.schemas.field import CoefficientSpec
from idslab.schemas.operator import BoundaryCondition
from idslab.schemas.reports import ApproximationReport

logger = get_logger("approximation")

PASS_SIGMAS = 3.0


def _sample_increments(task) -> Tuple[int, Optional[np.ndarray], Optional[str]]:
    spec, n, reference_n, energy, epsilon, bc, theta_nodes, seed, idx, config = task
    try:
        realization, _ = sample_field(spec, n, seed, idx, config)
        periodic = periodize(realization, spec)
        outer = floquet_ids(
            periodic,
            [energy - 2 * epsilon, energy - epsilon / 2, energy + epsilon / 2, energy + 2 * epsilon],
            theta_nodes,
            workers=1,
            config=config,
        ).values
        reference, field = sample_field(spec, reference_n, seed, idx, config)
        box = periodize(reference, spec) if bc.wraps else field
        counts = eigen_counts(assemble(box, bc), [energy - epsilon, energy + epsilon], config)
        middle = float(counts[1] - counts[0]) / box.volume
        return idx, np.array([outer[2] - outer[1], middle, outer[3] - outer[0]]), None
    except ConfigError:
        raise
    except IdsLabError as exc:
        return idx, None, str(exc)


def approximation_check(
    spec: CoefficientSpec,
    energy: float,
    epsilon: float,
    n: int,
    samples: int,
    seed: int = 0,
    bc: Optional[BoundaryCondition] = None,
    theta_nodes: Optional[int] = None,
    reference_n: Optional[int] = None,
    rho: Optional[float] = None,
    eta: Optional[float] = None,
    workers: Optional[int] = None,
    config: Optional[Settings] = None,
) -> ApproximationReport:
    """Evaluate the three increments over `samples` realizations of the box of radius n."""
    config = config or default_settings
    rho = config.APPROX_RHO if rho is None else rho
    eta = config.APPROX_ETA if eta is None else eta
    bc = bc or BoundaryCondition.dirichlet()
    if epsilon <= 0.0:
        raise ConfigError(f"epsilon must be positive, got {epsilon}")
    if samples < 1:
        raise ConfigError(f"samples must be >= 1, got {samples}")
    reference_n = max(4 * n, 1) if reference_n is None else reference_n
    check_box_size(spec, n, config)
    check_box_size(spec, reference_n, config)

    coupling = n >= epsilon ** (-rho)
    if not coupling:
        logger.warning("n=%d is below eps^-rho = %.4g; the bracket is outside its stated regime", n, epsilon ** (-rho))

    tasks = [(spec, n, reference_n, energy, epsilon, bc, theta_nodes, seed, idx, config) for idx in range(samples)]
    results = run_tasks(_sample_increments, tasks, workers, config)
    for idx, row, message in results:
        if row is None:
            logger.warning("sample seed=%d idx=%d aborted: %s", seed, idx, message)
    kept = [row for _, row, _ in results if row is not None]
    if not kept:
        raise ComputationError(f"all {samples} approximation samples failed (seed={seed})")

    rows = np.vstack(kept)
    gaps = np.column_stack([rows[:, 0] - rows[:, 1], rows[:, 1] - rows[:, 2]])
    mean, stderr = mean_and_stderr(rows)
    _, gap_stderr = mean_and_stderr(gaps)
    lower, middle, upper = (float(v) for v in mean)
    lower_se, middle_se, upper_se = (float(s) for s in stderr)
    remainder = math.exp(-(epsilon ** -eta))
    lower_slack = PASS_SIGMAS * float(gap_stderr[0])
    upper_slack = PASS_SIGMAS * float(gap_stderr[1])
    return ApproximationReport(
        energy=energy,
        epsilon=epsilon,
        n=n,
        samples=len(kept),
        lower=lower,
        middle=middle,
        upper=upper,
        lower_stderr=lower_se,
        middle_stderr=middle_se,
        upper_stderr=upper_se,
        remainder=remainder,
        width=upper - lower,
        coupling_satisfied=coupling,
        lower_holds=lower - remainder <= middle + lower_slack,
        upper_holds=middle <= upper + remainder + upper_slack,
    )

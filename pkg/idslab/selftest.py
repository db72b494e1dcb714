"""
Quick in-process checks with exact answers: degenerate laws, constant
coefficients, closed-form counts. Each check raises AssertionError on failure.
"""

from typing import Callable, List, Optional, Tuple

import numpy as np
from numpy.testing import assert_allclose, assert_array_equal

from idslab.core.config import Settings, settings as default_settings
from idslab.core.logging import get_logger
from idslab.lab.coeff_field import mean_field, periodize, reciprocal_field, sample_field
from idslab.lab.deviation import deviation_event_probability
from idslab.lab.discretize import assemble, quadratic_form
from idslab.lab.ids import finite_volume_ids
from idslab.lab.large_deviations import fit_tail_curve, ld_rate
from idslab.lab.spectral import eigen_count, full_spectrum
from idslab.schemas.field import BernoulliLaw, CoefficientSpec, UniformLaw
from idslab.schemas.operator import BoundaryCondition

logger = get_logger("selftest")

Check = Callable[[Settings], None]


def _spec(plus: float, bump: float, law, mesh: int = 4, dimension: int = 1) -> CoefficientSpec:
    shape = (mesh,) * dimension
    return CoefficientSpec(
        dimension=dimension,
        mesh=mesh,
        rho_plus=np.full(shape, plus),
        rho_bump=np.full(shape, bump),
        disorder=law,
    )


def check_bump_absent(config: Settings) -> None:
    spec = _spec(1.5, 0.0, BernoulliLaw(p=0.5))
    _, field = sample_field(spec, 3, seed=1, idx=0, config=config)
    assert_array_equal(field.values, 1.5)


def check_degenerate_law(config: Settings) -> None:
    spec = _spec(1.0, 1.0, BernoulliLaw(p=1.0))
    _, field = sample_field(spec, 2, seed=0, idx=0, config=config)
    assert_array_equal(field.values, 2.0)


def check_single_cell_periodization(config: Settings) -> None:
    spec = _spec(1.0, 1.0, BernoulliLaw(p=0.5))
    realization, _ = sample_field(spec, 0, seed=3, idx=0, config=config)
    field = periodize(realization, spec)
    assert field.period_cells == 1
    assert_array_equal(field.values, 1.0 + realization.omega[0])


def check_law_means(config: Settings) -> None:
    assert BernoulliLaw(p=0.5).mean == 0.5
    assert UniformLaw(a=1.0, b=3.0).mean == 2.0
    assert_array_equal(mean_field(_spec(1.0, 1.0, BernoulliLaw(p=0.5))).values, 1.5)


def check_reciprocal(config: Settings) -> None:
    field = mean_field(_spec(1.0, 1.0, BernoulliLaw(p=1.0)))
    assert_array_equal(reciprocal_field(field).values, 0.5)
    assert_allclose(reciprocal_field(reciprocal_field(field)).values, field.values, rtol=1e-15)


def check_dirichlet_stencil(config: Settings) -> None:
    field = mean_field(_spec(1.0, 0.0, BernoulliLaw(p=0.5), mesh=6))
    dense = assemble(field, BoundaryCondition.dirichlet()).matrix.toarray()
    h2 = (1.0 / 6.0) ** 2
    assert_allclose(np.diag(dense), 2.0 / h2)
    assert_allclose(np.diag(dense, 1), -1.0 / h2)
    assert_allclose(np.diag(dense, -1), -1.0 / h2)


def check_zero_twist(config: Settings) -> None:
    field = mean_field(_spec(1.0, 1.0, BernoulliLaw(p=0.5), mesh=5)).tile(3)
    periodic = assemble(field, BoundaryCondition.periodic()).matrix.toarray()
    twisted = assemble(field, BoundaryCondition.floquet(0.0)).matrix.toarray()
    assert_allclose(twisted, periodic, atol=0.0)


def check_quadratic_form(config: Settings) -> None:
    stiffness = assemble(mean_field(_spec(1.0, 1.0, BernoulliLaw(p=0.5))).tile(3), BoundaryCondition.periodic())
    ones = np.ones(stiffness.n_dof)
    assert abs(quadratic_form(stiffness, ones)) < 1e-9
    u = np.random.default_rng(0).standard_normal(stiffness.n_dof)
    assert_allclose(quadratic_form(stiffness, 3.0 * u), 9.0 * quadratic_form(stiffness, u), rtol=1e-12)


def check_diagonal_count(config: Settings) -> None:
    matrix = np.diag([1.0, 2.0, 3.0])
    assert eigen_count(matrix, 2.0, config) == 2
    assert eigen_count(matrix, 0.5, config) == 0


def check_periodic_ground_state(config: Settings) -> None:
    stiffness = assemble(mean_field(_spec(1.0, 0.0, BernoulliLaw(p=0.5))).tile(5), BoundaryCondition.periodic())
    assert abs(full_spectrum(stiffness, config)[0]) < 1e-9 * stiffness.norm


def check_coefficient_scaling(config: Settings) -> None:
    base = full_spectrum(assemble(mean_field(_spec(1.0, 0.0, BernoulliLaw(p=0.5))).tile(3), BoundaryCondition.dirichlet()), config)
    scaled = full_spectrum(assemble(mean_field(_spec(3.0, 0.0, BernoulliLaw(p=0.5))).tile(3), BoundaryCondition.dirichlet()), config)
    assert_allclose(scaled, 3.0 * base, rtol=1e-10)


def check_ids_degenerate(config: Settings) -> None:
    spec = _spec(1.0, 1.0, BernoulliLaw(p=1.0))
    curve = finite_volume_ids(spec, 2, BoundaryCondition.dirichlet(), [-1.0, 1.0], samples=3, workers=1, config=config)
    assert curve.values[0] == 0.0
    assert curve.stderr == [0.0, 0.0]


def check_ld_rate_trivial(config: Settings) -> None:
    assert ld_rate(BernoulliLaw(p=0.5), 0.0, 100).probability == 1.0
    assert ld_rate(BernoulliLaw(p=0.5), 0.4, 1).probability == 1.0


def check_tail_fit(config: Settings) -> None:
    energies = np.geomspace(0.02, 0.5, 8)
    fit = fit_tail_curve(energies, np.exp(-energies ** -0.5))
    assert fit.tau is not None and abs(fit.tau - 0.5) < 0.02
    flat = fit_tail_curve(energies, np.full(energies.size, 0.3))
    assert not flat.conforming


def check_deviation_degenerate(config: Settings) -> None:
    spec = _spec(1.0, 1.0, BernoulliLaw(p=1.0))
    estimate = deviation_event_probability(spec, 2, 0.1, 0.5, trials=5, workers=1, config=config)
    assert estimate.p_hat == 0.0


CHECKS: List[Tuple[str, Check]] = [
    ("bump absent gives rho_plus", check_bump_absent),
    ("degenerate Bernoulli gives a constant field", check_degenerate_law),
    ("n=0 periodization has period one", check_single_cell_periodization),
    ("law means", check_law_means),
    ("reciprocal field", check_reciprocal),
    ("Dirichlet stencil for rho=1", check_dirichlet_stencil),
    ("Floquet at theta=0 equals periodic", check_zero_twist),
    ("quadratic form kernel and homogeneity", check_quadratic_form),
    ("diagonal eigenvalue count", check_diagonal_count),
    ("periodic ground state is zero", check_periodic_ground_state),
    ("eigenvalues scale with a constant coefficient", check_coefficient_scaling),
    ("IDS below zero and degenerate stderr", check_ids_degenerate),
    ("trivial deviation probabilities", check_ld_rate_trivial),
    ("tail fit of its own model", check_tail_fit),
    ("no deviation without disorder", check_deviation_degenerate),
]


def run_selftest(config: Optional[Settings] = None) -> List[Tuple[str, bool, str]]:
    """Run every check; returns (name, passed, detail) in order."""
    config = config or default_settings
    results = []
    for name, check in CHECKS:
        try:
            check(config)
            results.append((name, True, ""))
        except AssertionError as exc:
            detail = str(exc).strip().splitlines()[0] if str(exc).strip() else "assertion failed"
            logger.error("%s: %s", name, detail)
            results.append((name, False, detail))
    return results

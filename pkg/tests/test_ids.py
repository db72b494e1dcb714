import math

import numpy as np
import pytest
import scipy.linalg as la
from numpy.testing import assert_allclose, assert_array_equal

from idslab.core.errors import ConfigError, DomainError, InvariantViolation, RangeError
from idslab.lab.coeff_field import sample_field, tiled_mean
from idslab.lab.discretize import assemble
from idslab.lab.ids import (
    band_structure,
    energy_grid,
    finite_volume_ids,
    floquet_ids,
    free_ids,
    homogenized_ids,
    interpolate_ids,
    mean_and_stderr,
    smoothed_dos,
    theta_grid,
)
from idslab.schemas.field import BernoulliLaw
from idslab.schemas.ids import IdsCurve, IdsMetadata, TestFunction
from idslab.schemas.operator import BoundaryCondition

from conftest import make_spec


def _discrete_free_ids(energy: float, mesh: int) -> float:
    """Continuum-normalized IDS of the periodic second-difference operator with h = 1/mesh."""
    h = 1.0 / mesh
    return 2.0 / (math.pi * h) * math.asin(min(1.0, h * math.sqrt(energy) / 2.0))


def test_energy_grid() -> None:
    grid = energy_grid(0.01, 1.0, per_decade=24)
    assert len(grid) == 49
    assert grid[0] == pytest.approx(0.01)
    assert grid[-1] == pytest.approx(1.0)
    assert_allclose(np.diff(np.log(grid)), math.log(10.0) / 24.0)
    with pytest.raises(ConfigError):
        energy_grid(0.0, 1.0)
    with pytest.raises(ConfigError):
        energy_grid(1.0, 0.5)


def test_free_ids_closed_forms() -> None:
    assert_allclose(free_ids([math.pi ** 2, -1.0], 1), [1.0, 0.0])
    assert_allclose(free_ids([4.0 * math.pi], 2), [1.0])
    assert_allclose(free_ids([2.0 * math.pi ** 2], 1, c=2.0), [1.0])
    with pytest.raises(ConfigError):
        free_ids([1.0], 3)


def test_mean_and_stderr() -> None:
    mean, stderr = mean_and_stderr(np.array([[1.0, 2.0], [1.0, 4.0]]))
    assert_array_equal(mean, [1.0, 3.0])
    assert stderr[0] == 0.0
    assert stderr[1] == pytest.approx(1.0)


def test_finite_volume_free_counts(free_spec, settings) -> None:
    n, mesh = 20, free_spec.mesh
    extent = 2 * n + 1
    size = mesh * extent
    energies = [0.5, 2.0, 10.0]
    curve = finite_volume_ids(free_spec, n, BoundaryCondition.dirichlet(), energies, samples=3, config=settings)
    h = 1.0 / mesh
    for energy, value in zip(energies, curve.values):
        # Dirichlet eigenvalues 4/h^2 sin^2(j pi / 2(L+1)), j = 1..L
        count = math.floor(2.0 * (size + 1) / math.pi * math.asin(h * math.sqrt(energy) / 2.0))
        assert value == pytest.approx(count / extent)
        assert abs(value - free_ids([energy], 1)[0]) <= 1.0 / extent + 0.01 * free_ids([energy], 1)[0]
    assert curve.stderr == [0.0, 0.0, 0.0]
    assert curve.metadata.samples == 3
    assert curve.metadata.n_dof == size


def test_negative_energies_count_nothing(bernoulli_spec, settings) -> None:
    curve = finite_volume_ids(bernoulli_spec, 2, BoundaryCondition.neumann(), [-1.0, 0.5], samples=2, config=settings)
    assert curve.values[0] == 0.0


def test_dirichlet_counts_never_exceed_neumann(bernoulli_spec, settings) -> None:
    energies = [0.1, 1.0, 5.0, 30.0]
    kwargs = dict(samples=4, seed=3, workers=1, config=settings)
    dirichlet = finite_volume_ids(bernoulli_spec, 3, BoundaryCondition.dirichlet(), energies, **kwargs)
    neumann = finite_volume_ids(bernoulli_spec, 3, BoundaryCondition.neumann(), energies, **kwargs)
    assert np.all(np.asarray(dirichlet.values) <= np.asarray(neumann.values))
    assert dirichlet.values == sorted(dirichlet.values)


def test_finite_volume_is_reproducible_across_workers(bernoulli_spec, settings) -> None:
    energies = [0.5, 3.0, 20.0]
    serial = finite_volume_ids(bernoulli_spec, 2, BoundaryCondition.periodic(), energies, samples=4, seed=8, workers=1, config=settings)
    pooled = finite_volume_ids(bernoulli_spec, 2, BoundaryCondition.periodic(), energies, samples=4, seed=8, workers=2, config=settings)
    assert serial.values == pooled.values
    assert serial.stderr == pooled.stderr


def test_finite_volume_argument_checks(free_spec, settings) -> None:
    with pytest.raises(ConfigError):
        finite_volume_ids(free_spec, 1, BoundaryCondition.dirichlet(), [0.1], samples=0, config=settings)
    with pytest.raises(ConfigError):
        finite_volume_ids(free_spec, 1, BoundaryCondition.dirichlet(), [0.2, 0.1], config=settings)


def test_theta_grid_midpoints() -> None:
    grid = theta_grid(2, 2)
    assert grid.shape == (4, 2)
    assert_allclose(grid[:, 0], [0.5 * math.pi, 0.5 * math.pi, 1.5 * math.pi, 1.5 * math.pi])
    assert_allclose(grid[:, 1], [0.5 * math.pi, 1.5 * math.pi] * 2)
    with pytest.raises(ConfigError):
        theta_grid(0, 1)


def test_one_theta_node_is_the_periodic_operator(free_spec, settings) -> None:
    assert_array_equal(theta_grid(1, 2), [[0.0, 0.0]])
    field = tiled_mean(free_spec, 9)
    energies = [0.3, 2.0, 7.0]
    curve = floquet_ids(field, energies, theta_nodes=1, workers=1, config=settings)
    spectrum = la.eigvalsh(assemble(field, BoundaryCondition.periodic()).matrix.toarray())
    assert_allclose(curve.values, [np.count_nonzero(spectrum <= e) / 9 for e in energies])


def test_homogenized_free_ids(free_spec, settings) -> None:
    energies = [0.1, 0.5, 2.0]
    curve = homogenized_ids(free_spec, energies, theta_nodes=16, supercell=33, workers=1, config=settings)
    for energy, value in zip(energies, curve.values):
        assert value == pytest.approx(_discrete_free_ids(energy, free_spec.mesh), abs=2.5e-3)
    assert curve.values[1] == pytest.approx(free_ids([0.5], 1)[0], rel=0.015)
    assert curve.metadata.method == "homogenized"
    assert curve.stderr == [0.0] * 3


def test_homogenized_ids_scales_with_a_constant_coefficient(settings) -> None:
    kwargs = dict(theta_nodes=8, supercell=5, workers=1, config=settings)
    unit = homogenized_ids(make_spec(plus=1.0), [0.25, 0.5, 1.5], **kwargs)
    doubled = homogenized_ids(make_spec(plus=2.0), [0.5, 1.0, 3.0], **kwargs)
    assert_allclose(doubled.values, unit.values)


def test_harmonic_homogenization_of_a_bernoulli_field(bernoulli_spec, settings) -> None:
    kwargs = dict(theta_nodes=8, supercell=5, workers=1, config=settings)
    harmonic = homogenized_ids(bernoulli_spec, [0.3, 1.0], harmonic=True, **kwargs)
    reference = homogenized_ids(make_spec(plus=4.0 / 3.0), [0.3, 1.0], **kwargs)
    arithmetic = homogenized_ids(bernoulli_spec, [0.3, 1.0], **kwargs)
    assert_allclose(harmonic.values, reference.values)
    assert harmonic.metadata.method == "homogenized-harmonic"
    # a smaller coefficient means more eigenvalues below E
    assert np.all(np.asarray(harmonic.values) >= np.asarray(arithmetic.values))


def test_adaptive_theta_refinement(free_spec, settings) -> None:
    curve = floquet_ids(tiled_mean(free_spec, 9), [0.2, 1.0], workers=1, config=settings)
    nodes = curve.metadata.theta_nodes
    assert settings.THETA_START <= nodes <= settings.THETA_CAP
    assert nodes & (nodes - 1) == 0


def test_floquet_needs_a_periodic_field(bernoulli_spec, settings) -> None:
    _, realized = sample_field(bernoulli_spec, 1, seed=0, idx=0, config=settings)
    with pytest.raises(DomainError):
        floquet_ids(realized, [0.5], theta_nodes=4, config=settings)
    with pytest.raises(DomainError):
        band_structure(realized, 4, 2, config=settings)


def _curve(energies, values) -> IdsCurve:
    metadata = IdsMetadata(method="finite-volume", bc="dirichlet", dimension=1, mesh=4, extent_cells=3)
    return IdsCurve(energies=energies, values=values, stderr=[0.0] * len(values), metadata=metadata)


def test_point_at_is_an_exact_lookup() -> None:
    curve = _curve([0.1, 0.2, 0.4], [0.1, 0.2, 0.2])
    assert curve.point_at(0.2) == (0.2, 0.0)
    with pytest.raises(RangeError):
        curve.point_at(0.3)


def test_interpolate_ids() -> None:
    curve = _curve([0.1, 0.2, 0.4], [0.1, 0.2, 0.2])
    assert_allclose(interpolate_ids(curve, [-1.0, 0.0, 0.05, 0.15, 0.3, 0.4]), [0.0, 0.0, 0.05, 0.15, 0.2, 0.2])
    with pytest.raises(RangeError):
        interpolate_ids(curve, [0.5])


def test_ids_curve_invariants() -> None:
    with pytest.raises(InvariantViolation, match="nondecreasing"):
        _curve([0.1, 0.2], [0.3, 0.1])
    with pytest.raises(InvariantViolation, match="ascending"):
        _curve([0.2, 0.1], [0.1, 0.3])
    with pytest.raises(InvariantViolation):
        _curve([0.1], [-0.5])


def test_smoothed_dos_of_a_fixed_field(free_spec, settings) -> None:
    field = tiled_mean(free_spec, 9)
    bc = BoundaryCondition.dirichlet()
    eigenvalues = la.eigvalsh(assemble(field, bc).matrix.toarray())

    wide = TestFunction.gaussian(20.0, 10.0)
    result = smoothed_dos(field, wide, bc=bc, workers=1, config=settings)
    assert result.value == pytest.approx(float(np.sum(wide(eigenvalues))) / 9.0, rel=1e-12)
    assert result.stderr == 0.0
    assert result.resolved

    narrow = smoothed_dos(field, TestFunction.gaussian(20.0, 0.5), bc=bc, workers=1, config=settings)
    assert not narrow.resolved


def test_smoothed_dos_averages_samples(half_bernoulli_spec, settings) -> None:
    phi = TestFunction.indicator(1.0, 20.0, 2.0)
    result = smoothed_dos(half_bernoulli_spec, phi, n=2, samples=5, seed=4, workers=1, config=settings)
    assert result.samples == 5
    assert result.value > 0.0
    assert result.stderr >= 0.0


def test_band_structure_of_the_free_cell(free_spec, settings) -> None:
    field = tiled_mean(free_spec, 1)
    bands = band_structure(field, 8, 2, workers=1, config=settings)
    thetas = np.asarray(bands.thetas)[:, 0]
    lowest = np.asarray(bands.bands)[:, 0]
    wrapped = np.minimum(thetas, 2.0 * math.pi - thetas)
    assert_allclose(lowest, 64.0 * np.sin(wrapped / 8.0) ** 2, rtol=1e-10)
    assert np.all(np.asarray(bands.bands)[:, 1] >= lowest)
    assert bands.lipschitz > 0.0
    assert len(bands.thetas) == 8


def test_boundary_condition_gap_shrinks_with_the_box(two_phase_spec, settings) -> None:
    energies = np.linspace(0.45, 0.55, 11).tolist()
    gaps = []
    for n in (50, 200):
        kwargs = dict(workers=1, config=settings)
        dirichlet = finite_volume_ids(two_phase_spec, n, BoundaryCondition.dirichlet(), energies, **kwargs)
        neumann = finite_volume_ids(two_phase_spec, n, BoundaryCondition.neumann(), energies, **kwargs)
        gap = np.asarray(neumann.values) - np.asarray(dirichlet.values)
        assert np.all(gap >= 0.0)
        # Dirichlet and Neumann differ by a rank-two boundary term
        assert np.all(gap <= 2.0 / (2 * n + 1) + 1e-12)
        gaps.append(float(gap.mean()))
    assert gaps[0] >= 1.5 * gaps[1]


@pytest.mark.parametrize(
    "spec, supercell, nodes",
    [
        (make_spec(), 33, 64),
        (make_spec(mesh=2, dimension=2), 8, 32),
    ],
)
def test_constant_field_bottom_power_law(spec, supercell, nodes, settings) -> None:
    energies = np.geomspace(0.01, 0.1, 10)
    curve = homogenized_ids(spec, energies.tolist(), theta_nodes=nodes, supercell=supercell, workers=1, config=settings)
    slope = np.polyfit(np.log(energies), np.log(curve.values), 1)[0]
    assert slope == pytest.approx(spec.dimension / 2.0, abs=0.15)


def test_smoothed_dos_converges_as_the_box_grows(settings) -> None:
    # weak disorder: rho in {1, 1.02}, so <phi, dN> stays near 1 / (2 pi sqrt(E))
    spec = make_spec(plus=1.0, bump=0.02, law=BernoulliLaw(p=0.5))
    phi = TestFunction.gaussian(0.3, 0.05)
    kwargs = dict(seed=9, workers=1, config=settings)
    reference = smoothed_dos(spec, phi, n=48, samples=4, **kwargs)
    small = smoothed_dos(spec, phi, n=2, samples=16, **kwargs)
    large = smoothed_dos(spec, phi, n=8, samples=16, **kwargs)
    assert reference.value == pytest.approx(1.0 / (2.0 * math.pi * math.sqrt(0.3)), rel=0.05)
    noise = 3.0 * math.sqrt(small.stderr ** 2 + large.stderr ** 2 + 2.0 * reference.stderr ** 2)
    assert abs(small.value - reference.value) - abs(large.value - reference.value) > noise

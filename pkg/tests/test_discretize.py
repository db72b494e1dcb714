import math

import numpy as np
import pytest
import scipy.linalg as la
from numpy.testing import assert_allclose

from idslab.core.errors import AssemblyError, DimensionMismatch
from idslab.lab.coeff_field import mean_field, periodize, sample_field
from idslab.lab.discretize import as_dense, assemble, dof_coordinates, quadratic_form
from idslab.schemas.field import BernoulliLaw
from idslab.schemas.operator import BoundaryCondition

from conftest import make_spec


def _free_field(mesh: int, extent: int, dimension: int = 1, value: float = 1.0):
    return mean_field(make_spec(plus=value, mesh=mesh, dimension=dimension)).tile(extent)


def _naive_periodic(values: np.ndarray, h: float) -> np.ndarray:
    """Sum over faces i | i+1 (mod L) of (rho_i + rho_{i+1}) / 2 (u_{i+1} - u_i)^2 / h^2, entry by entry."""
    size = values.size
    matrix = np.zeros((size, size))
    for i in range(size):
        j = (i + 1) % size
        face = 0.5 * (values[i] + values[j])
        for a in (i, j):
            for b in (i, j):
                sign = 1.0 if a == b else -1.0
                matrix[a, b] += sign * face / h ** 2
    return matrix


def test_dirichlet_constant_coefficient_stencil() -> None:
    stiffness = assemble(_free_field(6, 2), BoundaryCondition.dirichlet())
    dense = stiffness.matrix.toarray()
    h2 = (1.0 / 6.0) ** 2
    assert stiffness.n_dof == 12
    assert_allclose(np.diag(dense), 2.0 / h2)
    assert_allclose(np.diag(dense, 1), -1.0 / h2)
    assert_allclose(np.diag(dense, -1), -1.0 / h2)
    assert np.count_nonzero(dense) == 12 + 2 * 11


@pytest.mark.parametrize("bc", [BoundaryCondition.dirichlet(), BoundaryCondition.neumann(), BoundaryCondition.periodic()])
@pytest.mark.parametrize("dimension", [1, 2])
def test_one_dof_per_cell(bc, dimension) -> None:
    stiffness = assemble(_free_field(3, 3, dimension), bc)
    assert stiffness.n_dof == 9 ** dimension
    assert stiffness.grid_shape == (9,) * dimension


def test_faces_carry_the_mean_of_adjacent_cells() -> None:
    field = mean_field(make_spec(plus=[1.0, 1.0, 2.0, 2.0])).tile(1)
    dense = assemble(field, BoundaryCondition.periodic()).matrix.toarray()
    h2 = (1.0 / 4.0) ** 2
    faces = [-dense[i, (i + 1) % 4] * h2 for i in range(4)]
    assert_allclose(faces, [1.0, 1.5, 2.0, 1.5], rtol=1e-14)
    assert_allclose(np.diag(dense) * h2, [2.5, 2.5, 3.5, 3.5], rtol=1e-14)


def test_dirichlet_keeps_the_boundary_face_on_the_diagonal() -> None:
    field = mean_field(make_spec(plus=[1.0, 3.0], mesh=2)).tile(1)
    dirichlet = assemble(field, BoundaryCondition.dirichlet()).matrix.toarray()
    neumann = assemble(field, BoundaryCondition.neumann()).matrix.toarray()
    assert_allclose(dirichlet, [[12.0, -8.0], [-8.0, 20.0]], rtol=1e-14)
    assert_allclose(neumann, [[8.0, -8.0], [-8.0, 8.0]], rtol=1e-14)


def test_zero_twist_equals_periodic(bernoulli_spec, settings) -> None:
    realization, _ = sample_field(bernoulli_spec, 2, seed=4, idx=0, config=settings)
    field = periodize(realization, bernoulli_spec)
    periodic = assemble(field, BoundaryCondition.periodic()).matrix.toarray()
    twisted = assemble(field, BoundaryCondition.floquet(0.0)).matrix.toarray()
    assert_allclose(twisted, periodic, atol=0.0)


def test_floquet_matrix_is_hermitian_in_2d() -> None:
    field = mean_field(make_spec(plus=[[1.0, 2.0, 1.5], [2.5, 1.0, 3.0], [1.0, 1.2, 2.0]], mesh=3, dimension=2)).tile(2)
    stiffness = assemble(field, BoundaryCondition.floquet(0.7, 2.1))
    dense = stiffness.matrix.toarray()
    assert stiffness.is_complex
    assert_allclose(dense, dense.conj().T, atol=1e-12)
    assert la.eigvalsh(dense)[0] > 0.0


def test_periodic_matches_naive_quadratic_form(two_phase_spec) -> None:
    field = mean_field(two_phase_spec).tile(3)
    stiffness = assemble(field, BoundaryCondition.periodic())
    naive = _naive_periodic(field.values, field.h)
    assert_allclose(stiffness.matrix.toarray(), naive, rtol=1e-14)
    assert_allclose(la.eigvalsh(stiffness.matrix.toarray()), la.eigvalsh(naive), atol=1e-9)


@pytest.mark.parametrize("bc", [BoundaryCondition.dirichlet(), BoundaryCondition.periodic()])
def test_constant_2d_operator_is_a_kronecker_sum(bc) -> None:
    one_d = assemble(_free_field(2, 3), bc).matrix.toarray()
    two_d = assemble(_free_field(2, 3, dimension=2), bc).matrix.toarray()
    eye = np.eye(one_d.shape[0])
    assert_allclose(two_d, np.kron(one_d, eye) + np.kron(eye, one_d), atol=1e-10)


def test_single_cell_floquet_self_loop() -> None:
    field = _free_field(1, 1, value=2.5)
    theta = 1.3
    stiffness = assemble(field, BoundaryCondition.floquet(theta))
    assert stiffness.n_dof == 1
    assert_allclose(stiffness.matrix.toarray()[0, 0].real, 2.0 * 2.5 * (1.0 - math.cos(theta)), rtol=1e-14)


def test_neumann_and_periodic_rows_sum_to_zero(bernoulli_spec, settings) -> None:
    _, field = sample_field(bernoulli_spec, 2, seed=1, idx=0, config=settings)
    neumann = assemble(field, BoundaryCondition.neumann()).matrix
    assert_allclose(np.asarray(neumann.sum(axis=1)).ravel(), 0.0, atol=1e-10)


def test_harmonic_face_averaging() -> None:
    field_1d = mean_field(make_spec(plus=[1.0, 3.0, 2.0, 5.0])).tile(2)
    arithmetic = assemble(field_1d, BoundaryCondition.periodic()).matrix.toarray()
    harmonic = assemble(field_1d, BoundaryCondition.periodic(), averaging="harmonic").matrix.toarray()
    h2 = (1.0 / 4.0) ** 2
    assert harmonic[0, 1] * h2 == pytest.approx(-1.5)
    assert arithmetic[0, 1] * h2 == pytest.approx(-2.0)
    # harmonic mean <= arithmetic mean on every face
    assert np.all(np.diag(harmonic) <= np.diag(arithmetic) + 1e-12)

    field_2d = mean_field(make_spec(plus=[[1.0, 3.0], [2.0, 5.0]], mesh=2, dimension=2)).tile(2)
    arithmetic = assemble(field_2d, BoundaryCondition.periodic()).matrix.toarray()
    harmonic = assemble(field_2d, BoundaryCondition.periodic(), averaging="harmonic").matrix.toarray()
    assert not np.allclose(arithmetic, harmonic)


def test_assembly_errors(bernoulli_spec, settings) -> None:
    _, realized = sample_field(bernoulli_spec, 1, seed=0, idx=0, config=settings)
    with pytest.raises(AssemblyError, match="periodic on its box"):
        assemble(realized, BoundaryCondition.periodic())
    with pytest.raises(AssemblyError, match="theta"):
        assemble(_free_field(2, 2), BoundaryCondition.floquet(0.1, 0.2))
    with pytest.raises(AssemblyError, match="averaging"):
        assemble(_free_field(2, 2), BoundaryCondition.dirichlet(), averaging="geometric")


def test_quadratic_form_kernel_and_homogeneity(bernoulli_spec, settings) -> None:
    realization, _ = sample_field(bernoulli_spec, 2, seed=3, idx=0, config=settings)
    stiffness = assemble(periodize(realization, bernoulli_spec), BoundaryCondition.periodic())
    assert abs(quadratic_form(stiffness, np.ones(stiffness.n_dof))) < 1e-9
    u = np.random.default_rng(5).standard_normal(stiffness.n_dof)
    assert_allclose(quadratic_form(stiffness, 2.5 * u), 6.25 * quadratic_form(stiffness, u), rtol=1e-12)
    assert quadratic_form(stiffness, u) > 0.0


def test_quadratic_form_of_first_dirichlet_eigenvector(two_phase_spec) -> None:
    stiffness = assemble(mean_field(two_phase_spec).tile(3), BoundaryCondition.dirichlet())
    values, vectors = la.eigh(stiffness.matrix.toarray())
    assert_allclose(quadratic_form(stiffness, vectors[:, 0]), values[0], rtol=1e-10)


def test_quadratic_form_rejects_wrong_length() -> None:
    stiffness = assemble(_free_field(2, 2), BoundaryCondition.dirichlet())
    with pytest.raises(DimensionMismatch):
        quadratic_form(stiffness, np.ones(stiffness.n_dof + 1))


def test_dof_coordinates_and_dense_cap() -> None:
    stiffness = assemble(_free_field(4, 1), BoundaryCondition.dirichlet())
    (coords,) = dof_coordinates(stiffness)
    assert_allclose(coords, [0.125, 0.375, 0.625, 0.875])
    with pytest.raises(AssemblyError):
        as_dense(stiffness, limit=2)


def test_single_cell_dirichlet_box() -> None:
    stiffness = assemble(_free_field(1, 1, value=1.5), BoundaryCondition.dirichlet())
    assert_allclose(stiffness.matrix.toarray(), [[3.0]])


def test_lowest_dirichlet_eigenvalue_converges_at_second_order() -> None:
    # the zero exterior values sit one mesh width past the outermost cells,
    # so L cells span a Dirichlet interval of length (L + 1) h
    errors = []
    for mesh in (7, 15, 31):
        stiffness = assemble(_free_field(mesh, 1), BoundaryCondition.dirichlet())
        lowest = la.eigvalsh(stiffness.matrix.toarray())[0]
        length = (mesh + 1) * stiffness.h
        errors.append(abs(lowest * length ** 2 - math.pi ** 2))
    for coarse, fine in zip(errors, errors[1:]):
        assert coarse / fine == pytest.approx(4.0, rel=0.2)


@pytest.mark.parametrize(
    "bc",
    [
        BoundaryCondition.dirichlet(),
        BoundaryCondition.neumann(),
        BoundaryCondition.periodic(),
        BoundaryCondition.floquet(0.4, 2.9),
    ],
)
def test_form_is_nonnegative_on_random_vectors(bc, settings) -> None:
    spec = make_spec(plus=1.0, bump=1.0, law=BernoulliLaw(p=0.5), mesh=3, dimension=2)
    realization, field = sample_field(spec, 1, seed=11, idx=0, config=settings)
    if bc.wraps:
        field = periodize(realization, spec)
    stiffness = assemble(field, bc)
    rng = np.random.default_rng(23)
    for _ in range(1000):
        u = rng.standard_normal(stiffness.n_dof)
        if stiffness.is_complex:
            u = u + 1j * rng.standard_normal(stiffness.n_dof)
        assert quadratic_form(stiffness, u) >= 0.0


def test_lowest_floquet_eigenvalue_is_lipschitz_in_theta(bernoulli_spec, settings) -> None:
    realization, _ = sample_field(bernoulli_spec, 1, seed=2, idx=0, config=settings)
    field = periodize(realization, bernoulli_spec)
    thetas = np.linspace(0.0, 2.0 * math.pi, 65)
    lowest = np.array(
        [la.eigvalsh(assemble(field, BoundaryCondition.floquet(t)).matrix.toarray())[0] for t in thetas]
    )
    # d/dtheta of the matrix only touches the wrap face, whose weight is at most max(rho) / h^2
    bound = field.values.max() / field.h ** 2
    steps = np.abs(np.diff(lowest)) / np.diff(thetas)
    assert np.all(steps <= bound * (1.0 + 1e-9))
    assert lowest[0] == pytest.approx(0.0, abs=1e-9 * bound)
    assert lowest[32] > lowest[0]

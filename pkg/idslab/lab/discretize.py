"""
Finite-difference assembly of -div(rho grad) on a box.

The grid is cell centred: a box of L = m*extent cells per axis has one dof
per cell, L^d in total for every boundary condition. The face between two
neighbouring cells carries the mean of their values (arithmetic by default,
harmonic on request) and contributes rho_face * (u_i - u_j)^2 / h^2 to the
form. Boundary faces depend on the condition:

    dirichlet  exterior neighbour is zero, face carries the boundary cell value
    neumann    no boundary faces
    periodic   the last cell neighbours the first
    floquet    as periodic, wrap faces carry exp(+-i theta)
"""

from typing import List, Optional, Union

import numpy as np
import scipy.sparse as sp

from idslab.core.errors import AssemblyError, DimensionMismatch, DomainError
from idslab.core.logging import get_logger
from idslab.schemas.field import FieldOnGrid
from idslab.schemas.operator import BCType, BoundaryCondition, StiffnessMatrix

logger = get_logger("discretize")

AVERAGING_MODES = ("arithmetic", "harmonic")


def _pair_mean(a: np.ndarray, b: np.ndarray, averaging: str) -> np.ndarray:
    if averaging == "harmonic":
        return 2.0 * a * b / (a + b)
    return 0.5 * (a + b)


def face_weights(values: np.ndarray, axis: int, wrap: bool, averaging: str = "arithmetic") -> np.ndarray:
    """
    Coefficient on every interior face normal to `axis`, indexed by the cell
    before the face: L-1 faces along `axis`, or L when wrapping.
    """
    faces = _pair_mean(values, np.roll(values, -1, axis=axis), averaging)
    if wrap:
        return faces
    return np.take(faces, np.arange(values.shape[axis] - 1), axis=axis)


def _accumulate(
    values: np.ndarray,
    h: float,
    bc: BoundaryCondition,
    averaging: str,
) -> sp.csr_matrix:
    d = values.ndim
    L = values.shape[0]
    shape = values.shape
    size = values.size
    wrap = bc.wraps
    complex_entries = bc.tag is BCType.FLOQUET
    dtype = np.complex128 if complex_entries else np.float64

    rows: List[np.ndarray] = []
    cols: List[np.ndarray] = []
    entries: List[np.ndarray] = []
    diagonal = np.zeros(shape, dtype=dtype)

    for axis in range(d):
        if bc.tag is BCType.DIRICHLET:
            first = [slice(None)] * d
            last = [slice(None)] * d
            first[axis], last[axis] = 0, L - 1
            diagonal[tuple(first)] += values[tuple(first)] / (h * h)
            diagonal[tuple(last)] += values[tuple(last)] / (h * h)

        w = face_weights(values, axis, wrap, averaging) / (h * h)
        start = np.indices(w.shape)
        end = start.copy()
        end[axis] = start[axis] + 1
        crossing = end[axis] == L
        if wrap:
            end[axis] = end[axis] % L
        p = np.ravel_multi_index(tuple(start), shape).ravel()
        q = np.ravel_multi_index(tuple(end), shape).ravel()
        w = w.ravel()

        phase = np.ones(w.shape, dtype=dtype)
        if complex_entries:
            phase = np.where(crossing.ravel(), np.exp(1j * bc.theta[axis]), 1.0 + 0j)

        flat = diagonal.reshape(-1)
        loop = p == q
        if np.any(loop):
            # L == 1: the face closes on itself, u(x+L) - u(x) = (e^{i theta} - 1) u(x)
            twist = np.real(phase[loop]) if complex_entries else phase[loop]
            np.add.at(flat, p[loop], 2.0 * w[loop] * (1.0 - twist))
        keep = ~loop
        np.add.at(flat, p[keep], w[keep])
        np.add.at(flat, q[keep], w[keep])
        rows.append(p[keep])
        cols.append(q[keep])
        entries.append(-w[keep] * phase[keep])

    off = sp.coo_matrix(
        (np.concatenate(entries), (np.concatenate(rows), np.concatenate(cols))),
        shape=(size, size),
        dtype=dtype,
    ).tocsr()
    matrix = off + off.conj().T + sp.diags(diagonal.ravel(), format="csr", dtype=dtype)
    return matrix.tocsr()


def assemble(
    field: FieldOnGrid,
    bc: BoundaryCondition,
    averaging: str = "arithmetic",
) -> StiffnessMatrix:
    """Sparse matrix of -div(rho grad) for `field` under `bc`."""
    if averaging not in AVERAGING_MODES:
        raise AssemblyError(f"unknown face averaging '{averaging}', expected one of {AVERAGING_MODES}")
    if not np.all(np.isfinite(field.values)):
        bad = np.unravel_index(np.argmax(~np.isfinite(field.values)), field.values.shape)
        raise DomainError(f"non-finite field value at grid point {tuple(map(int, bad))}")
    if bc.wraps and not field.is_periodic_on_box:
        raise AssemblyError(
            f"{bc.tag.value} boundary condition needs a field periodic on its box, got a {field.kind.value} field"
        )
    if bc.tag is BCType.FLOQUET and len(bc.theta) != field.dimension:
        raise AssemblyError(f"Floquet theta has {len(bc.theta)} angles for a d={field.dimension} field")

    matrix = _accumulate(field.values, field.h, bc, averaging)
    matrix.sum_duplicates()
    matrix.sort_indices()
    logger.debug(
        "assembled %s %dd %s matrix: %d dofs, %d nonzeros",
        bc.tag.value, field.dimension, field.kind.value, matrix.shape[0], matrix.nnz,
    )
    return StiffnessMatrix(
        matrix=matrix,
        dimension=field.dimension,
        grid_shape=field.values.shape,
        h=field.h,
        bc=bc,
        field_kind=field.kind,
        n=field.n,
        seed=field.seed,
        sample_index=field.sample_index,
    )


def quadratic_form(matrix: Union[StiffnessMatrix, sp.spmatrix, np.ndarray], u) -> float:
    """
    u* A u. Tiny negative values from rounding are clipped to zero; anything
    larger means the matrix is not positive semidefinite and is returned as is.
    """
    a = matrix.matrix if isinstance(matrix, StiffnessMatrix) else matrix
    u = np.asarray(u)
    if u.ndim != 1 or u.shape[0] != a.shape[0]:
        raise DimensionMismatch(f"vector of shape {u.shape} does not match a {a.shape[0]}-dof matrix")
    value = float(np.real(np.vdot(u, a @ u)))
    if value < 0.0:
        scale = float(abs(a).sum(axis=1).max()) * float(np.vdot(u, u).real)
        if -value <= 1e-12 * max(scale, 1e-300):
            return 0.0
    return value


def dof_coordinates(stiffness: StiffnessMatrix) -> List[np.ndarray]:
    """Cell centres (box corner at the origin) of the dofs along each axis."""
    return [(np.arange(s) + 0.5) * stiffness.h for s in stiffness.grid_shape]


def as_dense(stiffness: StiffnessMatrix, limit: Optional[int] = None) -> np.ndarray:
    """Dense copy of the matrix, refusing sizes above `limit`."""
    if limit is not None and stiffness.n_dof > limit:
        raise AssemblyError(f"{stiffness.n_dof} dofs exceed the dense cap {limit}")
    return stiffness.matrix.toarray()

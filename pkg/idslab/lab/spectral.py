"""
Eigenvalue counting and low-lying eigenpairs.

Counting uses Sylvester's law of inertia on A - x*I, x = E + eps_m, with
eps_m = EIG_REL_TOL * ||A||. The factorization depends on the matrix shape:
a Sturm recurrence for 1D tridiagonal matrices, Sturm plus a Schur complement
for the cyclic 1D periodic/Floquet matrices, pivoted dense LDL^T for small
matrices and symmetric-mode sparse LU otherwise.
"""

from typing import Optional, Sequence, Tuple, Union

import numpy as np
import scipy.linalg as la
import scipy.sparse as sp
from scipy.sparse.linalg import ArpackNoConvergence, eigsh, splu
from tenacity import RetryError, Retrying, retry_if_exception_type, stop_after_attempt

from idslab.core.config import Settings, settings as default_settings
from idslab.core.errors import (
    ComputationError,
    ConvergenceError,
    DimensionMismatch,
    FactorizationBreakdown,
    InvariantViolation,
)
from idslab.core.logging import get_logger
from idslab.schemas.operator import InertiaCount, SpectrumSlice, StiffnessMatrix

logger = get_logger("spectral")

MatrixLike = Union[StiffnessMatrix, sp.spmatrix, np.ndarray]

_PIVOT_GUARD = 1e3 * np.finfo(float).eps


def _unwrap(matrix: MatrixLike) -> Tuple[sp.csr_matrix, str, float]:
    """(csr matrix, structure tag, max abs row sum) for any accepted matrix input."""
    if isinstance(matrix, StiffnessMatrix):
        return matrix.matrix, matrix.structure, matrix.norm
    a = sp.csr_matrix(matrix)
    if a.shape[0] != a.shape[1]:
        raise DimensionMismatch(f"matrix must be square, got {a.shape}")
    norm = float(abs(a).sum(axis=1).max()) if a.shape[0] else 0.0
    coo = a.tocoo()
    banded = coo.nnz == 0 or int(np.max(np.abs(coo.row - coo.col))) <= 1
    structure = "tridiagonal" if banded and a.shape[0] >= 3 else "general"
    return a, structure, norm


def tolerance(matrix: MatrixLike, config: Optional[Settings] = None) -> float:
    """eps_m, the inclusive tie band of every count."""
    config = config or default_settings
    _, _, norm = _unwrap(matrix)
    return config.EIG_REL_TOL * max(norm, np.finfo(float).tiny)


def _dense_eigenvalues(a: sp.csr_matrix) -> np.ndarray:
    return la.eigvalsh(a.toarray())


def full_spectrum(matrix: MatrixLike, config: Optional[Settings] = None) -> np.ndarray:
    """All eigenvalues, ascending; refused above DENSE_MAX_DOF."""
    config = config or default_settings
    a, _, _ = _unwrap(matrix)
    if a.shape[0] > config.DENSE_MAX_DOF:
        raise ComputationError(
            f"dense eigensolve of {a.shape[0]} dofs exceeds DENSE_MAX_DOF={config.DENSE_MAX_DOF}; use a smaller box"
        )
    return _dense_eigenvalues(a)


# ---------------------------------------------------------------------------
# inertia kernels, each counting negative pivots of A - x*I
# ---------------------------------------------------------------------------


def _sturm_pivots(diag: np.ndarray, off: np.ndarray, xs: np.ndarray, pivmin: float):
    """
    Pivots of the LDL^T recurrence for a Hermitian tridiagonal matrix, one
    column per shift. Vanishing pivots are replaced by -pivmin, which is a
    perturbation of the matrix well inside the tie band.
    """
    off_sq = np.abs(off) ** 2
    pivots = np.empty((diag.shape[0], xs.shape[0]))
    d = diag[0] - xs
    for k in range(diag.shape[0]):
        if k:
            d = diag[k] - xs - off_sq[k - 1] / d
        d = np.where(np.abs(d) <= pivmin, -pivmin, d)
        pivots[k] = d
    return pivots


def _tridiagonal_counts(a: sp.csr_matrix, xs: np.ndarray, pivmin: float) -> Tuple[np.ndarray, np.ndarray]:
    diag = np.real(a.diagonal())
    off = a.diagonal(1)
    pivots = _sturm_pivots(diag, off, xs, pivmin)
    return np.count_nonzero(pivots < 0.0, axis=0), np.zeros(xs.shape, dtype=bool)


def _cyclic_counts(a: sp.csr_matrix, xs: np.ndarray, pivmin: float) -> Tuple[np.ndarray, np.ndarray]:
    """
    Inertia of [[T, c], [c^H, a]] - x*I as inertia(T - x) plus the sign of the
    Schur complement a - x - c^H (T - x)^{-1} c, with T tridiagonal.
    """
    n = a.shape[0]
    diag = np.real(a.diagonal())
    off = a.diagonal(1)[: n - 2]
    lower = a.diagonal(-1)[: n - 2]
    column = a[: n - 1, n - 1].toarray().ravel()
    pivots = _sturm_pivots(diag[: n - 1], off, xs, pivmin)

    y = np.empty(pivots.shape, dtype=np.result_type(column, lower, float))
    y[0] = column[0]
    for k in range(1, n - 1):
        y[k] = column[k] - (lower[k - 1] / pivots[k - 1]) * y[k - 1]
    schur = diag[n - 1] - xs - np.sum(np.abs(y) ** 2 / pivots, axis=0)

    guard = _PIVOT_GUARD * max(pivmin / np.finfo(float).eps, 1.0)
    broken = (np.min(np.abs(pivots), axis=0) <= guard) | (np.abs(schur) <= guard)
    counts = np.count_nonzero(pivots < 0.0, axis=0) + (schur < 0.0)
    return counts, broken


def _ldl_count(a: sp.csr_matrix, x: float, guard: float) -> int:
    """Negative eigenvalues of the block diagonal factor of a Bunch-Kaufman LDL^T."""
    dense = a.toarray() - x * np.eye(a.shape[0])
    _, d, _ = la.ldl(dense, lower=True, hermitian=True)
    count = 0
    i = 0
    size = d.shape[0]
    while i < size:
        if i + 1 < size and d[i + 1, i] != 0.0:
            block = la.eigvalsh(d[i : i + 2, i : i + 2])
            if np.min(np.abs(block)) <= guard:
                raise FactorizationBreakdown(f"near-singular 2x2 pivot block at {i}")
            count += int(np.count_nonzero(block < 0.0))
            i += 2
        else:
            pivot = float(np.real(d[i, i]))
            if abs(pivot) <= guard:
                raise FactorizationBreakdown(f"zero pivot at {i}")
            count += pivot < 0.0
            i += 1
    return count


def _splu_count(a: sp.csr_matrix, x: float, guard: float) -> int:
    """
    Symmetric-mode SuperLU without row pivoting: Pr (A - x) Pr^T = L U, so the
    diagonal of U carries the LDL^H pivots whenever the row and column
    permutations agree.
    """
    shifted = (a - x * sp.identity(a.shape[0], dtype=a.dtype, format="csr")).tocsc()
    try:
        lu = splu(
            shifted,
            permc_spec="MMD_AT_PLUS_A",
            diag_pivot_thresh=0.0,
            options={"SymmetricMode": True, "Equil": False},
        )
    except RuntimeError as exc:
        raise FactorizationBreakdown(f"sparse LU failed: {exc}") from exc
    if not np.array_equal(lu.perm_r, lu.perm_c):
        raise FactorizationBreakdown("sparse LU left the diagonal; permutation is not symmetric")
    pivots = np.real(lu.U.diagonal())
    if np.min(np.abs(pivots)) <= guard:
        raise FactorizationBreakdown("zero pivot in sparse LU")
    return int(np.count_nonzero(pivots < 0.0))


def _single_count(a: sp.csr_matrix, structure: str, x: float, norm: float, config: Settings) -> Tuple[int, str]:
    pivmin = np.finfo(float).eps * max(norm, np.finfo(float).tiny)
    guard = _PIVOT_GUARD * max(norm, np.finfo(float).tiny)
    xs = np.array([x])
    if structure == "tridiagonal":
        counts, _ = _tridiagonal_counts(a, xs, pivmin)
        return int(counts[0]), "sturm"
    if structure == "cyclic":
        counts, broken = _cyclic_counts(a, xs, pivmin)
        if broken[0]:
            raise FactorizationBreakdown(f"vanishing pivot at x={x:.17g}")
        return int(counts[0]), "sturm-schur"
    if a.shape[0] <= config.DENSE_LDL_MAX:
        return _ldl_count(a, x, guard), "ldl"
    return _splu_count(a, x, guard), "sparse-lu"


def count_below(matrix: MatrixLike, energy: float, config: Optional[Settings] = None) -> InertiaCount:
    """
    #{lambda <= energy + eps_m} by inertia. A breakdown on an eigenvalue is
    retried at energy + k*eps_m; the shift actually used is reported.
    """
    config = config or default_settings
    a, structure, norm = _unwrap(matrix)
    eps_m = config.EIG_REL_TOL * max(norm, np.finfo(float).tiny)
    if a.shape[0] == 0:
        return InertiaCount(count=0, energy=energy, shift=eps_m, method="empty")

    try:
        for attempt in Retrying(
            stop=stop_after_attempt(config.COUNT_RETRIES + 1),
            retry=retry_if_exception_type(FactorizationBreakdown),
            reraise=False,
        ):
            with attempt:
                k = attempt.retry_state.attempt_number
                if k > 1:
                    logger.debug("count at E=%.6g broke down, retrying with shift %d*eps", energy, k)
                count, method = _single_count(a, structure, energy + k * eps_m, norm, config)
                return InertiaCount(count=count, energy=energy, shift=k * eps_m, method=method)
    except RetryError as exc:
        if a.shape[0] > config.DENSE_MAX_DOF:
            raise ComputationError(
                f"inertia count at E={energy:g} broke down {config.COUNT_RETRIES + 1} times"
            ) from exc
        logger.warning("inertia count at E=%.6g kept breaking down; using a dense eigensolve", energy)
    eigenvalues = _dense_eigenvalues(a)
    count = int(np.searchsorted(eigenvalues, energy + eps_m, side="right"))
    return InertiaCount(count=count, energy=energy, shift=eps_m, method="dense")


def eigen_count(matrix: MatrixLike, energy: float, config: Optional[Settings] = None) -> int:
    """Number of eigenvalues <= energy (inclusive within eps_m)."""
    return count_below(matrix, energy, config).count


def eigen_counts(matrix: MatrixLike, energies: Sequence[float], config: Optional[Settings] = None) -> np.ndarray:
    """
    eigen_count over a whole energy grid. Small matrices get one dense
    eigensolve; 1D matrices run the recurrence for every energy at once.
    """
    config = config or default_settings
    a, structure, norm = _unwrap(matrix)
    energies = np.asarray(energies, dtype=float)
    if a.shape[0] == 0 or energies.size == 0:
        return np.zeros(energies.shape, dtype=np.int64)
    eps_m = config.EIG_REL_TOL * max(norm, np.finfo(float).tiny)

    if a.shape[0] <= config.DENSE_SPECTRUM_MAX:
        eigenvalues = _dense_eigenvalues(a)
        return np.searchsorted(eigenvalues, energies + eps_m, side="right").astype(np.int64)

    pivmin = np.finfo(float).eps * norm
    if structure == "tridiagonal":
        counts, _ = _tridiagonal_counts(a, energies + eps_m, pivmin)
        return counts.astype(np.int64)
    if structure == "cyclic":
        counts, broken = _cyclic_counts(a, energies + eps_m, pivmin)
        counts = counts.astype(np.int64)
        for i in np.flatnonzero(broken):
            counts[i] = count_below(matrix, float(energies[i]), config).count
        return counts

    return np.array([count_below(matrix, float(e), config).count for e in energies], dtype=np.int64)


# ---------------------------------------------------------------------------
# eigenpairs
# ---------------------------------------------------------------------------


def _check_pairs(a: sp.csr_matrix, values: np.ndarray, vectors: np.ndarray, norm: float, config: Settings) -> Optional[str]:
    scale = max(norm, np.finfo(float).tiny)
    residual = np.linalg.norm(a @ vectors - vectors * values, axis=0)
    if residual.size and residual.max() > config.RESIDUAL_REL_TOL * scale:
        return f"residual {residual.max():.3g} above {config.RESIDUAL_REL_TOL:g}*||A||"
    gram = vectors.conj().T @ vectors
    drift = np.abs(gram - np.eye(gram.shape[0])).max() if gram.size else 0.0
    if drift > config.RESIDUAL_REL_TOL:
        return f"eigenvectors not orthonormal (drift {drift:.3g})"
    return None


def _dense_pairs(a: sp.csr_matrix, k: int) -> Tuple[np.ndarray, np.ndarray]:
    return la.eigh(a.toarray(), subset_by_index=[0, k - 1])


def lowest_eigenpairs(matrix: MatrixLike, k: int, config: Optional[Settings] = None) -> SpectrumSlice:
    """
    The k smallest eigenvalues with orthonormal eigenvectors.

    Large matrices use ARPACK in shift-invert mode about a shift just below
    zero; on non-convergence or a failed residual check the dense solver takes
    over below DENSE_MAX_DOF.
    """
    config = config or default_settings
    a, _, norm = _unwrap(matrix)
    n = a.shape[0]
    if not 1 <= k <= n:
        raise DimensionMismatch(f"cannot take {k} eigenpairs of a {n}-dof matrix")

    values = vectors = None
    method = "dense"
    if n > config.DENSE_SPECTRUM_MAX and k < n - 1:
        sigma = -max(1e-6 * norm, np.finfo(float).tiny)
        try:
            values, vectors = eigsh(a, k=k, sigma=sigma, which="LM")
            order = np.argsort(values)
            values, vectors = values[order], vectors[:, order]
            problem = _check_pairs(a, values, vectors, norm, config)
            if problem:
                logger.warning("shift-invert eigenpairs rejected: %s", problem)
                values = vectors = None
            else:
                method = "iterative"
        except (ArpackNoConvergence, RuntimeError) as exc:
            logger.warning("shift-invert eigensolver failed (%s)", exc)
            values = vectors = None
        if values is None and n > config.DENSE_MAX_DOF:
            raise ConvergenceError(f"eigsh did not deliver {k} eigenpairs of a {n}-dof matrix")

    if values is None:
        values, vectors = _dense_pairs(a, k)
        problem = _check_pairs(a, values, vectors, norm, config)
        if problem:
            raise ConvergenceError(f"dense eigensolve failed its checks: {problem}")

    eps_m = config.EIG_REL_TOL * max(norm, np.finfo(float).tiny)
    if values[0] < -eps_m:
        raise InvariantViolation(f"negative eigenvalue {values[0]:.6g} of a positive semidefinite operator")
    return SpectrumSlice(eigenvalues=values, eigenvectors=vectors, method=method)

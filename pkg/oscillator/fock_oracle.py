"""
Truncated q-boson Fock-space oracle
Builds b, b+, X, P, h and the ladder operators B+- as real matrices and
diagonalizes symmetric matrices with a deterministic cyclic Jacobi solver
"""

import math
from typing import List, Optional, Tuple

import numpy as np
import structlog

from common.config import get_settings
from common.exceptions import DeformationDomainError, EigenConvergenceError, QOverflowError
from .deformation import hierarchy
from .qcalc import LOG_FLOAT_MAX, log_q_number_table
from .schemas import BandedSymMatrix, DerivedParams, EigenResult

logger = structlog.get_logger()

# Rows and columns this close to the truncation edge are excluded from identity checks
INTERIOR_MARGIN = 2
# Components below this fraction of the largest one are treated as zero when fixing signs
SIGN_THRESHOLD = 1e-12


def _check_dim(dim: int, lowest: int) -> None:
    cap = get_settings().dim_cap
    if dim < lowest or dim > cap:
        raise DeformationDomainError(f"dim must lie in [{lowest}, {cap}], got {dim}")


def _require_q_boson(dp: DerivedParams) -> None:
    if dp.gamma is None:
        raise DeformationDomainError(f"no q-boson representation in regime {dp.regime.value} (gamma is not finite)")


def _log_q_numbers(dim: int, q: float) -> np.ndarray:
    """ln [j]_q for j = 0..dim, raising once [dim]_q leaves double precision"""
    logs = log_q_number_table(dim, q)
    if logs[-1] > LOG_FLOAT_MAX - 1:
        raise QOverflowError(f"[{dim}]_q exceeds double precision for q={q}; reduce dim")
    return logs


def qboson_matrices(dim: int, q: float) -> Tuple[np.ndarray, np.ndarray]:
    """(b, b+) with b+[n+1, n] = sqrt([n+1]_q)"""
    _check_dim(dim, 2)
    logs = _log_q_numbers(dim, q)
    b_dag = np.diagflat(np.exp(0.5 * logs[1:dim]), -1)
    return b_dag.T.copy(), b_dag


def position_momentum(dim: int, q: float, gamma: float) -> Tuple[np.ndarray, np.ndarray]:
    """(X, P~) with P = i P~, so that P^2 = -P~ P~"""
    b, b_dag = qboson_matrices(dim, q)
    x = 0.5 * math.sqrt(gamma * (q + 1.0)) * (b_dag + b)
    p_tilde = 0.5 * math.sqrt((q + 1.0) / gamma) * (b_dag - b)
    return x, p_tilde


def hamiltonian(dim: int, dp: DerivedParams) -> BandedSymMatrix:
    """h = (P^2 + X^2)/2 in the q-boson basis, pentadiagonal"""
    _check_dim(dim, 4)
    _require_q_boson(dp)
    q, gamma = dp.q, dp.gamma
    logs = _log_q_numbers(dim + 1, q)
    q_numbers = np.exp(logs)
    n = np.arange(dim)
    diagonal = (q + 1.0) * (gamma + 1.0 / gamma) * (q_numbers[n] + q_numbers[n + 1]) / 8.0
    skip = (q + 1.0) * (gamma - 1.0 / gamma) * np.exp(0.5 * (logs[1:dim - 1] + logs[2:dim])) / 8.0
    entries = np.diag(diagonal) + np.diag(skip, 2) + np.diag(skip, -2)
    return BandedSymMatrix(dim=dim, bandwidth=2, entries=entries)


def ladder_matrices(dim: int, dp: DerivedParams, level: int) -> Tuple[np.ndarray, np.ndarray]:
    """(B+, B-) of hierarchy level `level`: K_l (b+ - t_l b) / sqrt(2) and its transpose"""
    _require_q_boson(dp)
    if level < 0:
        raise DeformationDomainError(f"level must be >= 0, got {level}")
    b, b_dag = qboson_matrices(dim, dp.q)
    k_level = dp.big_k * math.exp(0.5 * level * dp.log_q)
    t_level = dp.t * math.exp(-level * dp.log_q)
    b_plus = k_level * (b_dag - t_level * b) / math.sqrt(2.0)
    return b_plus, b_plus.T.copy()


def _interior(matrix: np.ndarray, margin: int) -> np.ndarray:
    size = matrix.shape[0] - margin
    return matrix[:size, :size]


def _relative_residual(residual: np.ndarray, *terms: np.ndarray, margin: int = INTERIOR_MARGIN) -> float:
    """Largest |residual| on the interior relative to the largest interior term"""
    scale = max(max(float(np.max(np.abs(_interior(term, margin)))) for term in terms), 1.0)
    return float(np.max(np.abs(_interior(residual, margin)))) / scale


def commutator_residual(dim: int, dp: DerivedParams) -> float:
    """X P~ - P~ X - (1 + alpha X^2 - beta P~^2), the real form of [X, P] = i(1 + alpha X^2 + beta P^2)"""
    _require_q_boson(dp)
    x, p_tilde = position_momentum(dim, dp.q, dp.gamma)
    left = x @ p_tilde - p_tilde @ x
    x2, p2 = x @ x, p_tilde @ p_tilde
    right = np.eye(dim) + dp.alpha * x2 - dp.beta * p2
    return _relative_residual(left - right, left, dp.alpha * x2, dp.beta * p2)


def factorization_residual(dim: int, dp: DerivedParams) -> float:
    """B+ B- + eps0 - h on interior indices"""
    h = hamiltonian(dim, dp).entries
    b_plus, b_minus = ladder_matrices(dim, dp, 0)
    product = b_plus @ b_minus
    return _relative_residual(product + dp.eps0 * np.eye(dim) - h, product, h)


def shape_invariance_residual(dim: int, dp: DerivedParams, level: int = 0) -> float:
    """B-(i) B+(i) - B+(i+1) B-(i+1) - eps_{i+1}"""
    eps_next = hierarchy(dp, level + 2)[level + 1].eps_i
    plus_i, minus_i = ladder_matrices(dim, dp, level)
    plus_next, minus_next = ladder_matrices(dim, dp, level + 1)
    lower = minus_i @ plus_i
    upper = plus_next @ minus_next
    return _relative_residual(lower - upper - eps_next * np.eye(dim), lower, upper)


def q_commutator_residual(dim: int, q: float) -> float:
    """b b+ - q b+ b - 1 on rows 0..dim-2"""
    b, b_dag = qboson_matrices(dim, q)
    lhs = b @ b_dag - q * (b_dag @ b)
    rows = slice(0, dim - 1)
    scale = max(float(np.max(np.abs(lhs[rows]))), float(np.max(np.abs(b @ b_dag))), 1.0)
    return float(np.max(np.abs((lhs - np.eye(dim))[rows]))) / scale


def align_sign(vector: np.ndarray) -> np.ndarray:
    """Flip the vector so its lowest-index significant component is positive"""
    vector = np.asarray(vector, dtype=float)
    peak = float(np.max(np.abs(vector))) if vector.size else 0.0
    if peak == 0:
        return vector.copy()
    significant = np.flatnonzero(np.abs(vector) > SIGN_THRESHOLD * peak)
    return -vector if vector[significant[0]] < 0 else vector.copy()


def _round_robin(size: int) -> List[Tuple[np.ndarray, np.ndarray]]:
    """Disjoint (p, q) index pairs per round, covering every pair once per sweep"""
    players = list(range(size + size % 2))
    count = len(players)
    rounds = []
    for _ in range(count - 1):
        pairs = [(players[i], players[count - 1 - i]) for i in range(count // 2)]
        pairs = [(min(a, b), max(a, b)) for a, b in pairs if a < size and b < size]
        rounds.append((np.array([p for p, _ in pairs], dtype=int), np.array([q for _, q in pairs], dtype=int)))
        players = [players[0], players[-1]] + players[1:-1]
    return rounds


def eig_sym(
    m: BandedSymMatrix,
    tol: Optional[float] = None,
    max_sweeps: Optional[int] = None,
) -> EigenResult:
    """
    Full eigendecomposition by cyclic Jacobi rotations

    Each sweep visits every (p, q) pair once in a fixed round-robin order,
    rotating the disjoint pairs of a round together. A pair is skipped when
    |a_pq| <= tol * sqrt(|a_pp a_qq|), which keeps small eigenvalues of graded
    matrices accurate to high relative precision.
    """
    settings = get_settings()
    tol = settings.jacobi_tol if tol is None else tol
    max_sweeps = settings.jacobi_max_sweeps if max_sweeps is None else max_sweeps

    a = np.array(m.entries, dtype=float)
    dim = m.dim
    v = np.eye(dim)
    rounds = _round_robin(dim)

    for sweep in range(1, max_sweeps + 1):
        rotated = False
        for p_all, q_all in rounds:
            if p_all.size == 0:
                continue
            apq = a[p_all, q_all]
            app = a[p_all, p_all]
            aqq = a[q_all, q_all]
            active = np.abs(apq) > tol * np.sqrt(np.abs(app)) * np.sqrt(np.abs(aqq))
            if not np.any(active):
                continue
            rotated = True
            p, q = p_all[active], q_all[active]
            apq, app, aqq = apq[active], app[active], aqq[active]

            tau = (aqq - app) / (2.0 * apq)
            tt = np.where(tau >= 0, 1.0, -1.0) / (np.abs(tau) + np.hypot(1.0, tau))
            c = 1.0 / np.sqrt(1.0 + tt * tt)
            s = tt * c

            col_p, col_q = a[:, p].copy(), a[:, q].copy()
            a[:, p] = c * col_p - s * col_q
            a[:, q] = s * col_p + c * col_q
            row_p, row_q = a[p, :].copy(), a[q, :].copy()
            a[p, :] = c[:, None] * row_p - s[:, None] * row_q
            a[q, :] = s[:, None] * row_p + c[:, None] * row_q
            a[p, p] = app - tt * apq
            a[q, q] = aqq + tt * apq
            a[p, q] = 0.0
            a[q, p] = 0.0

            vec_p, vec_q = v[:, p].copy(), v[:, q].copy()
            v[:, p] = c * vec_p - s * vec_q
            v[:, q] = s * vec_p + c * vec_q

        if not rotated:
            order = np.argsort(np.diag(a), kind="stable")
            values = np.diag(a)[order].copy()
            vectors = v[:, order]
            residuals = m.entries @ vectors - vectors * values
            residual_bound = float(np.max(np.linalg.norm(residuals, axis=0)))
            logger.debug("jacobi converged", dim=dim, sweeps=sweep, residual_bound=residual_bound)
            return EigenResult(values=values, vectors=vectors, residual_bound=residual_bound, sweeps=sweep, dim=dim)

    raise EigenConvergenceError(f"Jacobi did not converge in {max_sweeps} sweeps (dim={dim})")


def converged_eigen(
    dp: DerivedParams,
    n_keep: int,
    rel_tol: float = 1e-10,
    dim_cap: Optional[int] = None,
) -> EigenResult:
    """Diagonalize h at doubling dims until the lowest n_keep eigenvalues settle"""
    if n_keep < 1:
        raise DeformationDomainError(f"n_keep must be >= 1, got {n_keep}")
    settings_cap = get_settings().dim_cap
    dim_cap = settings_cap if dim_cap is None else min(dim_cap, settings_cap)
    dim = max(4 * n_keep, 4)
    previous = None
    while dim <= dim_cap:
        try:
            result = eig_sym(hamiltonian(dim, dp))
        except QOverflowError as e:
            raise EigenConvergenceError(
                f"h leaves double precision at dim={dim} before {n_keep} eigenvalues settled"
            ) from e
        current = result.values[:n_keep]
        if previous is not None:
            change = float(np.max(np.abs(current - previous) / np.abs(current)))
            logger.debug("dimension doubled", dim=dim, change=change)
            if change < rel_tol:
                return result
        previous = current
        dim *= 2
    raise EigenConvergenceError(f"lowest {n_keep} eigenvalues did not settle to {rel_tol} below dim {dim_cap}")

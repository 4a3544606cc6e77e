"""Exact spectral routines: a cyclic Jacobi symmetric eigensolver, exact
singular values and nuclear norm, numerical rank, and the normalized
matrix-entropy baseline.

The Jacobi solver sweeps a round-robin schedule of index pairs. Every
round rotates disjoint pairs, so the whole round is applied as one
vectorized update. Convergence is judged on the off-diagonal Frobenius
norm relative to the input's Frobenius norm; an absolute threshold would
be unreachable for matrices with large norms, whose attainable floor
scales with the norm itself.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .core import (
    ConvergenceError,
    DegenerateSampleError,
    _normalize_validated,
    as_matrix,
)

TOL_JACOBI = 1e-10
MAX_SWEEPS = 100
# Eigenvalues of a numerically PSD Gram matrix may dip about this far
# below zero, relative to the largest eigenvalue, from round-off alone.
# They are clamped to zero before any square root.
EPS_SYM = 1e-12

_SOLVERS = ("jacobi", "lapack")


@dataclass(frozen=True)
class Spectrum:
    """Eigen- or singular values sorted descending, plus solver outcome.

    converged is False when the off-diagonal mass did not fall below the
    threshold within the sweep budget; values then hold the best partial
    result rather than nothing.
    """

    values: np.ndarray
    converged: bool
    sweeps_used: int


@lru_cache(maxsize=32)
def _rotation_rounds(n: int) -> tuple[tuple[np.ndarray, np.ndarray], ...]:
    """Round-robin schedule visiting every index pair once per sweep.

    Pairs within a round are disjoint, so their rotations commute and can
    be applied simultaneously.
    """
    if n < 2:
        return ()
    m = n if n % 2 == 0 else n + 1
    players = list(range(m))
    rounds = []
    for _ in range(m - 1):
        half = m // 2
        top = players[:half]
        bottom = players[half:][::-1]
        ps, qs = [], []
        for a, b in zip(top, bottom):
            if a < n and b < n:
                ps.append(min(a, b))
                qs.append(max(a, b))
        rounds.append((np.asarray(ps, dtype=np.intp), np.asarray(qs, dtype=np.intp)))
        players = [players[0]] + [players[-1]] + players[1:-1]
    return tuple(rounds)


def _off_diagonal_norm(A: np.ndarray) -> float:
    # Summed directly from the off-diagonal entries: the subtraction trick
    # sqrt(||A||_F^2 - ||diag||^2) cancels catastrophically and cannot
    # resolve off-diagonal mass below ~sqrt(eps) * ||A||_F.
    off = A.copy()
    np.fill_diagonal(off, 0.0)
    return float(np.linalg.norm(off))


def _jacobi_sweep(A: np.ndarray, rounds) -> None:
    """One full cyclic sweep of symmetric Jacobi rotations, in place."""
    for ps, qs in rounds:
        apq = A[ps, qs]
        rotate = np.abs(apq) > 0.0
        if not rotate.any():
            continue
        app = A[ps, ps]
        aqq = A[qs, qs]
        # Smaller root of t^2 + 2*tau*t - 1 = 0, the stable rotation
        # choice. An overflowing tau (vanishing pivot) maps to t = 0,
        # which skips the rotation, so the overflow is benign.
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            tau = np.zeros_like(apq)
            np.divide(aqq - app, 2.0 * apq, out=tau, where=rotate)
            sign = np.where(tau >= 0.0, 1.0, -1.0)
            t = np.where(rotate, sign / (np.abs(tau) + np.hypot(1.0, tau)), 0.0)
        c = 1.0 / np.sqrt(1.0 + t * t)
        s = t * c

        rp = A[ps, :]
        rq = A[qs, :]
        A[ps, :] = c[:, None] * rp - s[:, None] * rq
        A[qs, :] = s[:, None] * rp + c[:, None] * rq
        cp = A[:, ps]
        cq = A[:, qs]
        A[:, ps] = cp * c - cq * s
        A[:, qs] = cp * s + cq * c


def _eigenvalues_of_symmetric(work: np.ndarray, tol_jacobi: float, max_sweeps: int, solver: str) -> Spectrum:
    """Solver core for a matrix already known to be symmetric.

    `work` must be a fresh symmetric float64 array; the Jacobi path
    destroys it. Used directly for Gram matrices built in this module,
    which are symmetric by construction and need no re-validation.
    """
    if solver == "lapack":
        values = np.linalg.eigvalsh(work)[::-1]
        return Spectrum(values=np.ascontiguousarray(values), converged=True, sweeps_used=0)
    if solver != "jacobi":
        raise ValueError(f"unknown solver {solver!r}, expected one of {_SOLVERS}")
    threshold = tol_jacobi * float(np.linalg.norm(work))
    rounds = _rotation_rounds(work.shape[0])
    sweeps = 0
    converged = _off_diagonal_norm(work) <= threshold
    while not converged and sweeps < max_sweeps:
        _jacobi_sweep(work, rounds)
        sweeps += 1
        converged = _off_diagonal_norm(work) <= threshold
    values = np.sort(np.diagonal(work))[::-1]
    return Spectrum(values=np.ascontiguousarray(values), converged=bool(converged), sweeps_used=sweeps)


def symmetric_eigenvalues(
    S,
    *,
    tol_jacobi: float = TOL_JACOBI,
    max_sweeps: int = MAX_SWEEPS,
    solver: str = "jacobi",
) -> Spectrum:
    """Eigenvalues of a square symmetric matrix, sorted descending.

    The default solver is the cyclic Jacobi iteration: it stops once the
    off-diagonal Frobenius norm falls below tol_jacobi times the input's
    Frobenius norm, or reports converged=False with partial values after
    max_sweeps. solver="lapack" delegates to numpy.linalg.eigvalsh for
    callers that need large problems solved quickly.
    """
    S = as_matrix(S, name="symmetric matrix")
    n, m = S.shape
    if n != m:
        raise ValueError(f"symmetric matrix must be square, got shape {S.shape}")
    scale = float(np.abs(S).max())
    asymmetry = float(np.abs(S - S.T).max())
    if asymmetry > 1e-9 * scale:
        raise ValueError(f"input is not symmetric: max |S_ij - S_ji| = {asymmetry:.3e} "
                         f"exceeds 1e-9 * max|S| = {1e-9 * scale:.3e}")
    if solver not in _SOLVERS:
        raise ValueError(f"unknown solver {solver!r}, expected one of {_SOLVERS}")
    return _eigenvalues_of_symmetric((S + S.T) / 2.0, tol_jacobi, max_sweeps, solver)


def singular_values(
    A,
    *,
    tol_jacobi: float = TOL_JACOBI,
    max_sweeps: int = MAX_SWEEPS,
    solver: str = "jacobi",
) -> Spectrum:
    """Exact singular values of A, descending, length min(rows, cols).

    Eigendecomposes the smaller Gram matrix (A^T A when cols <= rows,
    else A A^T), clamps round-off negatives to zero, and takes square
    roots. A non-converged eigensolve is passed through in the flag.
    """
    A = as_matrix(A)
    rows, cols = A.shape
    gram = A.T @ A if cols <= rows else A @ A.T
    if solver == "jacobi":
        # blocked matmul does not guarantee bitwise-symmetric output
        gram = (gram + gram.T) / 2.0
    spectrum = _eigenvalues_of_symmetric(gram, tol_jacobi, max_sweeps, solver)
    values = np.maximum(spectrum.values, 0.0)
    return Spectrum(values=np.sqrt(values), converged=spectrum.converged, sweeps_used=spectrum.sweeps_used)


def exact_nuclear_norm(
    A,
    *,
    tol_jacobi: float = TOL_JACOBI,
    max_sweeps: int = MAX_SWEEPS,
    solver: str = "jacobi",
) -> float:
    """Sum of the exact singular values of A."""
    spectrum = singular_values(A, tol_jacobi=tol_jacobi, max_sweeps=max_sweeps, solver=solver)
    if not spectrum.converged:
        raise ConvergenceError(f"eigensolver did not converge within {max_sweeps} sweeps")
    return float(spectrum.values.sum())


def numerical_rank(
    A,
    tol_rank: float = 1e-8,
    *,
    tol_jacobi: float = TOL_JACOBI,
    max_sweeps: int = MAX_SWEEPS,
    solver: str = "jacobi",
) -> int:
    """Number of singular values above tol_rank times the largest one."""
    if not tol_rank > 0:
        raise ValueError(f"tol_rank must be positive, got {tol_rank!r}")
    spectrum = singular_values(A, tol_jacobi=tol_jacobi, max_sweeps=max_sweeps, solver=solver)
    if not spectrum.converged:
        raise ConvergenceError(f"eigensolver did not converge within {max_sweeps} sweeps")
    largest = float(spectrum.values[0]) if spectrum.values.size else 0.0
    return int(np.count_nonzero(spectrum.values > tol_rank * largest))


def sample_matrix_entropy(
    Z,
    *,
    tol_jacobi: float = TOL_JACOBI,
    max_sweeps: int = MAX_SWEEPS,
    solver: str = "jacobi",
) -> float:
    """Normalized spectral entropy of one sample's hidden-state matrix.

    Pipeline: center and row-normalize Z, form K = (1/m) Z_norm^T Z_norm,
    trace-normalize K so its eigenvalues are a probability spectrum, then
    return (-sum lambda_i ln lambda_i) / ln d with the 0 * ln 0 = 0
    convention. The result lies in [0, 1].
    """
    Z = as_matrix(Z, name="sample")
    m, d = Z.shape
    if m < 2:
        raise ValueError(f"sample needs at least two rows, got {m}")
    normalized, _ = _normalize_validated(Z)
    gram = normalized.T @ normalized / m
    trace = float(np.trace(gram))
    if trace <= 0.0:
        raise DegenerateSampleError("degenerate sample: every centered row is zero")
    gram /= trace
    if solver == "jacobi":
        # blocked matmul does not guarantee bitwise-symmetric output
        gram = (gram + gram.T) / 2.0
    spectrum = _eigenvalues_of_symmetric(gram, tol_jacobi, max_sweeps, solver)
    if not spectrum.converged:
        raise ConvergenceError(f"eigensolver did not converge within {max_sweeps} sweeps")
    if d == 1:
        return 0.0
    lam = np.maximum(spectrum.values, 0.0)
    positive = lam > 0.0
    entropy = -float(np.sum(lam[positive] * np.log(lam[positive])))
    return float(np.clip(entropy / math.log(d), 0.0, 1.0))


def dataset_matrix_entropy(
    samples,
    *,
    tol_jacobi: float = TOL_JACOBI,
    max_sweeps: int = MAX_SWEEPS,
    solver: str = "jacobi",
) -> float:
    """Mean per-sample matrix entropy over a dataset of samples.

    Every sample must share the same feature dimension d; the division by
    n log d in the dataset formula distributes as per-sample log d
    normalization followed by an arithmetic mean.
    """
    matrices = [as_matrix(Z, name=f"sample {i}") for i, Z in enumerate(samples)]
    if not matrices:
        raise ValueError("dataset entropy needs at least one sample")
    d = matrices[0].shape[1]
    for i, Z in enumerate(matrices):
        if Z.shape[1] != d:
            raise ValueError(f"sample {i} has {Z.shape[1]} columns, expected {d} like sample 0")
    entropies = [
        sample_matrix_entropy(Z, tol_jacobi=tol_jacobi, max_sweeps=max_sweeps, solver=solver)
        for Z in matrices
    ]
    return float(np.mean(entropies))

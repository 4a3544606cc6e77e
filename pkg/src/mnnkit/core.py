"""Matrix validation and the normalization primitives shared by every metric.

A matrix here is always a dense 2-D float64 ndarray in row-major order:
rows are tokens or batch samples, columns are feature or category
dimensions. All inputs are promoted to 64-bit before any arithmetic.
"""

from __future__ import annotations

import numpy as np

# Centered rows whose L2 norm falls at or below this are returned as
# exact zero rows instead of being divided by a vanishing norm.
EPS_ROW = 1e-12


class MnnkitError(Exception):
    """Base class for every error raised by this package."""


class MatrixFormatError(MnnkitError):
    """A matrix or log-prob file violates the on-disk format contract."""


class ManifestFormatError(MnnkitError):
    """A sample manifest violates the manifest schema."""


class DegenerateSampleError(MnnkitError):
    """Every row of a sample collapsed to zero after centering."""


class ConvergenceError(MnnkitError):
    """The iterative eigensolver stopped before reaching its tolerance."""


def as_matrix(values, *, name: str = "matrix") -> np.ndarray:
    """Validate array-like input and return it as a 2-D float64 array.

    Enforces the shared matrix contract: exactly two dimensions, at least
    one row and one column, every element finite, 64-bit storage in
    row-major order. 32-bit input is promoted, never kept.
    """
    arr = np.asarray(values, dtype=np.float64)
    if arr.ndim != 2:
        raise ValueError(f"{name} must be 2-D, got {arr.ndim}-D shape {arr.shape}")
    if arr.shape[0] < 1 or arr.shape[1] < 1:
        raise ValueError(f"{name} must have at least one row and one column, got shape {arr.shape}")
    if not np.isfinite(arr).all():
        bad = np.argwhere(~np.isfinite(arr))[0]
        raise ValueError(f"{name} contains a non-finite value at row {bad[0]}, column {bad[1]}")
    return np.ascontiguousarray(arr)


def mean_embedding(X) -> np.ndarray:
    """Return the per-column mean of X as a vector of length cols."""
    X = as_matrix(X)
    return X.mean(axis=0)


def _normalize_validated(X: np.ndarray) -> tuple[np.ndarray, bool]:
    """Centering and row normalization for an already validated matrix.

    Returns the normalized matrix and whether any row survived the
    centering (False means every centered row was zero). Callers that
    score matrices validate once and then stay on this trusted path.
    """
    centered = X - X.mean(axis=0)
    norms = np.sqrt(np.einsum("ij,ij->i", centered, centered))
    live = norms > EPS_ROW
    safe = np.where(live, norms, 1.0)
    centered /= safe[:, None]
    centered[~live] = 0.0
    return centered, bool(live.any())


def center_and_row_normalize(X) -> np.ndarray:
    """Subtract the column means from X and scale each row to unit L2 norm.

    Rows whose centered norm is at or below EPS_ROW come back as all-zero
    rows; they carry no direction and would otherwise divide by ~0.
    """
    normalized, _ = _normalize_validated(as_matrix(X))
    return normalized


def column_l2_norms(X) -> np.ndarray:
    """Return the Euclidean norm of each column, a vector of length cols."""
    X = as_matrix(X)
    return np.sqrt(np.einsum("ij,ij->j", X, X))

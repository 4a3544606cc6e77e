"""Metrics on prediction matrices and token-level log-probabilities:
Shannon entropy, Frobenius norm and its row-stochastic bounds, the
nuclear-norm sandwich check, cross-entropy, and perplexity.

All logarithms are natural. Perplexity must invert cross-entropy through
exp, which forces one shared base; natural log is used artifact-wide.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import as_matrix
from .spectral import exact_nuclear_norm

# Softmax rows serialized at 32-bit precision drift at about 1e-7, so
# row sums are checked against 1 with this tolerance.
ROW_SUM_TOL = 1e-6
# Slack applied to every inequality check below.
BOUND_SLACK = 1e-9


@dataclass(frozen=True)
class BoundsCheck:
    """Outcome of the nuclear-vs-Frobenius sandwich on one matrix.

    lower_ok: nuclear / sqrt(d_min) <= frobenius <= nuclear.
    upper_ok: nuclear <= sqrt(d_min) * frobenius, and additionally
    nuclear <= sqrt(d_min * rows) when the matrix is row-stochastic.
    """

    frobenius: float
    nuclear: float
    lower_ok: bool
    upper_ok: bool
    d_min: int


def _check_row_stochastic(A: np.ndarray, name: str) -> None:
    if (A < 0.0).any() or (A > 1.0).any():
        row = int(np.argwhere((A < 0.0) | (A > 1.0))[0][0])
        raise ValueError(f"{name} row {row} has entries outside [0, 1]")
    sums = A.sum(axis=1)
    bad = np.abs(sums - 1.0) > ROW_SUM_TOL
    if bad.any():
        row = int(np.argmax(bad))
        raise ValueError(f"{name} row {row} sums to {sums[row]!r}, expected 1 within {ROW_SUM_TOL}")


def _is_row_stochastic(A: np.ndarray) -> bool:
    if (A < 0.0).any() or (A > 1.0).any():
        return False
    return bool((np.abs(A.sum(axis=1) - 1.0) <= ROW_SUM_TOL).all())


def shannon_entropy(A) -> float:
    """Mean per-row Shannon entropy of a row-stochastic matrix, in nats.

    Computes -(1/rows) * sum A_ij ln A_ij with 0 * ln 0 = 0. Zero exactly
    when every row is one-hot, the maximal-discriminability case.
    """
    A = as_matrix(A, name="prediction matrix")
    _check_row_stochastic(A, "prediction matrix")
    positive = A > 0.0
    terms = np.zeros_like(A)
    terms[positive] = A[positive] * np.log(A[positive])
    return float(-terms.sum() / A.shape[0])


def frobenius_norm(A) -> float:
    """Square root of the sum of squared entries."""
    A = as_matrix(A)
    return float(np.linalg.norm(A))


def frobenius_bounds(B: int, C: int) -> tuple[float, float]:
    """Frobenius norm bounds (sqrt(B/C), sqrt(B)) for a row-stochastic B x C matrix.

    The lower bound is attained by uniform rows, the upper by one-hot rows.
    """
    if B < 1 or C < 1:
        raise ValueError(f"matrix dimensions must be >= 1, got B={B}, C={C}")
    return (math.sqrt(B / C), math.sqrt(B))


def nuclear_bounds_check(A, *, solver: str = "jacobi") -> BoundsCheck:
    """Verify the nuclear-vs-Frobenius sandwich inequalities on A.

    With D = min(rows, cols): nuclear / sqrt(D) <= frobenius <= nuclear
    <= sqrt(D) * frobenius; row-stochastic matrices additionally satisfy
    nuclear <= sqrt(D * rows). Each comparison gets BOUND_SLACK of slack.
    """
    A = as_matrix(A)
    rows, cols = A.shape
    d_min = min(rows, cols)
    fro = float(np.linalg.norm(A))
    nuc = exact_nuclear_norm(A, solver=solver)
    lower_ok = (nuc / math.sqrt(d_min) <= fro + BOUND_SLACK) and (fro <= nuc + BOUND_SLACK)
    upper_ok = nuc <= math.sqrt(d_min) * fro + BOUND_SLACK
    if _is_row_stochastic(A):
        upper_ok = upper_ok and nuc <= math.sqrt(d_min * rows) + BOUND_SLACK
    return BoundsCheck(frobenius=fro, nuclear=nuc, lower_ok=bool(lower_ok), upper_ok=bool(upper_ok), d_min=d_min)


def as_logprobs(values, *, name: str = "log-probs") -> np.ndarray:
    """Validate a per-token natural-log probability vector.

    Must be 1-D with at least one entry, all finite, all <= 0.
    """
    arr = np.asarray(values, dtype=np.float64)
    if arr.ndim != 1:
        raise ValueError(f"{name} must be 1-D, got {arr.ndim}-D shape {arr.shape}")
    if arr.size < 1:
        raise ValueError(f"{name} must hold at least one value")
    if not np.isfinite(arr).all():
        idx = int(np.argmax(~np.isfinite(arr)))
        raise ValueError(f"{name} has a non-finite value at index {idx}")
    if (arr > 0.0).any():
        idx = int(np.argmax(arr > 0.0))
        raise ValueError(f"{name} value at index {idx} is positive ({arr[idx]!r}); log-probabilities must be <= 0")
    return arr


def cross_entropy(lp) -> float:
    """Mean negative log-likelihood per token: -(1/T) * sum of log-probs."""
    lp = as_logprobs(lp)
    return float(-lp.mean())


def perplexity(lp) -> float:
    """exp of the cross-entropy; stays in log space until one final exp."""
    return math.exp(cross_entropy(lp))

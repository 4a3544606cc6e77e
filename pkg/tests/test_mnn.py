"""Column-norm approximation of the nuclear norm and the normalized
score built on it: accuracy against the exact spectrum, invariances,
and configuration handling."""

import numpy as np
import pytest

from testutil import peaked_row_stochastic
from mnnkit.core import DegenerateSampleError, center_and_row_normalize
from mnnkit.mnn import (
    MnnConfig,
    approx_nuclear_norm,
    approx_singular_values,
    matrix_nuclear_norm,
)
from mnnkit.spectral import exact_nuclear_norm, singular_values


def test_approx_singular_values_simple():
    out = approx_singular_values(np.eye(2))
    assert np.array_equal(out, [1.0, 1.0])
    out = approx_singular_values([[1.0, 0.0], [1.0, 0.0]])
    assert np.allclose(out, [np.sqrt(2.0), 0.0])


def test_approx_singular_values_are_descending_with_one_per_column():
    rng = np.random.default_rng(2)
    A = rng.standard_normal((30, 12))
    out = approx_singular_values(A)
    assert out.shape == (12,)
    assert (np.diff(out) <= 0.0).all()
    assert np.array_equal(out, approx_singular_values(A))


def test_approx_matches_svd_on_peaked_rows():
    # Near-one-hot rows concentrate the spectrum in the column norms;
    # calibrated worst per-value error on this fixture is 0.44%.
    A = peaked_row_stochastic(64, 8, peak=0.99, seed=5)
    approx = approx_singular_values(A)
    exact = np.linalg.svd(A, compute_uv=False)
    rel = np.abs(approx - exact) / exact
    assert rel.max() <= 0.05


def test_approx_error_shrinks_as_rows_peak():
    errors = []
    for peak in (0.5, 0.9, 0.99, 0.999):
        A = peaked_row_stochastic(64, 8, peak=peak, seed=5)
        exact = float(np.linalg.svd(A, compute_uv=False).sum())
        errors.append(abs(approx_nuclear_norm(A) - exact) / exact)
    assert all(b <= a + 1e-15 for a, b in zip(errors, errors[1:]))
    assert errors[-1] < 0.01


def test_approx_is_exact_for_orthogonal_columns():
    # One nonzero per row makes the columns mutually orthogonal, so the
    # sorted column norms are exactly the singular values.
    rng = np.random.default_rng(31)
    A = np.zeros((12, 5))
    cols = rng.integers(0, 5, size=12)
    A[np.arange(12), cols] = rng.uniform(0.5, 2.0, size=12) * rng.choice([-1.0, 1.0], size=12)
    approx = approx_singular_values(A)
    exact = singular_values(A).values
    assert np.max(np.abs(approx[:5] - exact)) <= 1e-9
    assert abs(approx_nuclear_norm(A) - exact_nuclear_norm(A)) <= 1e-9


def test_approx_nuclear_norm_simple():
    assert abs(approx_nuclear_norm(np.eye(2)) - 2.0) <= 1e-12
    assert abs(approx_nuclear_norm(np.diag([3.0, 4.0])) - 7.0) <= 1e-12


def test_approx_nuclear_norm_top_d():
    A = np.diag([3.0, 4.0])
    assert abs(approx_nuclear_norm(A, MnnConfig(top_d=1)) - 4.0) <= 1e-12
    # default top_d is min(rows, cols): a wide matrix keeps only the
    # strongest rows-many columns
    wide = np.hstack([np.eye(2) * 5.0, np.ones((2, 3))])
    kept = approx_nuclear_norm(wide)
    norms = np.sort(np.linalg.norm(wide, axis=0))[::-1]
    assert abs(kept - norms[:2].sum()) <= 1e-12
    with pytest.raises(ValueError, match="top_d=7 exceeds the column count 5"):
        approx_nuclear_norm(wide, MnnConfig(top_d=7))


def test_approx_invariances():
    rng = np.random.default_rng(12)
    A = rng.standard_normal((24, 10))
    base = approx_singular_values(A)
    permuted_rows = approx_singular_values(A[rng.permutation(24)])
    assert np.max(np.abs(base - permuted_rows)) <= 1e-12
    permuted_cols = approx_singular_values(A[:, rng.permutation(10)])
    assert np.max(np.abs(base - permuted_cols)) <= 1e-12


def test_matrix_nuclear_norm_identity_fixture():
    # Centering the identity gives orthogonal rows of equal norm, so the
    # normalized score is 1 up to the row-norm division round-off.
    assert abs(matrix_nuclear_norm(np.eye(2)) - 1.0) <= 1e-12
    assert abs(matrix_nuclear_norm(np.eye(8)) - 1.0) <= 1e-12


def test_matrix_nuclear_norm_is_the_composed_pipeline():
    rng = np.random.default_rng(9)
    X = rng.standard_normal((128, 16))
    composed = approx_nuclear_norm(center_and_row_normalize(X)) / 128
    assert matrix_nuclear_norm(X) == composed


def test_matrix_nuclear_norm_range_on_unit_rows():
    # Top-D column norms of a unit-row matrix sum to at most sqrt(D * m)
    # by Cauchy-Schwarz, so the length-normalized score is bounded.
    rng = np.random.default_rng(40)
    for _ in range(20):
        m = int(rng.integers(4, 64))
        d = int(rng.integers(2, 12))
        X = rng.standard_normal((m, d))
        value = matrix_nuclear_norm(X)
        assert 0.0 < value <= np.sqrt(min(m, d) / m) + 1e-9


def test_matrix_nuclear_norm_invariances():
    rng = np.random.default_rng(14)
    X = rng.standard_normal((40, 6))
    base = matrix_nuclear_norm(X)
    assert abs(matrix_nuclear_norm(X + 11.5) - base) <= 1e-9
    assert abs(matrix_nuclear_norm(X * 3.0) - base) <= 1e-12
    assert abs(matrix_nuclear_norm(X[rng.permutation(40)]) - base) <= 1e-9


def test_matrix_nuclear_norm_length_override():
    rng = np.random.default_rng(15)
    X = rng.standard_normal((20, 5))
    base = matrix_nuclear_norm(X)
    halved = matrix_nuclear_norm(X, MnnConfig(length_override=40))
    assert abs(halved - base / 2.0) <= 1e-15


def test_matrix_nuclear_norm_streams_large_inputs_identically():
    # Wide enough that the streaming path splits the rows into several
    # blocks; the result must match the composed pipeline regardless.
    rng = np.random.default_rng(16)
    X = rng.standard_normal((4096, 96))
    composed = approx_nuclear_norm(center_and_row_normalize(X)) / 4096
    assert abs(matrix_nuclear_norm(X) - composed) <= 1e-12 * composed


def test_matrix_nuclear_norm_degenerate_input():
    with pytest.raises(DegenerateSampleError, match="degenerate sample"):
        matrix_nuclear_norm(np.full((4, 3), 1.25))


def test_mnn_config_validation():
    with pytest.raises(ValueError, match="top_d must be >= 1"):
        MnnConfig(top_d=0)
    with pytest.raises(ValueError, match="length_override must be >= 1"):
        MnnConfig(length_override=0)
    config = MnnConfig()
    assert config.top_d is None
    assert config.length_override is None

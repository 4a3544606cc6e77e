"""Validation and normalization primitives: matrix coercion, mean
embedding, centering with row normalization, and column L2 norms."""

import math

import numpy as np
import pytest

from mnnkit.core import (
    EPS_ROW,
    as_matrix,
    center_and_row_normalize,
    column_l2_norms,
    mean_embedding,
)


def test_as_matrix_promotes_float32():
    X = np.array([[1.5, 2.0], [3.0, 4.0]], dtype=np.float32)
    out = as_matrix(X)
    assert out.dtype == np.float64
    assert out.flags["C_CONTIGUOUS"]
    assert np.array_equal(out, [[1.5, 2.0], [3.0, 4.0]])


def test_as_matrix_accepts_nested_lists():
    out = as_matrix([[1, 2], [3, 4]])
    assert out.dtype == np.float64
    assert out.shape == (2, 2)


def test_as_matrix_makes_fortran_input_row_major():
    X = np.asfortranarray(np.arange(6.0).reshape(2, 3))
    out = as_matrix(X)
    assert out.flags["C_CONTIGUOUS"]
    assert np.array_equal(out, X)


def test_as_matrix_rejects_wrong_rank():
    with pytest.raises(ValueError, match="must be 2-D, got 1-D"):
        as_matrix(np.arange(3.0))
    with pytest.raises(ValueError, match="must be 2-D, got 3-D"):
        as_matrix(np.zeros((2, 2, 2)))
    with pytest.raises(ValueError, match="must be 2-D, got 0-D"):
        as_matrix(np.float64(1.0))


def test_as_matrix_rejects_empty():
    with pytest.raises(ValueError, match="at least one row and one column"):
        as_matrix(np.empty((0, 4)))
    with pytest.raises(ValueError, match="at least one row and one column"):
        as_matrix(np.empty((4, 0)))


def test_as_matrix_reports_nonfinite_location():
    X = np.ones((3, 4))
    X[1, 2] = np.nan
    with pytest.raises(ValueError, match="non-finite value at row 1, column 2"):
        as_matrix(X)
    X[1, 2] = np.inf
    with pytest.raises(ValueError, match="non-finite value at row 1, column 2"):
        as_matrix(X)


def test_as_matrix_name_appears_in_errors():
    with pytest.raises(ValueError, match="scores must be 2-D"):
        as_matrix(np.arange(3.0), name="scores")


def test_mean_embedding_simple():
    assert np.allclose(mean_embedding([[1.0, 3.0], [3.0, 5.0]]), [2.0, 4.0])
    out = mean_embedding(np.full((5, 3), 7.0))
    assert np.allclose(out, [7.0, 7.0, 7.0])


def test_mean_embedding_matches_scalar_oracle():
    # Frozen from a one-column-at-a-time math.fsum recomputation.
    X = np.random.default_rng(42).random((8, 4))
    expected = [
        0.48568220818029273,
        0.49795990348545893,
        0.6804702751229981,
        0.6466918829544247,
    ]
    out = mean_embedding(X)
    assert out.shape == (4,)
    assert np.max(np.abs(out - np.array(expected))) <= 1e-14
    for j in range(4):
        assert abs(out[j] - math.fsum(X[:, j]) / 8) <= 1e-14


def test_center_and_row_normalize_two_point():
    out = center_and_row_normalize([[1.0, 0.0], [0.0, 1.0]])
    r = math.sqrt(0.5)
    assert np.allclose(out, [[r, -r], [-r, r]], atol=1e-15)


def test_center_and_row_normalize_constant_matrix_is_zero():
    out = center_and_row_normalize(np.full((4, 3), 2.5))
    assert np.array_equal(out, np.zeros((4, 3)))


def test_center_and_row_normalize_row_norms_are_unit():
    rng = np.random.default_rng(7)
    X = rng.standard_normal((16, 8))
    out = center_and_row_normalize(X)
    norms = np.sqrt((out * out).sum(axis=1))
    assert np.max(np.abs(norms - 1.0)) <= 1e-12


def test_center_and_row_normalize_zero_row_guard():
    # Row 2 equals the column mean, so it centers to exactly zero and
    # must come back as a zero row, not a division by ~0.
    v = np.array([2.0, -1.0, 0.5])
    X = np.vstack([v, -v, np.zeros(3)])
    out = center_and_row_normalize(X)
    assert np.array_equal(out[2], np.zeros(3))
    assert abs(np.linalg.norm(out[0]) - 1.0) <= 1e-12
    assert abs(np.linalg.norm(out[1]) - 1.0) <= 1e-12


def test_center_and_row_normalize_does_not_mutate_input():
    rng = np.random.default_rng(3)
    X = rng.standard_normal((6, 4))
    before = X.copy()
    center_and_row_normalize(X)
    assert np.array_equal(X, before)


def test_normalized_matrix_has_zero_mean_embedding():
    out = center_and_row_normalize([[1.0, 0.0], [0.0, 1.0]])
    assert np.max(np.abs(mean_embedding(out))) <= 1e-12


def test_column_l2_norms_simple():
    out = column_l2_norms([[3.0, 0.0], [4.0, 2.0]])
    assert np.allclose(out, [5.0, 2.0])
    assert column_l2_norms(np.eye(3)).shape == (3,)


def test_column_norms_square_to_frobenius():
    rng = np.random.default_rng(42)
    for _ in range(100):
        rows = int(rng.integers(1, 257))
        cols = int(rng.integers(1, 257))
        X = rng.standard_normal((rows, cols))
        total = float((column_l2_norms(X) ** 2).sum())
        fro2 = float(np.linalg.norm(X)) ** 2
        assert abs(total - fro2) <= 1e-9 * max(1.0, fro2)


def test_eps_row_is_tiny():
    assert 0.0 < EPS_ROW <= 1e-10

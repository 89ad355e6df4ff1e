"""Arrowhead Hessian spectra, determinants, and grid minimization."""

import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

import priceflow as pf


def test_f_eval_integer_witness_stays_integer():
    v = pf.f_eval([5, 4, 3, 4, 5], 10)
    assert v == -19
    assert isinstance(v, int)


def test_f_eval_values():
    assert pf.f_eval([], 3) == 9
    assert pf.f_eval([1, 1], 1) == 1
    assert pf.f_eval([0, 0, 0], 0) == 0
    assert pf.f_eval([1.5], 2.0) == pytest.approx(1.5**2 + 4.0 - 3.0)


@given(
    st.lists(st.floats(-20, 20), min_size=1, max_size=8),
    st.floats(-20, 20),
)
def test_f_eval_is_half_the_hessian_quadratic_form(y, z):
    # f is an exact quadratic: f(u) = u^T H u / 2 with u = (y, z)
    u = np.array(y + [z])
    H = pf.build_hessian(len(y))
    expect = 0.5 * float(u @ H @ u)
    assert pf.f_eval(y, z) == pytest.approx(expect, rel=1e-12, abs=1e-9)


def test_build_hessian_shape_and_pattern():
    H = pf.build_hessian(3)
    expected = np.array(
        [
            [2, 0, 0, -1],
            [0, 2, 0, -1],
            [0, 0, 2, -1],
            [-1, -1, -1, 2],
        ]
    )
    assert np.array_equal(H, expected)
    assert H.dtype == np.int64
    with pytest.raises(ValueError):
        pf.build_hessian(0)


def test_det_exact_known_values():
    assert pf.det_exact([[2]]) == 2
    assert pf.det_exact([[0, 1], [1, 0]]) == -1  # needs a row swap
    assert pf.det_exact([[1, 2], [2, 4]]) == 0
    assert pf.det_exact(np.eye(4, dtype=np.int64)) == 1
    assert pf.det_exact(pf.build_hessian(5)) == -16
    assert isinstance(pf.det_exact(pf.build_hessian(5)), int)


def test_det_exact_matches_charpoly_at_integers():
    for n in (1, 2, 3, 5, 8):
        H = pf.build_hessian(n)
        for lam in (-3, -1, 0, 1, 3, 7):
            M = H - lam * np.eye(n + 1, dtype=np.int64)
            assert pf.det_exact(M) == pf.charpoly_eval(n, lam)


def test_det_float_matches_numpy():
    rng = np.random.default_rng(21)
    A = rng.normal(size=(10, 6, 6))
    ours = pf.det(A)
    ref = np.linalg.det(A)
    assert ours.shape == (10,)
    assert np.allclose(ours, ref, rtol=1e-9, atol=1e-12)
    single = pf.det(A[0])
    assert isinstance(single, float)
    assert single == pytest.approx(ref[0], rel=1e-9)


def test_det_float_edge_cases():
    assert pf.det(np.empty((0, 0))) == 1.0
    assert pf.det([[0.0, 1.0], [0.0, 2.0]]) == 0.0  # singular, zero pivot
    with pytest.raises(ValueError):
        pf.det(np.ones((2, 3)))


def test_schur_det_agrees_with_direct():
    rng = np.random.default_rng(22)
    for _ in range(20):
        k, m = int(rng.integers(1, 5)), int(rng.integers(1, 4))
        M = rng.normal(size=(k + m, k + m)) + np.eye(k + m) * 3.0
        A, B = M[:k, :k], M[:k, k:]
        C, Db = M[k:, :k], M[k:, k:]
        assert pf.schur_det(A, B, C, Db) == pytest.approx(
            float(np.linalg.det(M)), rel=1e-9, abs=1e-12
        )


def test_schur_det_batched():
    rng = np.random.default_rng(23)
    M = rng.normal(size=(7, 5, 5)) + np.eye(5) * 4.0
    got = pf.schur_det(M[:, :3, :3], M[:, :3, 3:], M[:, 3:, :3], M[:, 3:, 3:])
    assert np.allclose(got, np.linalg.det(M), rtol=1e-9)


def test_schur_det_rejects_mismatched_blocks():
    with pytest.raises(ValueError):
        pf.schur_det(np.eye(2), np.ones((3, 1)), np.ones((1, 2)), np.eye(1))


def test_schur_det_singular_head_block_raises():
    with pytest.raises(np.linalg.LinAlgError):
        pf.schur_det(np.zeros((2, 2)), np.ones((2, 1)), np.ones((1, 2)), np.eye(1))


def test_charpoly_eval_forms():
    assert pf.charpoly_eval(5, 0) == -16
    assert isinstance(pf.charpoly_eval(5, 0), int)
    lam = np.array([0.0, 1.0, 2.0])
    vals = pf.charpoly_eval(1, lam)
    assert np.allclose(vals, (2 - lam) ** 0 * (lam * lam - 4 * lam + 3))


def test_eigenvalues_structure():
    res = pf.eigenvalues(5)
    assert res.n == 5
    vals = np.sort(res.eigenvalues)
    expect = np.sort([2 - math.sqrt(5)] + [2.0] * 4 + [2 + math.sqrt(5)])
    assert np.allclose(vals, expect, atol=1e-12)
    assert res.min_eigenvalue == pytest.approx(2 - math.sqrt(5), abs=1e-12)
    assert not res.convex


def test_eigenvalues_tiny_case():
    res = pf.eigenvalues(1)
    assert np.allclose(np.sort(res.eigenvalues), [1.0, 3.0])
    assert res.convex


def test_eigenvalues_numeric_check_toggle():
    # beyond the auto-check limit the closed form is still usable, and an
    # explicit opt-in cross-checks it numerically
    big = pf.NUMERIC_CHECK_LIMIT + 8
    assert pf.eigenvalues(big, numeric_check=False).min_eigenvalue < 0
    assert pf.eigenvalues(big, numeric_check=True).min_eigenvalue < 0


def test_convexity_verdict_threshold():
    assert [pf.convexity_verdict(n) for n in (1, 2, 3, 4)] == [True] * 4
    assert [pf.convexity_verdict(n) for n in (5, 6, 20, 64)] == [False] * 4


def test_grid_min_finds_negative_cell_for_n5():
    got = pf.grid_min(5)
    assert got.value == -25.0
    assert np.array_equal(got.y, np.full(5, 5.0))
    assert got.z == 10.0
    assert pf.f_eval(got.y, got.z) == got.value


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_grid_min_origin_for_small_n(n):
    got = pf.grid_min(n)
    assert got.value == 0.0
    assert np.array_equal(got.y, np.zeros(n))
    assert got.z == 0.0


@pytest.mark.parametrize("n", [1, 2, 3])
def test_grid_min_matches_exhaustive(n):
    fast = pf.grid_min(n, 0.0, 4.0, 0.5)
    slow = pf.grid_min_exhaustive(n, 0.0, 4.0, 0.5)
    assert fast.value == slow.value
    assert np.array_equal(fast.y, slow.y) and fast.z == slow.z


def test_grid_min_matches_exhaustive_away_from_origin():
    # exclude the origin so the argmin is nontrivial on both paths
    fast = pf.grid_min(3, 1.0, 10.0, 1.0)
    slow = pf.grid_min_exhaustive(3, 1.0, 10.0, 1.0)
    assert fast.value == slow.value == 1.0
    assert np.array_equal(fast.y, slow.y)
    assert fast.z == slow.z == 1.0


def test_grid_validation():
    with pytest.raises(ValueError):
        pf.grid_min(5, 1.0, 0.0, 0.5)  # hi below lo
    with pytest.raises(ValueError):
        pf.grid_min(5, 0.0, 1.0, 0.0)  # nonpositive step
    with pytest.raises(ValueError):
        pf.grid_min(0)
    with pytest.raises(ValueError):
        pf.grid_min_exhaustive(6)  # exhaustive scan capped at n = 4

"""Arrowhead quadratic form: values, Hessian, spectrum, and grid minima.

The quadratic form under study is

    f(y, z) = sum_i y_i^2 + z^2 - (sum_i y_i) z,   y in R^n, z in R.

Its Hessian is an arrowhead matrix: diagonal 2, last row and column -1
off the diagonal, zeros elsewhere.  The closed-form spectrum is 2 with
multiplicity n - 1 plus the pair 2 +- sqrt(n), so f is convex exactly
for n <= 4; from n = 5 on it takes negative values (for example
f([5,4,3,4,5], 10) = -19) and is unbounded below along that ray.
Everything here is cross-checkable three ways: closed forms, exact
integer elimination, and floating-point elimination or eigensolvers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


def f_eval(y, z):
    """Value of the quadratic form.  Pure Python arithmetic, so integer
    inputs stay exact integers."""
    sum_sq = 0
    total = 0
    for v in y:
        sum_sq = sum_sq + v * v
        total = total + v
    return sum_sq + z * z - total * z


def build_hessian(n: int) -> np.ndarray:
    """Arrowhead Hessian of f for y-dimension n: (n+1) x (n+1), diagonal
    2, last row and column -1.  Satisfies f(x) = x' H x / 2 for
    x = [y; z]."""
    if n < 1:
        raise ValueError(f"n must be a positive integer, got {n!r}")
    H = 2 * np.eye(n + 1, dtype=np.int64)
    H[:n, n] = -1
    H[n, :n] = -1
    return H


def det_exact(M) -> int:
    """Exact determinant of an integer matrix by fraction-free (Bareiss)
    elimination over Python integers; no rounding at any size."""
    a = [[int(v) for v in row] for row in np.asarray(M)]
    k = len(a)
    if any(len(row) != k for row in a):
        raise ValueError("matrix must be square")
    sign = 1
    prev = 1
    for i in range(k - 1):
        if a[i][i] == 0:
            for j in range(i + 1, k):
                if a[j][i] != 0:
                    a[i], a[j] = a[j], a[i]
                    sign = -sign
                    break
            else:
                return 0
        for j in range(i + 1, k):
            for col in range(i + 1, k):
                a[j][col] = (a[j][col] * a[i][i] - a[j][i] * a[i][col]) // prev
            a[j][i] = 0
        prev = a[i][i]
    return sign * a[k - 1][k - 1]


def det(M) -> float | np.ndarray:
    """Floating-point determinant by partially pivoted elimination.

    Accepts a single (k, k) matrix or any stack (..., k, k); stacks are
    eliminated in lockstep, which is what keeps the characteristic
    polynomial cross-checks fast.
    """
    M = np.asarray(M, dtype=float)
    if M.ndim < 2 or M.shape[-1] != M.shape[-2]:
        raise ValueError(f"expected square matrices, got shape {M.shape}")
    batch_shape = M.shape[:-2]
    k = M.shape[-1]
    # reshape(-1, 0, 0) is ambiguous, and the empty matrix has determinant 1
    nbatch = int(np.prod(batch_shape, dtype=np.int64))
    A = M.reshape(nbatch, k, k).copy()
    B = A.shape[0]
    dets = np.ones(B)
    rows = np.arange(B)
    for i in range(k):
        rel = np.abs(A[:, i:, i]).argmax(axis=1)
        piv_rows = rel + i
        swapped = piv_rows != i
        dets[swapped] = -dets[swapped]
        tmp = A[rows, i, :].copy()
        A[rows, i, :] = A[rows, piv_rows, :]
        A[rows, piv_rows, :] = tmp
        pivots = A[:, i, i].copy()
        dets *= pivots
        if i < k - 1:
            safe = np.where(pivots != 0.0, pivots, 1.0)
            factors = A[:, i + 1 :, i] / safe[:, None]
            factors[pivots == 0.0] = 0.0
            A[:, i + 1 :, i:] -= factors[:, :, None] * A[:, i, i:][:, None, :]
    if batch_shape:
        return dets.reshape(batch_shape)
    return float(dets[0])


def schur_det(A, B, C, D) -> float | np.ndarray:
    """Block determinant det([[A, B], [C, D]]) = det(A) det(D - C A^-1 B).

    Blocks may carry matching leading stack dimensions.  A must be
    invertible (np.linalg.LinAlgError otherwise).
    """
    A = np.asarray(A, dtype=float)
    B = np.asarray(B, dtype=float)
    C = np.asarray(C, dtype=float)
    D = np.asarray(D, dtype=float)
    for name, blk in (("A", A), ("B", B), ("C", C), ("D", D)):
        if blk.ndim < 2:
            raise ValueError(f"block {name} must be at least 2-dimensional")
    n, m = A.shape[-1], D.shape[-1]
    if A.shape[-2] != n or D.shape[-2] != m:
        raise ValueError("diagonal blocks must be square")
    if B.shape[-2:] != (n, m) or C.shape[-2:] != (m, n):
        raise ValueError("off-diagonal blocks do not conform")
    X = np.linalg.solve(A, B)
    complement = D - C @ X
    result = det(A) * det(complement)
    if np.ndim(result) == 0:
        return float(result)
    return result


def charpoly_eval(n: int, lam):
    """Closed-form characteristic polynomial of the arrowhead Hessian:

        det(H - lam I) = (2 - lam)^(n-1) (lam^2 - 4 lam + 4 - n).

    Integer inputs stay exact integers.
    """
    if n < 1:
        raise ValueError(f"n must be a positive integer, got {n!r}")
    return (2 - lam) ** (n - 1) * (lam * lam - 4 * lam + 4 - n)


@dataclass(frozen=True)
class SpectrumResult:
    """Spectrum of the arrowhead Hessian for one n."""

    n: int
    eigenvalues: np.ndarray
    min_eigenvalue: float
    convex: bool


#: Largest n for which closed forms are cross-checked numerically; the
#: (2 - lam)^(n-1) factor leaves double range far beyond it.
NUMERIC_CHECK_LIMIT = 64


def eigenvalues(n: int, numeric_check: bool | None = None) -> SpectrumResult:
    """Closed-form spectrum {2 (x (n-1)), 2 - sqrt(n), 2 + sqrt(n)},
    ascending.  Cross-checked against a symmetric eigensolver on the
    actual Hessian (by default up to n = 64); convexity holds exactly
    when the smallest eigenvalue 2 - sqrt(n) is nonnegative, i.e. n <= 4.
    """
    if n < 1:
        raise ValueError(f"n must be a positive integer, got {n!r}")
    root = math.sqrt(n)
    closed = np.sort(np.array([2.0 - root] + [2.0] * (n - 1) + [2.0 + root]))
    if numeric_check is None:
        numeric_check = n <= NUMERIC_CHECK_LIMIT
    if numeric_check:
        numeric = np.linalg.eigvalsh(build_hessian(n).astype(float))
        gap = float(np.abs(numeric - closed).max())
        if gap > 1e-9:
            raise ArithmeticError(
                f"numeric spectrum disagrees with closed form by {gap:.3e} at n={n}"
            )
    return SpectrumResult(
        n=n,
        eigenvalues=closed,
        min_eigenvalue=float(closed[0]),
        convex=bool(2.0 - root >= 0.0),
    )


def convexity_verdict(n: int) -> bool:
    """True exactly for n <= 4: then all eigenvalues are nonnegative and
    the form attains its minimum 0 at the origin over the nonnegative
    orthant.  For n >= 5 one eigenvalue is negative and f is unbounded
    below along any ray through a point with f < 0."""
    if n < 1:
        raise ValueError(f"n must be a positive integer, got {n!r}")
    return n <= 4


@dataclass(frozen=True)
class GridMin:
    """Minimum of f over a uniform grid, with one attaining point."""

    value: float
    y: np.ndarray
    z: float


def _grid(lo: float, hi: float, step: float) -> np.ndarray:
    if not (step > 0 and hi > lo):
        raise ValueError("need hi > lo and step > 0")
    count = int(round((hi - lo) / step)) + 1
    g = lo + step * np.arange(count)
    if abs(g[-1] - hi) > 1e-12 * (1 + abs(hi)):
        raise ValueError(f"step {step} does not partition [{lo}, {hi}]")
    return g


def grid_min(n: int, lo: float = 0.0, hi: float = 10.0, step: float = 0.25) -> GridMin:
    """Exact minimum of f over the grid {lo, lo+step, ..., hi}^(n+1).

    f separates across the y coordinates once z is fixed, so the grid
    minimum equals min over grid z of n * min_u (u^2 - u z) + z^2 with u
    on the same grid.  That reduction scans every grid value of every
    coordinate, so it returns exactly the exhaustive minimum at a cost
    quadratic in the grid size; grid_min_exhaustive checks the identity
    on small n.
    """
    if n < 1:
        raise ValueError(f"n must be a positive integer, got {n!r}")
    g = _grid(lo, hi, step)
    per_u = g[:, None] * g[:, None] - g[:, None] * g[None, :]
    best_u = per_u.min(axis=0)
    best_u_idx = per_u.argmin(axis=0)
    totals = n * best_u + g * g
    j = int(totals.argmin())
    u = float(g[best_u_idx[j]])
    return GridMin(value=float(totals[j]), y=np.full(n, u), z=float(g[j]))


def grid_min_exhaustive(
    n: int, lo: float = 0.0, hi: float = 10.0, step: float = 0.25
) -> GridMin:
    """Literal enumeration of f over the full grid, kept for validating
    the separable reduction.  Memory limits it to n <= 4."""
    if not 1 <= n <= 4:
        raise ValueError("exhaustive enumeration supported for 1 <= n <= 4")
    g = _grid(lo, hi, step)
    sum_y = g.copy()
    sum_sq = g * g
    for _ in range(n - 1):
        sum_y = sum_y[..., None] + g
        sum_sq = sum_sq[..., None] + g * g
    best = math.inf
    best_idx: tuple[int, ...] = ()
    best_z = 0.0
    for z in g:
        f = sum_sq + z * z - sum_y * z
        idx = int(f.argmin())
        val = float(f.reshape(-1)[idx])
        if val < best:
            best = val
            best_idx = np.unravel_index(idx, f.shape)
            best_z = float(z)
    y = np.array([g[i] for i in best_idx], dtype=float)
    return GridMin(value=best, y=y, z=best_z)

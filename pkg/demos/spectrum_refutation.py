"""
Why the aggregate objective is not convex beyond four sources
==============================================================

The quadratic f(y, z) = sum(y^2) + z^2 - sum(y) z looks convex -- each
summand pairs a square with a cross term -- but its Hessian is an
arrowhead matrix whose smallest eigenvalue is 2 - sqrt(n).  Five
sources push it negative, and an explicit integer point certifies it.
"""

import numpy as np

import priceflow as pf

# The counterexample is an exact integer computation: no rounding to
# argue about.
y, z = [5, 4, 3, 4, 5], 10
value = pf.f_eval(y, z)
print("f(%s, %d) = %d   (exact integer arithmetic)" % (y, z, value))
assert value == -19 and isinstance(value, int)

# The Hessian of f at any point (it is a quadratic form) is the
# (n+1) x (n+1) arrowhead below; its characteristic polynomial factors
# in closed form.
H = pf.build_hessian(5)
print()
print("Hessian for n=5:")
print(H)
print()
print("det(H - lam I) = (2 - lam)^(n-1) (lam^2 - 4 lam + 4 - n)")

# Closed form versus two independent determinant routes at a few
# sample points.
for lam in (-1.0, 0.5, 3.25):
    closed = pf.charpoly_eval(5, lam)
    direct = pf.det(H - lam * np.eye(6))
    shifted = H - lam * np.eye(6)
    schur = pf.schur_det(
        shifted[:5, :5], shifted[:5, 5:], shifted[5:, :5], shifted[5:, 5:]
    )
    print("  lam=%5.2f   closed %12.4f   lu %12.4f   schur %12.4f"
          % (lam, closed, direct, schur))

# The spectrum is {2 - sqrt(n), 2 (x n-1), 2 + sqrt(n)}: nonnegative
# exactly while n <= 4.
print()
print(" n   min eigenvalue   convex")
for n in (1, 2, 3, 4, 5, 9, 16, 64):
    spec = pf.eigenvalues(n)
    print("%2d   %+14.6f   %s" % (n, spec.min_eigenvalue, spec.convex))

# A coarse grid over the nonnegative orthant finds the same failure
# without any eigenvalue theory: for n = 5 the minimum over the box is
# strictly negative, while for n <= 4 it is 0 at the origin.
print()
for n in (2, 4, 5):
    res = pf.grid_min(n)
    print("grid minimum, n=%d: f=%+.2f at y=%s, z=%.2f"
          % (n, res.value, np.asarray(res.y), res.z))

"""Dual objective, rate response, and a standalone KKT reference solver.

The allocation problem is ``max sum_s w_s log x_s`` over ``x in [m, M]``
subject to ``R x <= c``.  Relaxing the capacity constraints with prices
``p >= 0`` gives the dual

    D(p) = sum_s max_{x in [m_s, M_s]} (w_s log x - x q_s) + p . c,

with ``q_s = sum_{l in path(s)} p_l`` the path price.  D is convex and
continuously differentiable; minimizing it over the nonnegative orthant
recovers the optimal allocation.  The inner maximum has the closed form
``x_s = clip(w_s / q_s, m_s, M_s)``, which is what every routine below
uses.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .model import SourceSpec, ValidatedNetwork, validate_network


class OracleError(RuntimeError):
    """The reference solver failed to reach the requested KKT accuracy."""


def source_rate(source: SourceSpec, path_price: float) -> float:
    """Optimal rate of one source facing a total path price.

    Returns the argmax over ``[m, M]`` of ``w log x - x q``.  The
    unconstrained maximizer is ``w / q``; clipping it to the bounds gives
    the constrained one because the objective is concave in ``x``.  A zero
    price saturates at the upper bound.
    """
    if path_price < 0:
        raise ValueError("path_price must be nonnegative")
    w = source.utility.weight
    m, M = source.rate_bounds
    if path_price == 0.0:
        return M
    return float(min(max(w / path_price, m), M))


def path_prices(net: ValidatedNetwork, p) -> np.ndarray:
    """Per-source total price q_s = sum of p over the source's path."""
    p = np.asarray(p, dtype=float)
    return (net.routing * p[:, None]).sum(axis=0)


def _clip_rates(net: ValidatedNetwork, q: np.ndarray) -> np.ndarray:
    # q = 0 divides to +inf, which the clip maps to the upper bound.
    with np.errstate(divide="ignore", over="ignore"):
        raw = net.weights / q
    return np.clip(raw, net.rate_min, net.rate_max)


def rate_vector(net: ValidatedNetwork, p) -> np.ndarray:
    """Vector of optimal source rates at price vector p."""
    return _clip_rates(net, path_prices(net, p))


def aggregate_rates(R, x) -> np.ndarray:
    """Per-link load R.x carried by rate vector x."""
    R = np.asarray(R, dtype=float)
    x = np.asarray(x, dtype=float)
    if R.ndim != 2 or x.ndim != 1 or R.shape[1] != x.shape[0]:
        raise ValueError(
            f"routing matrix {R.shape} does not match rate vector {x.shape}"
        )
    return (R * x[None, :]).sum(axis=1)


def dual_values(net: ValidatedNetwork, P) -> np.ndarray:
    """Vectorized D(p) over rows of P (shape (N, L)); returns shape (N,)."""
    P = np.atleast_2d(np.asarray(P, dtype=float))
    Q = (P[:, :, None] * net.routing[None, :, :]).sum(axis=1)
    with np.errstate(divide="ignore", over="ignore"):
        X = np.clip(net.weights / Q, net.rate_min, net.rate_max)
    inner = (net.weights * np.log(X) - X * Q).sum(axis=1)
    return inner + (P * net.capacities).sum(axis=1)


def dual_value(net: ValidatedNetwork, p) -> float:
    """Dual objective D(p) at a single price vector."""
    return float(dual_values(net, np.asarray(p, dtype=float)[None, :])[0])


def dual_gradient(net: ValidatedNetwork, p) -> np.ndarray:
    """Gradient of D at p: g_l = c_l - load_l(p).

    Where a source rate sits on a clip boundary this is still a valid
    subgradient; the clipped rate itself is used, which keeps the price
    iteration well defined everywhere.
    """
    x = rate_vector(net, p)
    return net.capacities - (net.routing * x[None, :]).sum(axis=1)


def kkt_residuals(net: ValidatedNetwork, x, p) -> dict[str, float]:
    """Max-norm KKT residuals of a candidate primal/dual pair.

    Keys: stationarity (rate response consistency, respecting active
    bounds), primal (capacity violation), dual (price negativity), and
    complementarity (|p_l (c_l - load_l)|).
    """
    x = np.asarray(x, dtype=float)
    p = np.asarray(p, dtype=float)
    q = path_prices(net, p)
    w, m, M = net.weights, net.rate_min, net.rate_max
    load = (net.routing * x[None, :]).sum(axis=1)

    at_lower = x <= m
    at_upper = x >= M
    interior = ~(at_lower | at_upper)
    stat = np.zeros_like(x)
    stat[interior] = np.abs(w[interior] / x[interior] - q[interior])
    # At a bound the rate derivative w/x - q only needs the right sign.
    stat[at_upper] = np.maximum(0.0, q[at_upper] - w[at_upper] / M[at_upper])
    stat[at_lower] = np.maximum(0.0, w[at_lower] / m[at_lower] - q[at_lower])

    return {
        "stationarity": float(stat.max()),
        "primal": float(np.maximum(0.0, load - net.capacities).max()),
        "dual": float(np.maximum(0.0, -p).max()),
        "complementarity": float(np.abs(p * (net.capacities - load)).max()),
    }


@dataclass(frozen=True)
class OracleSolution:
    """Ground-truth optimum produced by :func:`num_oracle`."""

    x_star: np.ndarray
    p_star: np.ndarray
    primal_value: float
    max_kkt_residual: float


def _projected_descent(net, p, max_iter: int, grad_tol: float):
    """Monotone projected gradient with backtracking on D."""
    c_scale = 1.0 + float(np.abs(net.capacities).max())
    D_cur = dual_value(net, p)
    step = 1.0 / (1.0 + float(np.abs(dual_gradient(net, p)).max()))
    for _ in range(max_iter):
        g = dual_gradient(net, p)
        residual = p - np.maximum(0.0, p - g)
        if float(np.abs(residual).max()) <= grad_tol * c_scale:
            break
        s = step
        p_new, D_new = p, D_cur
        for _ in range(60):
            p_new = np.maximum(0.0, p - s * g)
            D_new = dual_value(net, p_new)
            decrease = float(np.dot(g, p - p_new))
            if D_new <= D_cur - 1e-4 * decrease + 1e-15 * (1.0 + abs(D_cur)):
                break
            s *= 0.5
        if np.array_equal(p_new, p):
            break
        p, D_cur = p_new, D_new
        step = min(s * 2.0, 1e12)
    return p


def _newton_polish(net, p, max_rounds: int = 60):
    """Drive binding-link loads to capacity by Newton steps on the prices.

    The binding set is re-detected each round; rounds stop when the load
    residual is at roundoff or the step stalls.
    """
    R, c, w = net.routing, net.capacities, net.weights
    for _ in range(max_rounds):
        q = path_prices(net, p)
        x = rate_vector(net, p)
        load = (R * x[None, :]).sum(axis=1)
        binding = (p > 1e-9) | (load > c + 1e-12)
        if not binding.any():
            break
        F = load[binding] - c[binding]
        if float(np.abs(F).max()) < 1e-13 * (1.0 + float(np.abs(c).max())):
            break
        interior = (x > net.rate_min) & (x < net.rate_max)
        slope = np.where(interior, w / q**2, 0.0)
        Rb = R[binding]
        J = (Rb[:, None, :] * Rb[None, :, :] * slope[None, None, :]).sum(axis=2)
        try:
            delta = np.linalg.solve(J, F)
        except np.linalg.LinAlgError:
            break
        base = p[binding]
        best = p
        t_step = 1.0
        accepted = False
        for _ in range(40):
            trial = p.copy()
            trial[binding] = np.maximum(0.0, base + t_step * delta)
            x_t = rate_vector(net, trial)
            F_t = (R * x_t[None, :]).sum(axis=1)[binding] - c[binding]
            if float(np.abs(F_t).max()) <= (1.0 - 0.25 * t_step) * float(
                np.abs(F).max()
            ) + 1e-15:
                best = trial
                accepted = True
                break
            t_step *= 0.5
        if not accepted:
            break
        p = best
    return p


def num_oracle(net: ValidatedNetwork, *, kkt_tol: float = 1e-8) -> OracleSolution:
    """Solve the allocation problem by a method independent of the price
    iteration under test: projected descent on D followed by a Newton
    polish of the binding capacity constraints.

    Deterministic; raises :class:`OracleError` when the KKT residuals do
    not reach ``kkt_tol`` within the iteration budget.
    """
    net = validate_network(net)
    p = np.full(net.num_links, float(net.weights.sum()) / float(net.capacities.sum()))

    for grad_tol, iters in ((1e-7, 20000), (1e-9, 80000)):
        p = _projected_descent(net, p, max_iter=iters, grad_tol=grad_tol)
        p = _newton_polish(net, p)
        x = rate_vector(net, p)
        residuals = kkt_residuals(net, x, p)
        worst = max(residuals.values())
        if worst <= kkt_tol:
            break
    else:
        raise OracleError(
            f"KKT residuals {residuals} above {kkt_tol} after full budget"
        )

    x.flags.writeable = False
    p.flags.writeable = False
    return OracleSolution(
        x_star=x,
        p_star=p,
        primal_value=float(np.dot(net.weights, np.log(x))),
        max_kkt_residual=float(worst),
    )


def primal_value(net: ValidatedNetwork, x) -> float:
    """Utility sum w . log x of an allocation."""
    x = np.asarray(x, dtype=float)
    return float(np.dot(net.weights, np.log(x)))


def _finite_diff_gradient(net: ValidatedNetwork, p, h: float = 1e-6) -> np.ndarray:
    """Central-difference gradient of D, for test cross-checks."""
    p = np.asarray(p, dtype=float)
    g = np.empty_like(p)
    for i in range(p.size):
        e = np.zeros_like(p)
        e[i] = h
        g[i] = (dual_value(net, p + e) - dual_value(net, p - e)) / (2 * h)
    return g

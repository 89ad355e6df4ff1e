"""Executable certification of the step-descent inequality chain.

A trace of dual values D(t) and squared increment norms w(t) = |pi(t)|^2
is certified against the per-step descent inequality

    D(t+1) <= D(t) - [1/gamma - A1 - A2 (t0 - 1/2)] w(t)
                   + (A2 / 2) sum_{t' = t - 2 t0}^{t} w(t'),

its telescoped form over the whole horizon, and the aggregated total
bound with coefficient 1/gamma - A1 - 2 A2 t0, whose positivity yields
the step-size threshold gamma_max = 1 / (A1 + 2 A2 t0).

The elementary scalar bounds the chain is built from are exposed as
first-class operations so they can be fuzzed independently; every
"margin" below is (right-hand side) - (left-hand side) of the
corresponding inequality, so nonnegative margins mean the inequality
holds.  Increments are measured after projection onto the nonnegative
orthant, and w(t) is taken as zero for t < 0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

#: Base slack for >= 0 assertions; scaled by term magnitudes where used.
DEFAULT_TOLERANCE = 1e-9


class TraceLengthError(ValueError):
    """D and increment sequences whose lengths do not line up."""


@dataclass(frozen=True)
class Constants:
    """Certification constants: curvature bounds a1, a2 inherited from the
    convergence analysis, the delay bound t0, and the step size gamma."""

    a1: float
    a2: float
    t0: int
    gamma: float

    def __post_init__(self):
        if not (math.isfinite(self.a1) and self.a1 >= 0):
            raise ValueError(f"a1 must be finite and nonnegative, got {self.a1!r}")
        if not (math.isfinite(self.a2) and self.a2 >= 0):
            raise ValueError(f"a2 must be finite and nonnegative, got {self.a2!r}")
        if not (isinstance(self.t0, int) and self.t0 >= 0):
            raise ValueError(f"t0 must be a nonnegative integer, got {self.t0!r}")
        if not (math.isfinite(self.gamma) and self.gamma > 0):
            raise ValueError(f"gamma must be positive and finite, got {self.gamma!r}")


def scalar_product_bound(y: float, z: float) -> float:
    """Margin of y z <= (y^2 + z^2) / 2; nonnegative for all reals since
    it equals (y - z)^2 / 2."""
    return (y * y + z * z) / 2.0 - y * z


def indexed_sum_bound(ys, z: float) -> float:
    """Margin of sum_i y_i z <= (|I| / 2) z^2 + (1/2) sum_i y_i^2.

    Summing the scalar bound over the index set I gives the inequality;
    the margin is therefore nonnegative for any real list.  An empty list
    has margin zero by convention (both sides vanish).
    """
    ys = np.asarray(ys, dtype=float)
    if ys.size == 0:
        return 0.0
    return float(0.5 * ys.size * z * z + 0.5 * np.dot(ys, ys) - z * ys.sum())


def window_bound(a, t: int, t0: int) -> float:
    """Margin of the trailing-window cross-term bound

        sum_{t'=t-2t0}^{t-1} a(t') a(t)
            <= (t0 - 1/2) a(t)^2 + (1/2) sum_{t'=t-2t0}^{t} a(t')^2,

    with a(t') = 0 for t' < 0.  Folding a(t) itself into the window sum
    is exactly what turns the indexed-sum bound over 2 t0 + 1 terms into
    this asymmetric form, so the margin is nonnegative for all reals.
    """
    if t0 < 1:
        raise ValueError(f"t0 must be a positive integer, got {t0!r}")
    a = np.asarray(a, dtype=float)
    if not 0 <= t < a.shape[0]:
        raise ValueError(f"t={t} outside the sequence of length {a.shape[0]}")
    window = np.zeros(2 * t0 + 1)
    lo = t - 2 * t0
    src_lo = max(lo, 0)
    window[src_lo - lo :] = a[src_lo : t + 1]
    z = window[-1]
    return float(
        (t0 - 0.5) * z * z + 0.5 * np.dot(window, window) - z * window[:-1].sum()
    )


def double_sum_bound(a, t: int, t0: int) -> tuple[float, float]:
    """Both sides of the window double-sum bound

        sum_{tau=0}^{t} sum_{t'=tau-2t0}^{tau} a(t')^2
            <= (2 t0 + 1) sum_{tau=0}^{t} a(tau)^2,

    with zero padding below index 0.  Returns (lhs, rhs); each a(t')^2
    appears in at most 2 t0 + 1 windows, which is the whole proof.
    """
    if t0 < 1:
        raise ValueError(f"t0 must be a positive integer, got {t0!r}")
    a = np.asarray(a, dtype=float)
    if not 0 <= t < a.shape[0]:
        raise ValueError(f"t={t} outside the sequence of length {a.shape[0]}")
    sq = a[: t + 1] * a[: t + 1]
    csum = np.cumsum(sq)
    width = 2 * t0 + 1
    tail = np.zeros(t + 1)
    if t + 1 > width:
        tail[width:] = csum[: t + 1 - width]
    lhs = float((csum - tail).sum())
    rhs = float(width * csum[-1])
    return lhs, rhs


def _window_sums(w: np.ndarray, t0: int) -> np.ndarray:
    """W(t) = sum_{t'=t-2t0}^{t} w(t') with zero padding for t' < 0."""
    if t0 == 0:
        return w.copy()
    return np.convolve(w, np.ones(2 * t0 + 1))[: w.shape[0]]


def _check_lengths(D, pi_norm_sq):
    D = np.asarray(D, dtype=float)
    w = np.asarray(pi_norm_sq, dtype=float)
    if D.ndim != 1 or w.ndim != 1 or D.shape[0] != w.shape[0] + 1:
        raise TraceLengthError(
            f"need len(D) == len(pi_norm_sq) + 1, got {D.shape[0]} and {w.shape[0]}"
        )
    if w.size and w.min() < 0:
        raise ValueError("squared increment norms must be nonnegative")
    return D, w


def per_step_descent_check(D, pi_norm_sq, k: Constants) -> np.ndarray:
    """Per-step descent margins on a trace.

    margin(t) = D(t) - D(t+1)
                - [1/gamma - a1 - a2 (t0 - 1/2)] w(t)
                + (a2 / 2) W(t),

    where W(t) is the trailing window sum of w.  Nonnegative margins
    certify the descent inequality at every recorded step.
    """
    D, w = _check_lengths(D, pi_norm_sq)
    W = _window_sums(w, k.t0)
    coeff = 1.0 / k.gamma - k.a1 - k.a2 * (k.t0 - 0.5)
    return (D[:-1] - D[1:]) - coeff * w + 0.5 * k.a2 * W


def telescoped_check(D, pi_norm_sq, k: Constants) -> tuple[float, float]:
    """Margins of the two horizon-level bounds.

    The first (telescoped) margin sums the per-step inequality over the
    whole trace and equals the sum of per-step margins exactly.  The
    second (total) margin applies the double-sum bound to the window
    terms, giving

        D(T) <= D(0) - [1/gamma - a1 - 2 a2 t0] sum_t w(t).

    With a2 = 0 the two margins coincide exactly; with a2 > 0 the total
    margin is never below the telescoped one.
    """
    D, w = _check_lengths(D, pi_norm_sq)
    W = _window_sums(w, k.t0)
    sw = float(w.sum())
    coeff_t = 1.0 / k.gamma - k.a1 - k.a2 * (k.t0 - 0.5)
    coeff_total = 1.0 / k.gamma - k.a1 - 2.0 * k.a2 * k.t0
    telescoped = (D[0] - D[-1]) - coeff_t * sw + 0.5 * k.a2 * float(W.sum())
    total = (D[0] - D[-1]) - coeff_total * sw
    return float(telescoped), float(total)


def gamma_threshold(a1: float, a2: float, t0: int) -> float:
    """Largest certified step size, 1 / (a1 + 2 a2 t0).

    Returns math.inf when the denominator is not positive: then the
    total-bound coefficient is positive for every positive step size.
    """
    if a1 < 0 or a2 < 0 or t0 < 0:
        raise ValueError("constants must be nonnegative")
    denom = a1 + 2.0 * a2 * t0
    if denom <= 0.0:
        return math.inf
    return 1.0 / denom


def _margin_slack(D: np.ndarray, w: np.ndarray, gamma: float, tolerance: float) -> np.ndarray:
    """Per-step slack for >= 0 verdicts, scaled by the magnitudes entering
    the margin."""
    return tolerance * (1.0 + np.abs(D[:-1]) + np.abs(D[1:]) + w / gamma)


#: Fit slack is pure roundoff allowance: wide enough that converged tails
#: with vanishing increments never force spurious constants, narrow enough
#: that fitted margins stay far above any verdict tolerance.
_FIT_EPS = 64.0 * np.finfo(float).eps


def estimate_constants(
    D,
    pi_norm_sq,
    t0: int,
    gamma: float,
) -> Constants | None:
    """Fit the smallest certifying constants for a recorded trace.

    Minimizes a1 + 2 a2 t0 (equivalently, maximizes the certified step
    threshold) over nonnegative (a1, a2) subject to every per-step margin
    being nonnegative up to a roundoff-sized slack.  The margins are
    affine in (a1, a2) with nonnegative coefficients, so the required a1
    at fixed a2 is an explicit maximum and the objective is convex
    piecewise linear in a2; a deterministic ternary search plus endpoint
    checks finds the minimizer.

    Returns None when the trace is infeasible: either no nonnegative
    constants produce nonnegative margins, or every certifying pair
    leaves the threshold at or below the step size actually used (as
    happens for divergent runs, whose dual values end above where they
    started).
    """
    D, w = _check_lengths(D, pi_norm_sq)
    if not (np.isfinite(D).all() and np.isfinite(w).all()):
        return None
    if w.shape[0] < 1:
        raise TraceLengthError("need at least one increment to fit constants")

    W = _window_sums(w, t0)
    b = (D[:-1] - D[1:]) - w / gamma
    u = w
    v = (t0 - 0.5) * w + 0.5 * W
    need = -b - _margin_slack(D, w, gamma, _FIT_EPS)

    plain = (u == 0.0) & (v == 0.0)
    if np.any(need[plain] > 0.0):
        return None

    a2_floor = 0.0
    boundary = (u == 0.0) & (v > 0.0)
    if np.any(boundary & (need > 0.0)):
        rows = boundary & (need > 0.0)
        a2_floor = float((need[rows] / v[rows]).max())

    active = u > 0.0

    def required_a1(a2: float) -> float:
        if not active.any():
            return 0.0
        resid = need[active] - a2 * v[active]
        top = float((resid / u[active]).max())
        return max(0.0, top)

    def objective(a2: float) -> float:
        return required_a1(a2) + 2.0 * t0 * a2

    if t0 == 0:
        a1, a2 = required_a1(0.0), 0.0
    else:
        hot = active & (need > 0.0)
        a2_ceil = a2_floor
        if np.any(hot):
            a2_ceil = max(a2_ceil, float((need[hot] / v[hot]).max()))
        lo, hi = a2_floor, a2_ceil
        for _ in range(200):
            third = (hi - lo) / 3.0
            m1, m2 = lo + third, hi - third
            if objective(m1) <= objective(m2):
                hi = m2
            else:
                lo = m1
        candidates = [a2_floor, (lo + hi) / 2.0, a2_ceil]
        a2 = min(candidates, key=lambda c: (objective(c), c))
        a1 = required_a1(a2)

    if a1 + 2.0 * a2 * t0 >= 1.0 / gamma:
        return None
    return Constants(a1=a1, a2=a2, t0=t0, gamma=gamma)


VERDICT_HOLDS = "holds"
VERDICT_VIOLATED = "violated"
VERDICT_INFEASIBLE = "infeasible"


@dataclass(frozen=True)
class CertReport:
    """Outcome of certifying one trace against one set of constants."""

    constants: Constants | None
    fitted: bool
    per_step_margins: np.ndarray | None
    telescoped_margin: float | None
    total_margin: float | None
    gamma_max: float | None
    verdict: str
    violated_at: int | None
    tolerance: float

    #: Caveats recorded with every report.
    notes: tuple[str, ...] = (
        "margins certify this recorded trace with the supplied or fitted "
        "constants; they are an empirical check, not a proof for other runs",
        "price increments are measured after projection onto the "
        "nonnegative orthant",
    )


def certify_trace(
    D,
    pi_norm_sq,
    *,
    constants: Constants | None = None,
    t0: int | None = None,
    gamma: float | None = None,
    fit: bool = False,
    tolerance: float = DEFAULT_TOLERANCE,
) -> CertReport:
    """Certify a trace, either at given constants or at fitted ones.

    With fit=True the constants are estimated from the trace itself
    (t0 and gamma must be supplied); an infeasible fit yields verdict
    "infeasible" with no margins.  Otherwise the supplied constants are
    checked as-is and the verdict is "holds" exactly when every per-step
    margin clears the scaled roundoff slack.
    """
    D_arr, w = _check_lengths(D, pi_norm_sq)
    if fit:
        if constants is not None:
            raise ValueError("pass either constants or fit=True, not both")
        if t0 is None or gamma is None:
            raise ValueError("fitting needs explicit t0 and gamma")
        constants = estimate_constants(D_arr, w, t0, gamma)
        if constants is None:
            return CertReport(
                constants=None,
                fitted=True,
                per_step_margins=None,
                telescoped_margin=None,
                total_margin=None,
                gamma_max=None,
                verdict=VERDICT_INFEASIBLE,
                violated_at=None,
                tolerance=tolerance,
            )
    elif constants is None:
        raise ValueError("constants are required unless fit=True")

    margins = per_step_descent_check(D_arr, w, constants)
    telescoped, total = telescoped_check(D_arr, w, constants)
    slack = _margin_slack(D_arr, w, constants.gamma, tolerance)
    bad = np.flatnonzero(margins < -slack)
    return CertReport(
        constants=constants,
        fitted=fit,
        per_step_margins=margins,
        telescoped_margin=telescoped,
        total_margin=total,
        gamma_max=gamma_threshold(constants.a1, constants.a2, constants.t0),
        verdict=VERDICT_VIOLATED if bad.size else VERDICT_HOLDS,
        violated_at=int(bad[0]) if bad.size else None,
        tolerance=tolerance,
    )

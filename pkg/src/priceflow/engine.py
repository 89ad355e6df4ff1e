"""Price iteration engine: synchronous and bounded-delay asynchronous runs.

The update is gradient projection on the dual,

    p(t+1) = [p(t) - gamma * (c - R x(t))]+ ,

where sources set rates from link prices and links adjust prices from
source rates.  Under the asynchronous regime each of those reads may be
stale by up to ``t0`` iterations; staleness is simulated with history
buffers inside one deterministic loop, so every run is replayable from
(network, config, initial prices) alone.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .dual import _clip_rates, dual_values
from .model import ValidatedNetwork, validate_network

DELAY_MODELS = ("none", "fixed", "uniform")


class ConfigError(ValueError):
    """An invalid engine configuration."""


@dataclass(frozen=True)
class EngineConfig:
    """Run parameters.

    delay_model selects how per-read staleness is drawn each iteration:
    "none" uses current values, "fixed" a constant lag ``fixed_delay``,
    and "uniform" an independent draw from {0, ..., t0} per (link,
    source) direction, generated counter-style from (seed, t) so any
    iteration's delays can be reproduced without replaying the run.
    """

    gamma: float
    t0: int = 0
    steps: int = 1000
    seed: int = 0
    delay_model: str = "none"
    fixed_delay: int = 0

    def __post_init__(self):
        if not (isinstance(self.gamma, (int, float)) and math.isfinite(self.gamma) and self.gamma > 0):
            raise ConfigError(f"gamma must be positive and finite, got {self.gamma!r}")
        if not (isinstance(self.t0, int) and self.t0 >= 0):
            raise ConfigError(f"t0 must be a nonnegative integer, got {self.t0!r}")
        if not (isinstance(self.steps, int) and self.steps >= 1):
            raise ConfigError(f"steps must be a positive integer, got {self.steps!r}")
        if not (isinstance(self.seed, int) and 0 <= self.seed < 2**64):
            raise ConfigError(f"seed must fit in 64 unsigned bits, got {self.seed!r}")
        if self.delay_model not in DELAY_MODELS:
            raise ConfigError(
                f"delay_model must be one of {DELAY_MODELS}, got {self.delay_model!r}"
            )
        if not (isinstance(self.fixed_delay, int) and 0 <= self.fixed_delay <= self.t0):
            raise ConfigError(
                f"fixed_delay must be an integer in [0, t0={self.t0}], got {self.fixed_delay!r}"
            )


@dataclass(frozen=True)
class AlgorithmState:
    """State at iteration boundary t.

    price_history[k] holds p(t - k) and rate_history[k] holds x(t - 1 - k),
    both of depth t0 + 1, newest first.  Right after a step the freshest
    rate entry is the rate vector computed by that step.
    """

    t: int
    p: np.ndarray
    price_history: np.ndarray
    rate_history: np.ndarray


@dataclass(frozen=True)
class Trace:
    """Recorded trajectory.

    Row t carries p(t), x(t) and D(p(t)); pi rows are the price
    increments p(t+1) - p(t), so they have one entry fewer than the state
    rows.  Consumers treat pi(t) as the zero vector for t < 0.
    ``truncated`` marks a run cut at the first non-finite row.
    """

    p: np.ndarray
    x: np.ndarray
    D: np.ndarray
    pi: np.ndarray
    pi_norm_sq: np.ndarray
    truncated: bool = False

    @property
    def num_rows(self) -> int:
        return self.D.shape[0]


def sync_step(net: ValidatedNetwork, p, gamma: float) -> np.ndarray:
    """One synchronous update: p' = [p + gamma (load - c)]+."""
    p = np.asarray(p, dtype=float)
    q = (net.routing * p[:, None]).sum(axis=0)
    x = _clip_rates(net, q)
    load = (net.routing * x[None, :]).sum(axis=1)
    return np.maximum(0.0, p + gamma * (load - net.capacities))


def initial_state(net: ValidatedNetwork, cfg: EngineConfig, p0=None) -> AlgorithmState:
    """Bootstrap state: histories pre-filled with p0 and the rate response
    to p0, so the first t0 iterations see well-defined stale values."""
    L = net.num_links
    if p0 is None:
        p0 = np.zeros(L)
    p0 = np.asarray(p0, dtype=float).copy()
    if p0.shape != (L,):
        raise ConfigError(f"initial prices must have shape ({L},), got {p0.shape}")
    if not np.all(np.isfinite(p0)) or np.any(p0 < 0):
        raise ConfigError("initial prices must be finite and nonnegative")
    x0 = _clip_rates(net, (net.routing * p0[:, None]).sum(axis=0))
    depth = cfg.t0 + 1
    return AlgorithmState(
        t=0,
        p=p0,
        price_history=np.tile(p0, (depth, 1)),
        rate_history=np.tile(x0, (depth, 1)),
    )


def _draw_delays(cfg: EngineConfig, L: int, S: int, t: int):
    """Per-iteration staleness: two (L, S) integer arrays, price-read
    delays seen by sources and rate-read delays seen by links."""
    if cfg.delay_model == "none" or cfg.t0 == 0:
        zero = np.zeros((L, S), dtype=np.int64)
        return zero, zero
    if cfg.delay_model == "fixed":
        fixed = np.full((L, S), cfg.fixed_delay, dtype=np.int64)
        return fixed, fixed
    gen = np.random.Generator(np.random.Philox(key=[cfg.seed, t]))
    d = gen.integers(0, cfg.t0 + 1, size=(2, L, S))
    return d[0], d[1]


def async_step(net: ValidatedNetwork, state: AlgorithmState, cfg: EngineConfig) -> AlgorithmState:
    """One asynchronous update with bounded staleness.

    Sources compute rates from link prices aged by the drawn delays;
    links then update prices from source rates aged by their own delays,
    where age zero means the rates just computed this iteration.
    """
    L, S = net.num_links, net.num_sources
    d_price, d_rate = _draw_delays(cfg, L, S, state.t)

    stale_p = state.price_history[d_price, np.arange(L)[:, None]]
    q = (net.routing * stale_p).sum(axis=0)
    x = _clip_rates(net, q)

    rates = np.concatenate((x[None, :], state.rate_history[:-1]), axis=0)
    stale_x = rates[d_rate, np.arange(S)[None, :]]
    load = (net.routing * stale_x).sum(axis=1)
    p_next = np.maximum(0.0, state.p + cfg.gamma * (load - net.capacities))

    prices = np.concatenate((p_next[None, :], state.price_history[:-1]), axis=0)
    return AlgorithmState(t=state.t + 1, p=p_next, price_history=prices, rate_history=rates)


def _first_bad_row(*arrays) -> int | None:
    finite = np.ones(arrays[0].shape[0], dtype=bool)
    for a in arrays:
        finite &= np.isfinite(a).all(axis=tuple(range(1, a.ndim)))
    bad = np.flatnonzero(~finite)
    return int(bad[0]) if bad.size else None


def run(net: ValidatedNetwork, cfg: EngineConfig, p0=None) -> Trace:
    """Execute cfg.steps iterations and record the full trace.

    Deterministic given (net, cfg, p0).  A zero delay bound follows the
    synchronous expressions exactly, so t0 = 0 and "none" delays yield
    bit-identical traces.  Non-finite values truncate the trace at the
    first bad row and set the truncated flag.
    """
    net = validate_network(net)
    L, S = net.num_links, net.num_sources
    steps = cfg.steps
    P = np.empty((steps, L))
    X = np.empty((steps, S))

    if cfg.t0 == 0 or cfg.delay_model == "none":
        state = initial_state(net, cfg, p0)
        p = state.p
        gamma, c, R = cfg.gamma, net.capacities, net.routing
        with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
            for t in range(steps):
                P[t] = p
                q = (R * p[:, None]).sum(axis=0)
                x = np.clip(net.weights / q, net.rate_min, net.rate_max)
                X[t] = x
                load = (R * x[None, :]).sum(axis=1)
                p = np.maximum(0.0, p + gamma * (load - c))
    else:
        state = initial_state(net, cfg, p0)
        with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
            for t in range(steps):
                P[t] = state.p
                state = async_step(net, state, cfg)
                X[t] = state.rate_history[0]

    truncated = False
    bad = _first_bad_row(P, X)
    if bad is not None:
        if bad == 0:
            raise ConfigError("initial iteration already non-finite")
        P, X = P[:bad], X[:bad]
        truncated = True

    D = dual_values(net, P)
    pi = np.diff(P, axis=0)
    # squared increments may overflow on a truncated blow-up; keep the inf
    with np.errstate(over="ignore"):
        pi_norm_sq = (pi * pi).sum(axis=1)
    for a in (P, X, D, pi, pi_norm_sq):
        a.flags.writeable = False
    return Trace(p=P, x=X, D=D, pi=pi, pi_norm_sq=pi_norm_sq, truncated=truncated)


def diverged(trace: Trace) -> bool:
    """Heuristic divergence flag for a finished trace.

    True when the run was truncated on non-finite values, or when the
    final objective sits clearly above the best value seen while the
    iterate is still moving.  Settled runs end at their running minimum
    with vanishing increments, so both tests stay false.
    """
    if trace.truncated:
        return True
    if trace.pi_norm_sq.shape[0] == 0:
        return False
    d_min = float(trace.D.min())
    grew = float(trace.D[-1]) > d_min + 1e-6 * (1.0 + abs(d_min))
    scale = 1.0 + float((trace.p[-1] * trace.p[-1]).sum())
    moving = float(trace.pi_norm_sq[-1]) > 1e-18 * scale
    return bool(grew and moving)

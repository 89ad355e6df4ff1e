"""End-to-end acceptance checks.

Each test exercises one headline capability at its stated tolerance and
time budget, so ``pytest -v tests/test_acceptance.py`` reads as a
checklist: the integer counterexample certificate, the closed-form
spectrum and convexity verdicts, the characteristic-polynomial
cross-checks, randomized inequality fuzzing, the telescoping identity on
synthetic traces, convergence and certification of the reference chain
network, the failure of the claimed convexity beyond four sources, and
byte-for-byte reproducibility of simulation output.
"""

import json
import math
import time

import numpy as np
import pytest

import priceflow as pf

from conftest import chain5_config


def _relative_gap(a, b):
    scale = max(1.0, float(np.max(np.abs(a))), float(np.max(np.abs(b))))
    return float(np.max(np.abs(np.asarray(a) - np.asarray(b)))) / scale


def test_counterexample_value_is_exact_integer_and_fast():
    # the witness point must evaluate on a pure-integer path, and fast
    # enough to serve as an inline certificate
    best = math.inf
    for _ in range(20):
        start = time.perf_counter()
        value = pf.f_eval([5, 4, 3, 4, 5], 10)
        best = min(best, time.perf_counter() - start)
    assert value == -19
    assert isinstance(value, int)
    assert value < 0
    assert best < 1e-3


def test_spectrum_closed_form_and_convexity_verdicts():
    start = time.perf_counter()
    spec = pf.eigenvalues(5)  # numeric cross-check runs by default
    expected = np.sort(np.array([2.0 - math.sqrt(5), 2.0, 2.0, 2.0, 2.0, 2.0 + math.sqrt(5)]))
    assert np.abs(spec.eigenvalues - expected).max() <= 1e-9
    assert spec.min_eigenvalue == pytest.approx(2 - math.sqrt(5), abs=1e-9)
    counted = {2.0: 4}
    values, counts = np.unique(np.round(spec.eigenvalues, 12), return_counts=True)
    assert dict(zip(values.tolist(), counts.tolist()))[2.0] == counted[2.0]

    for n in range(1, 65):
        assert pf.convexity_verdict(n) is (n <= 4)
        assert pf.eigenvalues(n).convex is (n <= 4)
    assert time.perf_counter() - start < 1.0


def test_characteristic_polynomial_agrees_with_determinant_paths():
    rng = np.random.default_rng(314159)
    start = time.perf_counter()
    for n in range(1, 65):
        H = pf.build_hessian(n).astype(float)
        lam = rng.uniform(-10.0, 10.0, size=100)
        # keep the top-left block of the partitioned path invertible
        lam[np.abs(lam - 2.0) < 1e-3] += 0.5

        closed = pf.charpoly_eval(n, lam)
        eye = np.eye(n + 1)
        direct = pf.det(H[None, :, :] - lam[:, None, None] * eye)
        assert _relative_gap(closed, direct) <= 1e-8

        shifted = H[None, :, :] - lam[:, None, None] * eye
        partitioned = pf.schur_det(
            shifted[:, :n, :n],
            shifted[:, :n, n:],
            shifted[:, n:, :n],
            shifted[:, n:, n:],
        )
        assert _relative_gap(closed, partitioned) <= 1e-8
    assert time.perf_counter() - start < 10.0


def test_randomized_inequality_margins_never_go_negative():
    rng = np.random.default_rng(20260819)
    cases = 10_000
    slack = 1e-9

    # products against half sums of squares
    y = rng.uniform(-100.0, 100.0, size=cases)
    z = rng.uniform(-100.0, 100.0, size=cases)
    for yi, zi in zip(y, z):
        margin = pf.scalar_product_bound(yi, zi)
        assert margin >= -slack * (1.0 + yi * yi + zi * zi)
    assert pf.scalar_product_bound(3.7, 3.7) == pytest.approx(0.0, abs=1e-12)

    # summed products against the indexed bound
    for _ in range(cases):
        ys = rng.uniform(-50.0, 50.0, size=rng.integers(1, 17))
        zi = float(rng.uniform(-50.0, 50.0))
        margin = pf.indexed_sum_bound(ys, zi)
        assert margin >= -slack * (1.0 + float(ys @ ys) + len(ys) * zi * zi)

    # windowed cross terms against the trailing-window bound
    for _ in range(cases):
        t0 = int(rng.integers(1, 5))
        n = int(rng.integers(2 * t0 + 1, 2 * t0 + 20))
        a = rng.uniform(-10.0, 10.0, size=n)
        t = int(rng.integers(0, n))
        margin = pf.window_bound(a, t, t0)
        assert margin >= -slack * (1.0 + float(a @ a))
    flat = np.full(9, -2.25)
    assert pf.window_bound(flat, 8, 2) == pytest.approx(0.0, abs=1e-12)

    # double sums of stale cross terms against the aggregated bound
    for _ in range(cases):
        t0 = int(rng.integers(1, 5))
        n = int(rng.integers(2 * t0 + 1, 2 * t0 + 20))
        a = rng.uniform(-10.0, 10.0, size=n)
        t = int(rng.integers(0, n))
        lhs, rhs = pf.double_sum_bound(a, t, t0)
        assert rhs - lhs >= -slack * (1.0 + abs(lhs) + abs(rhs))


def test_telescoped_margin_equals_per_step_sum_on_synthetic_traces():
    rng = np.random.default_rng(271828)
    for _ in range(100):
        steps = int(rng.integers(20, 200))
        D = np.cumsum(rng.normal(0.0, 1.0, size=steps))
        w = np.abs(rng.normal(0.0, 1.0, size=steps - 1))
        t0 = int(rng.integers(0, 4))
        a1 = float(rng.uniform(0.0, 2.0))
        a2 = float(rng.uniform(0.0, 2.0)) if t0 > 0 else 0.0
        gamma = float(rng.uniform(0.01, 1.0))

        k = pf.Constants(a1=a1, a2=a2, t0=t0, gamma=gamma)
        margins = pf.per_step_descent_check(D, w, k)
        telescoped, total = pf.telescoped_check(D, w, k)
        assert telescoped == pytest.approx(margins.sum(), abs=1e-10, rel=1e-10)

        k0 = pf.Constants(a1=a1, a2=0.0, t0=t0, gamma=gamma)
        telescoped0, total0 = pf.telescoped_check(D, w, k0)
        assert telescoped0 == total0  # bitwise: same operations, same order


def test_chain_network_converges_to_oracle_and_certifies(chain5, chain5_oracle, tmp_path, capsys):
    gamma, steps = 0.01, 20_000
    assert steps <= 100_000
    p0 = np.array([1.0, 1.0, 1.0])

    start = time.perf_counter()
    sync = pf.run(chain5, pf.EngineConfig(gamma=gamma, steps=steps), p0=p0)
    assert time.perf_counter() - start < 5.0
    assert np.abs(sync.x[-1] - chain5_oracle.x_star).max() <= 1e-3

    traces = {0: sync}
    for t0 in (1, 3, 5):
        cfg = pf.EngineConfig(gamma=gamma, steps=steps, t0=t0, delay_model="uniform", seed=42)
        tr = pf.run(chain5, cfg, p0=p0)
        assert np.abs(tr.x[-1] - chain5_oracle.x_star).max() <= 1e-3
        traces[t0] = tr

    for t0, tr in traces.items():
        path = str(tmp_path / f"t{t0}.csv")
        pf.write_trace_csv(tr, path)
        code = pf.entry(["certify", path, "--fit", "--t0", str(t0), "--gamma", str(gamma)])
        report = json.loads(capsys.readouterr().out)
        assert code == 0
        assert report["verdict"] == "holds"
        assert report["min_margin"] >= -1e-9
        assert report["gamma_max"] > gamma
        assert report["step_size_certified"] is True


def test_claimed_convexity_fails_beyond_four_sources():
    # a nonnegative grid holds a strictly negative value at n = 5 ...
    worst = pf.grid_min(5)
    assert worst.value == -25.0
    assert worst.value < 0.0
    assert np.array_equal(worst.y, np.full(5, 5.0))
    assert worst.z == 5.0 * 2  # interior point, not a boundary artifact
    assert pf.f_eval([5, 4, 3, 4, 5], 10) < 0
    # ... while for n <= 4 the minimum really is 0 at the origin
    for n in range(1, 5):
        res = pf.grid_min(n)
        assert res.value == 0.0
        assert np.array_equal(res.y, np.zeros(n))
        assert res.z == 0.0


def test_identical_config_and_seed_reproduce_trace_bytes(tmp_path, capsys):
    doc = chain5_config(steps=800, t0=3, delay_model="uniform", seed=11)
    cfg = tmp_path / "config.json"
    cfg.write_text(json.dumps(doc))
    first, second = str(tmp_path / "first.csv"), str(tmp_path / "second.csv")
    assert pf.entry(["simulate", str(cfg), "--out", first]) == 0
    assert pf.entry(["simulate", str(cfg), "--out", second]) == 0
    capsys.readouterr()
    a, b = open(first, "rb").read(), open(second, "rb").read()
    assert a == b
    assert len(a) > 0

"""
An empirical descent certificate and the step-size ceiling
===========================================================

A trace certifies its own stability: from the recorded dual values and
squared price increments we fit the two constants of a per-step descent
inequality, check every step against it, and read off the largest step
size the fitted constants still cover.  Running far above that ceiling
blows the iteration up, as it should.
"""

import numpy as np

import priceflow as pf

net = pf.validate_network(
    pf.NetworkSpec(
        links=(
            pf.LinkSpec("l0", 1.0),
            pf.LinkSpec("l1", 1.0),
            pf.LinkSpec("l2", 1.0),
        ),
        sources=(
            pf.SourceSpec("long", ("l0", "l1", "l2")),
            pf.SourceSpec("a0", ("l0",)),
            pf.SourceSpec("a1", ("l1",)),
            pf.SourceSpec("a2", ("l2",)),
            pf.SourceSpec("b0", ("l0",)),
        ),
    )
)
gamma = 0.01
p0 = np.array([1.0, 1.0, 1.0])

# Certify a synchronous trace and one with stale reads.
print("fitting descent constants, gamma=%.3f:" % gamma)
for t0, model in ((0, "none"), (3, "uniform")):
    trace = pf.run(
        net,
        pf.EngineConfig(gamma=gamma, steps=20_000, t0=t0, delay_model=model, seed=42),
        p0=p0,
    )
    report = pf.certify_trace(
        trace.D, trace.pi_norm_sq, fit=True, t0=t0, gamma=gamma
    )
    print(
        "  t0=%d   verdict=%-6s a1=%-10.6f a2=%-10.6f min margin %+.2e   gamma_max %.4f"
        % (
            t0,
            report.verdict,
            report.constants.a1,
            report.constants.a2,
            report.per_step_margins.min(),
            report.gamma_max,
        )
    )
    last = report

# The certificate is empirical: it proves the inequality held on this
# trace, not on all traces.  The report says so itself.
print()
for note in last.notes:
    print("note:", note)

# The fitted constants bound the usable step size.  Warm-start near the
# optimum so the fit reflects the local geometry, then run at 100x the
# fitted ceiling.
warm = pf.run(
    net, pf.EngineConfig(gamma=gamma, steps=5_000), p0=np.array([2.4, 1.2, 1.2])
)
fit = pf.certify_trace(warm.D, warm.pi_norm_sq, fit=True, t0=0, gamma=gamma)
print()
print("warm-start fit: gamma_max = %.4f" % fit.gamma_max)

hot = 100.0 * fit.gamma_max
blown = pf.run(net, pf.EngineConfig(gamma=hot, steps=400), p0=np.array([2.4, 1.2, 1.2]))
print("rerun at gamma=%.2f: diverged=%s, final dual %.3e (optimum %.6f)"
      % (hot, pf.diverged(blown), blown.D[-1], pf.num_oracle(net).primal_value))

# And no constants can certify the blown-up trace at that step size.
post = pf.certify_trace(blown.D, blown.pi_norm_sq, fit=True, t0=0, gamma=hot)
print("certificate for the hot run: verdict=%s" % post.verdict)

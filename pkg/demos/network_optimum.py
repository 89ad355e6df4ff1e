"""
A congested chain and its exact optimal allocation
===================================================

A three-link chain shared by five log-utility sources: one source
crosses every link, one short source sits on each link, and a second
short source doubles up on the first link.  The optimum is known in
closed form, and the library's oracle recovers it to machine precision.
"""

import numpy as np

import priceflow as pf

# Build the network: links l0, l1, l2 with unit capacity.  Source
# "long" uses all three; "a0", "a1", "a2" use one link each; "b0"
# shares l0 with "long" and "a0".
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

print("routing matrix (links x sources):")
print(pf.routing_matrix(net).astype(int))

# The oracle solves the allocation problem independently of the price
# iteration: projected descent on the dual, then a Newton polish on the
# binding capacity constraints.
sol = pf.num_oracle(net)
print()
print("optimal rates   :", np.round(sol.x_star, 6))
print("optimal prices  :", np.round(sol.p_star, 6))
print("max KKT residual: %.2e" % sol.max_kkt_residual)

# With unit weights and unit capacities this instance is rational:
# x* = (1/5, 2/5, 4/5, 4/5, 2/5) against prices (5/2, 5/4, 5/4).
expected_x = np.array([0.2, 0.4, 0.8, 0.8, 0.4])
expected_p = np.array([2.5, 1.25, 1.25])
print()
print("gap to closed form: rates %.2e, prices %.2e"
      % (np.abs(sol.x_star - expected_x).max(), np.abs(sol.p_star - expected_p).max()))

# Strong duality: the dual evaluated at the optimal prices meets the
# primal utility of the optimal rates.
primal = pf.primal_value(net, sol.x_star)
dual = pf.dual_value(net, sol.p_star)
print("primal %.12f  dual %.12f  gap %.2e" % (primal, dual, dual - primal))

# Away from the optimum the dual is strictly larger -- it is an upper
# bound everywhere, which is what makes it a useful descent target.
for trial in ([1.0, 1.0, 1.0], [4.0, 0.5, 2.0]):
    print("dual at p=%s: %.6f" % (trial, pf.dual_value(net, np.array(trial))))

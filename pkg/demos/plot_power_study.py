"""
Power of the Q test
===================

Simulate panels from the builtin capability scenarios and count how often
the test rejects at the 5% level.  A few thousand replicates keep this
quick; the CLI defaults to 50,000.
"""

from contentq import builtin_scenarios, estimate_power
from contentq.powersim import prop2_w_probability

for spec in builtin_scenarios():
    ps = ", ".join(f"{p.p_correct:g}" for p in spec.specialists)
    est = estimate_power(spec, replicates=5000, seed=11)
    print(f"{spec.name:>12}  power {est.power:.3f} +/- {est.mc_std_error:.3f}  "
          f"retained {est.mean_retained_items:5.2f}  [{ps}]")

# under the homogeneity hypothesis P(W = 1) is the same for every specialist
for p in (0.6, 0.8, 0.95):
    print(p, round(prop2_w_probability(p, [(1 - p) / 2] * 2, s=9, c=50), 4))

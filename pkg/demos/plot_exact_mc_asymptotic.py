"""
Three ways to a p-value
=======================

For a small W table the conditional null can be enumerated; Monte Carlo
approximates it and the chi-square law is its large-sample limit.
"""

import numpy as np

from contentq.cochran import PermutationBudget, arrangement_count, asymptotic_p, exact_p, mc_permutation_p

rng = np.random.default_rng(3)
w = (rng.random((5, 6)) < 0.65).astype(int)
print(w)
print("row placements to enumerate:", arrangement_count(w))

budget = PermutationBudget(mc_replicates=20_000, seed=1)
for result in (exact_p(w), mc_permutation_p(w, budget), asymptotic_p(w)):
    se = f" +/- {result.mc_std_error:.4f}" if result.mc_std_error else ""
    print(f"{result.method:>10}: Q = {result.q:.3f}, p = {result.p_value:.4f}{se}")

# the same seed gives the same estimate whatever the number of workers
assert mc_permutation_p(w, budget, workers=2) == mc_permutation_p(w, budget)

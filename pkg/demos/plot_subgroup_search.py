"""
Looking for homogeneous sub-panels
==================================

Rerun retention and the test on every panel of six to eight specialists
and rank them by p-value.
"""

from contentq import analyze_subgroups, load_teaching_learning

matrix = load_teaching_learning()
report = analyze_subgroups(matrix)
print(len(report), "panels,", len(report.rejected()), "rejected at 5%")

for e in report.top(5):
    print(f"{'+'.join(e.specialists):>18}  Q = {e.q:6.3f}  p = {e.p_value:.3f}  ({e.n_retained} items)")

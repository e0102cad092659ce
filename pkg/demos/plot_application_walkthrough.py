"""
Teaching and learning panel
===========================

Nine specialists sorted 30 items into three dimensions.  Keep the items
with a clear majority, build the agreement table W and test whether the
specialists endorse the retained assignments at the same rate.
"""

from contentq import ConditionSpec, analyze, load_teaching_learning
from contentq.pipeline import theoretical_agreement

matrix = load_teaching_learning()
print(matrix.n_items, "items,", matrix.n_specialists, "specialists, dimensions", matrix.dimensions)

result = analyze(matrix, ConditionSpec.concordance(50))
print("retained", len(result.retention), "items; excluded", [i for i, _ in result.retention.excluded])

# columns of W count how often each specialist agreed with the majority
print("W column totals:", result.w.col_totals.tolist(), "N =", result.w.grand_total)

t = result.test
print(f"Q = {t.q:.3f}, df = {t.df}, p = {t.p_value:.3f} ({t.method}) -> {result.decision}")

# how often the majority dimension matches the dimension the items were written for
agree = theoretical_agreement(matrix, result.retention)
print(sum(a for *_, a in agree), "of", len(agree), "match the theoretical dimension")

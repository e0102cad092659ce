"""
Leading rows versus retained rows
=================================

The reference W table, Q = 8.7 and the sub-panel ranking come out of a
procedure that takes the first v rows of the item table, v being the
number of retained items, rather than the retained rows.  The
``leading`` row alignment reproduces it so both versions can be compared.
"""

from contentq import analyze, analyze_subgroups, load_teaching_learning

matrix = load_teaching_learning()
for alignment in ("retained", "leading"):
    result = analyze(matrix, row_alignment=alignment)
    report = analyze_subgroups(matrix, row_alignment=alignment)
    print(f"{alignment:>8}: W rows {list(result.w.items[:6])}...  "
          f"col totals {result.w.col_totals.tolist()}  Q = {result.test.q:.3f}  "
          f"p = {result.test.p_value:.3f}  sub-panels rejected {len(report.rejected())}")

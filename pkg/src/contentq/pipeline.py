"""One-panel analysis: retention, W table and Cochran's Q test."""

from __future__ import annotations

from dataclasses import dataclass

from .cochran import AUTO, PermutationBudget, QTestResult, run_test
from .condition import (
    LEADING,
    RETAINED,
    ROW_ALIGNMENTS,
    CI,
    ConditionSpec,
    RetentionResult,
    WMatrix,
    apply_condition,
    build_w_matrix,
    leading_rows_w_matrix,
)
from .judgements import JudgementMatrix


@dataclass(frozen=True)
class Analysis:
    condition: ConditionSpec
    retention: RetentionResult
    w: WMatrix
    test: QTestResult
    alpha: float
    row_alignment: str = RETAINED

    @property
    def reject(self) -> bool:
        return self.test.p_value < self.alpha

    @property
    def decision(self) -> str:
        return "reject" if self.reject else "do not reject"


def theoretical_agreement(matrix: JudgementMatrix, retention: RetentionResult) -> list[tuple[str, str, str, bool]]:
    """``(item, assigned, theoretical, agrees)`` for retained items; empty without a theoretical column."""
    if matrix.theoretical is None:
        return []
    theo = dict(zip(matrix.items, matrix.theoretical))
    return [(item, dim, theo[item], dim == theo[item]) for item, dim in retention.retained]


def _empty_result(s: int) -> QTestResult:
    return QTestResult(q=0.0, df=s - 1, p_value=1.0, method="none", degenerate=True, n_items=0, n_specialists=s)


def analyze(
    matrix: JudgementMatrix,
    condition: ConditionSpec = ConditionSpec.concordance(50),
    method: str = AUTO,
    budget: PermutationBudget = PermutationBudget(),
    alpha: float = 0.05,
    row_alignment: str = RETAINED,
    workers: int = 1,
) -> Analysis:
    """Run the full pipeline on one panel.

    ``row_alignment="leading"`` swaps in :func:`leading_rows_w_matrix`
    (CI conditions only) to regenerate results computed that way.
    When no item is retained the test is reported as degenerate with
    ``method="none"``.
    """
    if not 0 < alpha < 1:
        raise ValueError(f"alpha must lie in (0, 1), got {alpha}")
    if row_alignment not in ROW_ALIGNMENTS:
        raise ValueError(f"row_alignment must be one of {ROW_ALIGNMENTS}")
    retention = apply_condition(matrix, condition)
    if row_alignment == LEADING:
        if condition.kind != CI:
            raise ValueError("leading row alignment is defined for CI conditions only")
        w = leading_rows_w_matrix(matrix, condition.ci_percent)
    else:
        w = build_w_matrix(matrix, retention)
    if w.shape[0] == 0:
        test = _empty_result(matrix.n_specialists)
    else:
        test = run_test(w, method=method, budget=budget, workers=workers)
    return Analysis(condition=condition, retention=retention, w=w, test=test, alpha=alpha, row_alignment=row_alignment)

"""Exhaustive search over specialist sub-panels."""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from itertools import combinations

from . import rng
from .cochran import ASYMPTOTIC, PermutationBudget
from .condition import RETAINED, ConditionSpec
from .judgements import JudgementMatrix
from .pipeline import analyze

MIN_SUBGROUP = 6


def enumerate_subgroups(s: int, min_size: int, max_size: int, include_full: bool = True) -> list[tuple[int, ...]]:
    """All column subsets with sizes in ``[min_size, max_size]``.

    Subsets come by increasing size, lexicographic within a size.  With
    ``include_full`` the whole panel is appended when it is not already
    among them.
    """
    if not 2 <= min_size <= max_size <= s:
        raise ValueError(f"need 2 <= min_size <= max_size <= s, got min={min_size}, max={max_size}, s={s}")
    out = [c for k in range(min_size, max_size + 1) for c in combinations(range(s), k)]
    full = tuple(range(s))
    if include_full and max_size < s:
        out.append(full)
    return out


@dataclass(frozen=True)
class SubgroupEntry:
    specialists: tuple[str, ...]
    positions: tuple[int, ...]
    q: float
    p_value: float
    n_retained: int
    degenerate: bool
    method: str

    def to_dict(self) -> dict:
        return {
            "specialists": list(self.specialists),
            "q": self.q,
            "p_value": self.p_value,
            "n_retained": self.n_retained,
            "degenerate": self.degenerate,
            "method": self.method,
        }


@dataclass(frozen=True)
class SubgroupReport:
    """Entries ranked by descending p-value, then larger panels, then column order."""

    entries: tuple[SubgroupEntry, ...]
    alpha: float

    def __len__(self):
        return len(self.entries)

    def rejected(self) -> list[SubgroupEntry]:
        return [e for e in self.entries if e.p_value < self.alpha]

    def top(self, k: int) -> list[SubgroupEntry]:
        return list(self.entries[:k])


def _sort_key(e: SubgroupEntry):
    return (-e.p_value, -len(e.positions), e.positions)


def _analyze_subset(matrix, positions, condition, method, budget, alpha, row_alignment) -> SubgroupEntry:
    sub = matrix.restrict(positions)
    result = analyze(sub, condition, method=method, budget=budget, alpha=alpha, row_alignment=row_alignment)
    return SubgroupEntry(
        specialists=sub.specialists,
        positions=tuple(positions),
        q=result.test.q,
        p_value=result.test.p_value,
        n_retained=result.w.shape[0],
        degenerate=result.test.degenerate,
        method=result.test.method,
    )


def analyze_subgroups(
    matrix: JudgementMatrix,
    condition: ConditionSpec = ConditionSpec.concordance(50),
    method: str = ASYMPTOTIC,
    budget: PermutationBudget = PermutationBudget(),
    alpha: float = 0.05,
    min_size: int = MIN_SUBGROUP,
    max_size: int | None = None,
    include_full: bool = True,
    row_alignment: str = RETAINED,
    workers: int = 1,
) -> SubgroupReport:
    """Rerun the whole pipeline on every sub-panel and rank the results.

    Retention is recomputed on each sub-panel, since majority sets and the
    CI head-count depend on who is in it.  ``max_size`` defaults to
    ``s - 1``.
    """
    s = matrix.n_specialists
    if max_size is None:
        max_size = s - 1
    subsets = enumerate_subgroups(s, min_size, max_size, include_full)
    tasks = [(matrix, sub, condition, method, budget, alpha, row_alignment) for sub in subsets]
    entries = rng.map_blocks(_analyze_subset, tasks, workers)
    return SubgroupReport(entries=tuple(sorted(entries, key=_sort_key)), alpha=alpha)


CSV_FIELDS = ("specialists", "q", "p_value", "n_retained", "degenerate")


def format_subgroup_csv(report: SubgroupReport, top: int | None = None) -> str:
    """Subsets as ``+``-joined ids; floats written with full precision."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_FIELDS)
    for e in report.entries[:top]:
        writer.writerow(["+".join(e.specialists), repr(e.q), repr(e.p_value), e.n_retained, str(e.degenerate).lower()])
    return buf.getvalue()


def parse_subgroup_csv(text: str) -> list[dict]:
    rows = []
    for row in csv.DictReader(io.StringIO(text)):
        rows.append({
            "specialists": tuple(row["specialists"].split("+")),
            "q": float(row["q"]),
            "p_value": float(row["p_value"]),
            "n_retained": int(row["n_retained"]),
            "degenerate": row["degenerate"] == "true",
        })
    return rows

"""Majority sets, condition functions and the binary agreement table W."""

from __future__ import annotations

import csv
import io
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .judgements import JudgementMatrix

CI = "ci"
CVR = "cvr"

TIE = "tie"
BELOW_THRESHOLD = "below-threshold"

RETAINED = "retained"
LEADING = "leading"
ROW_ALIGNMENTS = (RETAINED, LEADING)


def _exact(value) -> Fraction:
    # str() keeps 62.5 as 125/2 instead of the binary float expansion
    if isinstance(value, Fraction):
        return value
    return Fraction(str(value))


@dataclass(frozen=True)
class MajoritySet:
    item: str
    dimensions: frozenset[str]
    max_count: int

    @property
    def unique(self) -> bool:
        return len(self.dimensions) == 1


@dataclass(frozen=True)
class ConditionSpec:
    """A condition function: concordance index (``ci``) or content validity ratio (``cvr``).

    Use the ``concordance`` and ``validity_ratio`` constructors.
    """

    kind: str
    ci_percent: float | None = None
    cvr_threshold: float | None = None

    def __post_init__(self):
        if self.kind == CI:
            if self.ci_percent is None or self.cvr_threshold is not None:
                raise ValueError("a CI condition takes ci_percent only")
            if not 50 <= _exact(self.ci_percent) <= 100:
                raise ValueError(f"ci_percent must lie in [50, 100], got {self.ci_percent}")
        elif self.kind == CVR:
            if self.cvr_threshold is None or self.ci_percent is not None:
                raise ValueError("a CVR condition takes cvr_threshold only")
            if not -1 <= _exact(self.cvr_threshold) <= 1:
                raise ValueError(f"cvr_threshold must lie in [-1, 1], got {self.cvr_threshold}")
        else:
            raise ValueError(f"unknown condition kind {self.kind!r}")

    @classmethod
    def concordance(cls, percent: float) -> "ConditionSpec":
        return cls(CI, ci_percent=percent)

    @classmethod
    def validity_ratio(cls, threshold: float) -> "ConditionSpec":
        return cls(CVR, cvr_threshold=threshold)

    def passes(self, max_count: int, s: int) -> bool:
        """Threshold part of the condition, in exact arithmetic."""
        if self.kind == CI:
            return 100 * max_count >= _exact(self.ci_percent) * s
        return Fraction(2 * max_count, s) - 1 >= _exact(self.cvr_threshold)

    def describe(self) -> str:
        if self.kind == CI:
            return f"CI >= {self.ci_percent}%"
        return f"CVR >= {self.cvr_threshold}"


@dataclass(frozen=True)
class RetentionResult:
    retained: tuple[tuple[str, str], ...]
    excluded: tuple[tuple[str, str], ...]

    @property
    def retained_items(self) -> tuple[str, ...]:
        return tuple(item for item, _ in self.retained)

    @property
    def assignment(self) -> dict[str, str]:
        return dict(self.retained)

    def __len__(self):
        return len(self.retained)


def _counts(row: Sequence[str]) -> Counter:
    return Counter(row)


def majority_set(matrix: JudgementMatrix, item: str) -> MajoritySet:
    """Dimensions that received the most votes for ``item``."""
    counts = _counts(matrix.row(item))
    top = max(counts.values())
    return MajoritySet(
        item=str(item),
        dimensions=frozenset(d for d, c in counts.items() if c == top),
        max_count=top,
    )


def concordance_fraction(matrix: JudgementMatrix, item: str) -> Fraction:
    """Share of specialists on the modal dimension, as an exact fraction."""
    return Fraction(majority_set(matrix, item).max_count, matrix.n_specialists)


def cvr(matrix: JudgementMatrix, item: str) -> Fraction:
    """Lawshe's ratio ``(n_e - s/2) / (s/2)`` with ``n_e`` the modal head-count."""
    n_e = majority_set(matrix, item).max_count
    return Fraction(2 * n_e, matrix.n_specialists) - 1


def apply_condition(matrix: JudgementMatrix, spec: ConditionSpec) -> RetentionResult:
    """Split items into retained (with their unique modal dimension) and excluded.

    An item failing the threshold is excluded as ``below-threshold``; one
    meeting it with several modal dimensions is excluded as ``tie``.
    """
    retained = []
    excluded = []
    s = matrix.n_specialists
    for item in matrix.items:
        ms = majority_set(matrix, item)
        if not spec.passes(ms.max_count, s):
            excluded.append((item, BELOW_THRESHOLD))
        elif not ms.unique:
            excluded.append((item, TIE))
        else:
            (dim,) = ms.dimensions
            retained.append((item, dim))
    return RetentionResult(retained=tuple(retained), excluded=tuple(excluded))


@dataclass(frozen=True)
class WMatrix:
    """Binary agreement-with-majority table, retained items x specialists."""

    items: tuple[str, ...]
    specialists: tuple[str, ...]
    cells: np.ndarray

    def __post_init__(self):
        cells = np.array(self.cells, dtype=np.int64, copy=True)
        if cells.ndim != 2:
            cells = cells.reshape(len(self.items), len(self.specialists))
        if cells.shape != (len(self.items), len(self.specialists)):
            raise ValueError(f"cells shape {cells.shape} does not match ids")
        if cells.size and not np.isin(cells, (0, 1)).all():
            raise ValueError("W cells must be 0 or 1")
        cells.setflags(write=False)
        object.__setattr__(self, "items", tuple(str(i) for i in self.items))
        object.__setattr__(self, "specialists", tuple(str(e) for e in self.specialists))
        object.__setattr__(self, "cells", cells)

    @classmethod
    def from_array(cls, cells, items=None, specialists=None) -> "WMatrix":
        cells = np.asarray(cells, dtype=np.int64)
        if cells.ndim != 2:
            raise ValueError("expected a 2-d array")
        v, s = cells.shape
        return cls(
            items=items if items is not None else [str(l + 1) for l in range(v)],
            specialists=specialists if specialists is not None else [str(j + 1) for j in range(s)],
            cells=cells,
        )

    @property
    def shape(self) -> tuple[int, int]:
        return self.cells.shape

    @property
    def row_totals(self) -> np.ndarray:
        return self.cells.sum(axis=1)

    @property
    def col_totals(self) -> np.ndarray:
        return self.cells.sum(axis=0)

    @property
    def grand_total(self) -> int:
        return int(self.cells.sum())


def build_w_matrix(matrix: JudgementMatrix, retention: RetentionResult) -> WMatrix:
    """Mark, for each retained item, which specialists chose its assigned dimension."""
    rows = []
    for item, dim in retention.retained:
        try:
            row = matrix.row(item)
        except KeyError:
            raise KeyError(f"retained item {item!r} is not in the judgement matrix") from None
        rows.append([int(x == dim) for x in row])
    cells = np.array(rows, dtype=np.int64).reshape(len(rows), matrix.n_specialists)
    return WMatrix(items=retention.retained_items, specialists=matrix.specialists, cells=cells)


def first_occurrence_mode(row: Sequence[str]) -> str:
    """Modal label, ties resolved by the specialist who named one first."""
    counts = _counts(row)
    top = max(counts.values())
    return next(x for x in row if counts[x] == top)


def leading_rows_w_matrix(matrix: JudgementMatrix, ci_percent: float) -> WMatrix:
    """W built from the leading item rows instead of the retained ones.

    The number of rows ``v`` is the count of items on which strictly more
    than ``ci_percent`` % of specialists agree, but the rows themselves are
    the first ``v`` items of the table, scored against their
    first-occurrence modal label, whether or not they passed the
    condition.  Kept to regenerate results produced that way; not a valid
    condition function.
    """
    c = _exact(ci_percent)
    s = matrix.n_specialists
    v = sum(1 for row in matrix.cells if 100 * max(_counts(row).values()) > c * s)
    rows = []
    for row in matrix.cells[:v]:
        mode = first_occurrence_mode(row)
        rows.append([int(x == mode) for x in row])
    cells = np.array(rows, dtype=np.int64).reshape(v, s)
    return WMatrix(items=matrix.items[:v], specialists=matrix.specialists, cells=cells)


def format_w_csv(w: WMatrix) -> str:
    """W in the judgement-file dialect (cells are ``0``/``1``)."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["item", *w.specialists])
    for item, row in zip(w.items, w.cells.tolist()):
        writer.writerow([item, *row])
    return buf.getvalue()


def format_retention_csv(retention: RetentionResult, matrix: JudgementMatrix) -> str:
    """One row per input item: ``item,status,dimension,reason``."""
    kept = retention.assignment
    dropped = dict(retention.excluded)
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["item", "status", "dimension", "reason"])
    for item in matrix.items:
        if item in kept:
            writer.writerow([item, "retained", kept[item], ""])
        else:
            writer.writerow([item, "excluded", "", dropped[item]])
    return buf.getvalue()


def parse_retention_csv(text: str) -> RetentionResult:
    reader = csv.DictReader(io.StringIO(text))
    retained, excluded = [], []
    for row in reader:
        if row["status"] == "retained":
            retained.append((row["item"], row["dimension"]))
        else:
            excluded.append((row["item"], row["reason"]))
    return RetentionResult(retained=tuple(retained), excluded=tuple(excluded))

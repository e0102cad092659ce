"""Judgement matrices: the items x specialists table of dimension labels.

A judgement file is a UTF-8 CSV whose header reads
``item,<spec_1>,...,<spec_s>[,theoretical]``.  Each following row holds
one item id and the dimension label each specialist assigned to it.  The
optional ``theoretical`` column carries the dimension the item was
written for.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

THEORETICAL_COLUMN = "theoretical"
MIN_SPECIALISTS = 6


class JudgementFormatError(ValueError):
    """Raised when a judgement file cannot be parsed.

    ``errors`` holds ``(location, message)`` pairs, one per problem found.
    """

    def __init__(self, errors: list[tuple[str, str]]):
        self.errors = list(errors)
        msg = "; ".join(f"{loc}: {m}" for loc, m in self.errors)
        super().__init__(msg)


@dataclass(frozen=True)
class JudgementMatrix:
    """Immutable items x specialists table of dimension labels.

    Parameters
    ----------
    items, specialists : sequence of str
        Row and column ids, unique within each axis.
    cells : sequence of sequence of str
        ``cells[l][j]`` is the label specialist ``j`` gave item ``l``.
    theoretical : sequence of str, optional
        Dimension each item was written for.
    dimensions : sequence of str, optional
        Declared dimension set.  When omitted it is inferred from the
        cells and the theoretical column, in order of first appearance.
    """

    items: tuple[str, ...]
    specialists: tuple[str, ...]
    cells: tuple[tuple[str, ...], ...]
    theoretical: tuple[str, ...] | None = None
    dimensions: tuple[str, ...] = field(default=())

    def __post_init__(self):
        object.__setattr__(self, "items", tuple(str(i) for i in self.items))
        object.__setattr__(self, "specialists", tuple(str(e) for e in self.specialists))
        object.__setattr__(self, "cells", tuple(tuple(str(x) for x in row) for row in self.cells))
        if self.theoretical is not None:
            object.__setattr__(self, "theoretical", tuple(str(t) for t in self.theoretical))

        if len(set(self.items)) != len(self.items):
            raise ValueError("item ids must be unique")
        if len(set(self.specialists)) != len(self.specialists):
            raise ValueError("specialist ids must be unique")
        if len(self.cells) != len(self.items):
            raise ValueError("one row of cells is required per item")
        s = len(self.specialists)
        for item, row in zip(self.items, self.cells):
            if len(row) != s:
                raise ValueError(f"item {item!r} has {len(row)} cells for {s} specialists")
            if any(x == "" for x in row):
                raise ValueError(f"item {item!r} has a missing judgement")
        if self.theoretical is not None and len(self.theoretical) != len(self.items):
            raise ValueError("theoretical column length differs from item count")

        observed = _ordered_union(self.cells, self.theoretical)
        if self.dimensions:
            dims = tuple(str(d) for d in self.dimensions)
            if len(set(dims)) != len(dims) or "" in dims:
                raise ValueError("dimension labels must be unique and non-empty")
            unknown = [x for x in observed if x not in set(dims)]
            if unknown:
                raise ValueError(f"labels outside the declared dimensions: {unknown}")
            object.__setattr__(self, "dimensions", dims)
        else:
            object.__setattr__(self, "dimensions", observed)

    @property
    def n_items(self) -> int:
        return len(self.items)

    @property
    def n_specialists(self) -> int:
        return len(self.specialists)

    @property
    def n_dimensions(self) -> int:
        return len(self.dimensions)

    def codes(self) -> np.ndarray:
        """Cells as an ``(m, s)`` integer array indexing ``dimensions``."""
        index = {d: k for k, d in enumerate(self.dimensions)}
        out = np.array([[index[x] for x in row] for row in self.cells], dtype=np.int64)
        return out.reshape(self.n_items, self.n_specialists)

    def item_index(self, item: str) -> int:
        try:
            return self.items.index(str(item))
        except ValueError:
            raise KeyError(f"unknown item id {item!r}") from None

    def row(self, item: str) -> tuple[str, ...]:
        return self.cells[self.item_index(item)]

    def restrict(self, specialists: Sequence[int]) -> "JudgementMatrix":
        """Return the sub-panel made of the given specialist column positions."""
        cols = list(specialists)
        return JudgementMatrix(
            items=self.items,
            specialists=tuple(self.specialists[j] for j in cols),
            cells=tuple(tuple(row[j] for j in cols) for row in self.cells),
            theoretical=self.theoretical,
            dimensions=self.dimensions,
        )

    def relabel(self, mapping: dict[str, str]) -> "JudgementMatrix":
        """Apply a bijection to every dimension label."""
        return JudgementMatrix(
            items=self.items,
            specialists=self.specialists,
            cells=tuple(tuple(mapping[x] for x in row) for row in self.cells),
            theoretical=None if self.theoretical is None else tuple(mapping[t] for t in self.theoretical),
            dimensions=tuple(mapping[d] for d in self.dimensions),
        )

    @classmethod
    def from_codes(cls, codes, labels: Sequence[str] | None = None, items=None, specialists=None):
        """Build a matrix from an integer array of dimension indices."""
        codes = np.asarray(codes)
        m, s = codes.shape
        if labels is None:
            labels = [f"C{k + 1}" for k in range(int(codes.max()) + 1 if codes.size else 1)]
        labels = list(labels)
        return cls(
            items=items if items is not None else [str(i + 1) for i in range(m)],
            specialists=specialists if specialists is not None else [str(j + 1) for j in range(s)],
            cells=[[labels[k] for k in row] for row in codes.tolist()],
            dimensions=labels,
        )


def _ordered_union(cells: Iterable[Iterable[str]], extra: Iterable[str] | None) -> tuple[str, ...]:
    seen: dict[str, None] = {}
    for row in cells:
        for x in row:
            seen.setdefault(x, None)
    for x in extra or ():
        seen.setdefault(x, None)
    return tuple(seen)


def parse_judgement_csv(text, dimensions: Sequence[str] | None = None) -> JudgementMatrix:
    """Parse a judgement file.

    Parameters
    ----------
    text : str or text stream
        CSV content in the judgement layout.
    dimensions : sequence of str, optional
        Declared dimension set.  Cells outside it are reported as errors.

    Raises
    ------
    JudgementFormatError
        With every problem located by line (header is line 1) and column.
    """
    if not isinstance(text, str):
        text = text.read()
    rows = list(csv.reader(io.StringIO(text)))
    # csv gives [] for blank lines; only trailing ones are tolerated
    while rows and not rows[-1]:
        rows.pop()
    if not rows:
        raise JudgementFormatError([("line 1", "empty file")])

    errors: list[tuple[str, str]] = []
    header = [h.strip() for h in rows[0]]
    if not header or header[0].lower() != "item":
        errors.append(("line 1, column 1", "header must start with 'item'"))
    has_theoretical = len(header) > 1 and header[-1].lower() == THEORETICAL_COLUMN
    specialists = header[1:-1] if has_theoretical else header[1:]
    if not specialists:
        errors.append(("line 1", "no specialist columns"))
    for j, e in enumerate(specialists):
        if not e:
            errors.append((f"line 1, column {j + 2}", "empty specialist id"))
    seen: dict[str, int] = {}
    for j, e in enumerate(specialists):
        if e in seen:
            errors.append((f"line 1, column {j + 2}", f"duplicate specialist id {e!r}"))
        seen.setdefault(e, j)

    width = len(header)
    declared = set(dimensions) if dimensions else None
    items: list[str] = []
    cells: list[list[str]] = []
    theoretical: list[str] = []
    item_lines: dict[str, int] = {}
    for lineno, row in enumerate(rows[1:], start=2):
        if not row:
            errors.append((f"line {lineno}", "blank line"))
            continue
        row = [x.strip() for x in row]
        if len(row) != width:
            errors.append((f"line {lineno}", f"expected {width} fields, found {len(row)}"))
            continue
        item = row[0]
        if not item:
            errors.append((f"line {lineno}, column 1", "empty item id"))
        elif item in item_lines:
            errors.append((f"line {lineno}, column 1", f"duplicate item id {item!r} (first on line {item_lines[item]})"))
        item_lines.setdefault(item, lineno)
        judged = row[1:1 + len(specialists)]
        for j, x in enumerate(judged):
            if not x:
                errors.append((f"line {lineno}, column {j + 2}", "missing judgement"))
            elif declared is not None and x not in declared:
                errors.append((f"line {lineno}, column {j + 2}", f"unknown dimension label {x!r}"))
        if has_theoretical:
            t = row[-1]
            if not t:
                errors.append((f"line {lineno}, column {width}", "missing theoretical dimension"))
            elif declared is not None and t not in declared:
                errors.append((f"line {lineno}, column {width}", f"unknown dimension label {t!r}"))
            theoretical.append(t)
        items.append(item)
        cells.append(judged)

    if not items and not errors:
        errors.append(("line 2", "no item rows"))
    if errors:
        raise JudgementFormatError(errors)
    return JudgementMatrix(
        items=items,
        specialists=specialists,
        cells=cells,
        theoretical=theoretical if has_theoretical else None,
        dimensions=tuple(dimensions) if dimensions else (),
    )


def read_judgement_csv(path, dimensions: Sequence[str] | None = None) -> JudgementMatrix:
    with open(path, encoding="utf-8", newline="") as fh:
        return parse_judgement_csv(fh.read(), dimensions=dimensions)


def format_judgement_csv(matrix: JudgementMatrix) -> str:
    """Serialize ``matrix`` in the judgement layout with ``\\n`` line ends."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    header = ["item", *matrix.specialists]
    if matrix.theoretical is not None:
        header.append(THEORETICAL_COLUMN)
    writer.writerow(header)
    for l, item in enumerate(matrix.items):
        row = [item, *matrix.cells[l]]
        if matrix.theoretical is not None:
            row.append(matrix.theoretical[l])
        writer.writerow(row)
    return buf.getvalue()


@dataclass(frozen=True)
class ValidationReport:
    errors: tuple[tuple[str, str], ...] = ()
    warnings: tuple[tuple[str, str], ...] = ()

    @property
    def ok(self) -> bool:
        return not self.errors


def validate_matrix(matrix: JudgementMatrix, min_specialists: int = MIN_SPECIALISTS) -> ValidationReport:
    """Check study-level preconditions that parsing does not enforce.

    Panels smaller than ``min_specialists`` are errors.  Specialists who
    gave one label to every item, and studies with fewer than two
    dimensions, are reported as warnings.
    """
    errors = []
    warnings = []
    s = matrix.n_specialists
    if s < min_specialists:
        errors.append(("panel", f"{s} specialists, at least {min_specialists} required"))
    if matrix.n_dimensions < 2:
        warnings.append(("dimensions", f"only {matrix.n_dimensions} dimension label(s) present"))
    if matrix.n_items > 1:
        for j, e in enumerate(matrix.specialists):
            column = {row[j] for row in matrix.cells}
            if len(column) == 1:
                (label,) = column
                warnings.append((f"specialist {e}", f"gave {label!r} to every item"))
    return ValidationReport(errors=tuple(errors), warnings=tuple(warnings))

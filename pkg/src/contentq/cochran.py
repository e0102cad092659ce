"""Cochran's Q for a binary items x specialists table.

Items are blocks and specialists are treatments.  Three p-values are
offered:

* ``exact``: every row keeps its total ``R_l`` and all ``C(s, R_l)``
  placements of its ones are equally likely, independently across rows.
  The p-value is the probability of a statistic at least as large as the
  observed one.
* ``mc``: the same null model sampled by Monte Carlo.
* ``asymptotic``: chi-square with ``s - 1`` degrees of freedom.

Q depends on the table only through the column totals ``D``, because the
row totals (hence ``N`` and the denominator) are fixed under the null
model.  Exceedance is decided on the integer ``sum(D**2)`` so ties are
detected exactly.
"""

from __future__ import annotations

import math
from collections import defaultdict
from dataclasses import asdict, dataclass
from itertools import combinations

import numpy as np

from . import rng
from .condition import WMatrix
from .specfun import chi_square_sf

EXACT = "exact"
MONTE_CARLO = "mc"
ASYMPTOTIC = "asymptotic"
AUTO = "auto"
METHODS = (AUTO, EXACT, MONTE_CARLO, ASYMPTOTIC)

DEFAULT_EXACT_CUTOFF = 10**7
DEFAULT_MC_REPLICATES = 10**5
LARGE_SAMPLE_ITEMS = 24


class ExactBudgetExceeded(ValueError):
    """The exact null distribution has more arrangements than allowed."""


@dataclass(frozen=True)
class PermutationBudget:
    exact_cutoff: int = DEFAULT_EXACT_CUTOFF
    mc_replicates: int = DEFAULT_MC_REPLICATES
    seed: int = 0

    def __post_init__(self):
        if self.exact_cutoff < 1:
            raise ValueError("exact_cutoff must be at least 1")
        if self.mc_replicates < 1000:
            raise ValueError("mc_replicates must be at least 1000")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be an unsigned 64-bit integer")


@dataclass(frozen=True)
class QTestResult:
    q: float
    df: int
    p_value: float
    method: str
    degenerate: bool
    n_items: int
    n_specialists: int
    mc_std_error: float | None = None

    def to_dict(self) -> dict:
        return asdict(self)


def _cells(w) -> np.ndarray:
    cells = w.cells if isinstance(w, WMatrix) else np.asarray(w, dtype=np.int64)
    if cells.ndim != 2 or cells.shape[0] < 1:
        raise ValueError("Q needs at least one item row")
    if cells.shape[1] < 2:
        raise ValueError("Q needs at least two specialists")
    return cells


def _parts(cells: np.ndarray) -> tuple[int, int, int, int, np.ndarray]:
    """``(s, N, denominator, sum(D**2), R)`` as exact integers."""
    s = cells.shape[1]
    R = cells.sum(axis=1).astype(np.int64)
    D = cells.sum(axis=0).astype(np.int64)
    N = int(R.sum())
    den = int((R * (s - R)).sum())
    return s, N, den, int((D * D).sum()), R


def _q_from_sum_sq(s: int, N: int, den: int, sum_sq) -> float:
    # Q = s(s-1) sum (D - N/s)^2 / den = (s-1)(s sum D^2 - N^2) / den
    return (s - 1) * (s * sum_sq - N * N) / den


def q_statistic(w) -> tuple[float, bool]:
    """Cochran's Q and a flag for the degenerate all-rows-unanimous case.

    When every row total is 0 or ``s`` the denominator vanishes; Q is then
    reported as 0 with ``degenerate=True``.
    """
    cells = _cells(w)
    s, N, den, sum_sq, _ = _parts(cells)
    if den == 0:
        return 0.0, True
    return _q_from_sum_sq(s, N, den, sum_sq), False


def _result(cells, q, degenerate, p, method, se=None) -> QTestResult:
    v, s = cells.shape
    if degenerate:
        q, p = 0.0, 1.0
    return QTestResult(
        q=float(q),
        df=s - 1,
        p_value=float(min(1.0, max(0.0, p))),
        method=method,
        degenerate=bool(degenerate),
        n_items=v,
        n_specialists=s,
        mc_std_error=se,
    )


def asymptotic_p(w) -> QTestResult:
    cells = _cells(w)
    q, degenerate = q_statistic(cells)
    p = 1.0 if degenerate else chi_square_sf(q, cells.shape[1] - 1)
    return _result(cells, q, degenerate, p, ASYMPTOTIC)


def arrangement_count(w) -> int:
    """Number of row-total-preserving tables, ``prod C(s, R_l)``."""
    cells = _cells(w)
    s = cells.shape[1]
    return math.prod(math.comb(s, int(r)) for r in cells.sum(axis=1))


def _sum_sq_distribution(s: int, row_totals) -> dict[int, int]:
    """Map ``sum(D**2)`` to the number of arrangements producing it.

    Columns are exchangeable under the null model, so the state after each
    row is the sorted vector of running column totals.
    """
    states: dict[tuple[int, ...], int] = {(0,) * s: 1}
    for r in row_totals:
        r = int(r)
        if r in (0, s):
            states = {tuple(x + (r == s) for x in st): n for st, n in states.items()}
            continue
        placements = list(combinations(range(s), r))
        nxt: dict[tuple[int, ...], int] = defaultdict(int)
        for st, n in states.items():
            for cols in placements:
                new = list(st)
                for j in cols:
                    new[j] += 1
                nxt[tuple(sorted(new))] += n
        states = nxt
    dist: dict[int, int] = defaultdict(int)
    for st, n in states.items():
        dist[sum(x * x for x in st)] += n
    return dict(dist)


def exact_null_distribution(w) -> dict[float, float]:
    """Exact null distribution of Q as ``{q: probability}``."""
    cells = _cells(w)
    s, N, den, _, R = _parts(cells)
    dist = _sum_sq_distribution(s, R)
    total = sum(dist.values())
    if den == 0:
        return {0.0: 1.0}
    out: dict[float, float] = {}
    for sum_sq, n in dist.items():
        q = _q_from_sum_sq(s, N, den, sum_sq)
        out[q] = out.get(q, 0.0) + n / total
    return out


def exact_p(w, budget: PermutationBudget = PermutationBudget()) -> QTestResult:
    """Exact conditional p-value by enumeration of row placements.

    Raises
    ------
    ExactBudgetExceeded
        When ``prod C(s, R_l)`` exceeds ``budget.exact_cutoff``.
    """
    cells = _cells(w)
    count = arrangement_count(cells)
    if count > budget.exact_cutoff:
        raise ExactBudgetExceeded(
            f"{count} arrangements exceed the exact cutoff of {budget.exact_cutoff}; use Monte Carlo"
        )
    s, N, den, observed, R = _parts(cells)
    if den == 0:
        return _result(cells, 0.0, True, 1.0, EXACT)
    dist = _sum_sq_distribution(s, R)
    hits = sum(n for sum_sq, n in dist.items() if sum_sq >= observed)
    # integer ratio, rounded once
    p = hits / count
    return _result(cells, _q_from_sum_sq(s, N, den, observed), False, p, EXACT)


def _mc_block(seed: int, start: int, stop: int, row_totals: np.ndarray, s: int, observed: int) -> int:
    v = len(row_totals)
    u = rng.replicate_uniforms(seed, start, stop, v * s).reshape(stop - start, v, s)
    # rank of each position inside its row; the R_l smallest ranks get the ones
    ranks = np.argsort(np.argsort(u, axis=-1), axis=-1)
    ones = ranks < row_totals[None, :, None]
    D = ones.sum(axis=1, dtype=np.int64)
    return int(((D * D).sum(axis=1) >= observed).sum())


def mc_permutation_p(w, budget: PermutationBudget = PermutationBudget(), workers: int = 1) -> QTestResult:
    """Monte Carlo p-value ``(1 + hits) / (B + 1)`` under the exact null model.

    Replicate ``b`` is a pure function of ``(budget.seed, b)``, so the
    result does not depend on ``workers``.
    """
    cells = _cells(w)
    s, N, den, observed, R = _parts(cells)
    B = budget.mc_replicates
    if den == 0:
        return _result(cells, 0.0, True, 1.0, MONTE_CARLO, se=0.0)
    tasks = [(budget.seed, a, b, R, s, observed) for a, b in rng.blocks(B)]
    hits = sum(rng.map_blocks(_mc_block, tasks, workers))
    p = (1 + hits) / (B + 1)
    se = math.sqrt(p * (1 - p) / B)
    return _result(cells, _q_from_sum_sq(s, N, den, observed), False, p, MONTE_CARLO, se=se)


def choose_method(w, budget: PermutationBudget) -> str:
    """``auto`` dispatch: exact within the cutoff, else chi-square for 24+ items, else Monte Carlo."""
    cells = _cells(w)
    if arrangement_count(cells) <= budget.exact_cutoff:
        return EXACT
    if cells.shape[0] >= LARGE_SAMPLE_ITEMS:
        return ASYMPTOTIC
    return MONTE_CARLO


def run_test(w, method: str = AUTO, budget: PermutationBudget = PermutationBudget(), workers: int = 1) -> QTestResult:
    if method not in METHODS:
        raise ValueError(f"unknown method {method!r}; expected one of {METHODS}")
    if method == AUTO:
        method = choose_method(w, budget)
    if method == EXACT:
        return exact_p(w, budget)
    if method == MONTE_CARLO:
        return mc_permutation_p(w, budget, workers=workers)
    return asymptotic_p(w)

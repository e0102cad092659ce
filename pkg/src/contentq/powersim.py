"""Power of the specialist-homogeneity test by simulation.

Each specialist judges every item independently: the correct dimension
with probability ``p_correct`` and the ``k``-th wrong dimension with
probability ``error_split[k] * (1 - p_correct)``.  Wrong dimensions are
counted cyclically from the correct one.  Item ``l`` belongs to dimension
``l mod n_dims``.

A replicate is simulated, filtered with the CI condition, turned into a W
table and tested with the chi-square approximation.  Replicates with
fewer than two W rows or a degenerate table count as non-rejections.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from . import rng
from .condition import LEADING, RETAINED, ROW_ALIGNMENTS, _exact
from .judgements import JudgementMatrix
from .specfun import chi_square_sf_many

_PROB_TOL = 1e-12


@dataclass(frozen=True)
class CapabilityProfile:
    p_correct: float
    error_split: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "error_split", tuple(float(x) for x in self.error_split))
        if not 0 <= self.p_correct <= 1:
            raise ValueError(f"p_correct must lie in [0, 1], got {self.p_correct}")
        if not self.error_split:
            raise ValueError("error_split needs at least one wrong dimension")
        if any(x < 0 for x in self.error_split):
            raise ValueError("error_split entries must be non-negative")
        if abs(sum(self.error_split) - 1) > _PROB_TOL:
            raise ValueError(f"error_split must sum to 1, got {sum(self.error_split)}")

    @classmethod
    def symmetric(cls, p_correct: float, n_dims: int = 3) -> "CapabilityProfile":
        return cls(p_correct, (1.0 / (n_dims - 1),) * (n_dims - 1))

    @property
    def probabilities(self) -> tuple[float, ...]:
        """``(correct, wrong_1, ..., wrong_{n-1})``."""
        q = 1.0 - self.p_correct
        return (self.p_correct, *(x * q for x in self.error_split))


@dataclass(frozen=True)
class ScenarioSpec:
    name: str
    specialists: tuple[CapabilityProfile, ...]
    n_items: int = 30
    n_dims: int = 3
    ci_percent: float = 50
    alpha: float = 0.05

    def __post_init__(self):
        object.__setattr__(self, "specialists", tuple(self.specialists))
        if self.n_dims < 2:
            raise ValueError("n_dims must be at least 2")
        if self.n_items < 1:
            raise ValueError("n_items must be positive")
        if len(self.specialists) < 2:
            raise ValueError("a scenario needs at least two specialists")
        for prof in self.specialists:
            if len(prof.error_split) != self.n_dims - 1:
                raise ValueError(f"error_split length must be n_dims - 1 = {self.n_dims - 1}")
            if abs(sum(prof.probabilities) - 1) > _PROB_TOL:
                raise ValueError("capability probabilities must sum to 1")
        if not 50 <= self.ci_percent <= 100:
            raise ValueError("ci_percent must lie in [50, 100]")
        if not 0 < self.alpha < 1:
            raise ValueError("alpha must lie in (0, 1)")

    @property
    def n_specialists(self) -> int:
        return len(self.specialists)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["specialists"] = [
            {"p_correct": p.p_correct, "error_split": list(p.error_split)} for p in self.specialists
        ]
        return d

    @classmethod
    def from_dict(cls, data: dict) -> "ScenarioSpec":
        n_dims = int(data.get("n_dims", 3))
        if n_dims < 2:
            raise ValueError("n_dims must be at least 2")
        profiles = []
        for entry in data["specialists"]:
            if isinstance(entry, (int, float)):
                profiles.append(CapabilityProfile.symmetric(float(entry), n_dims))
            elif entry.get("error_split") is None:
                profiles.append(CapabilityProfile.symmetric(float(entry["p_correct"]), n_dims))
            else:
                profiles.append(CapabilityProfile(float(entry["p_correct"]), tuple(entry["error_split"])))
        return cls(
            name=str(data["name"]),
            specialists=tuple(profiles),
            n_items=int(data.get("n_items", 30)),
            n_dims=n_dims,
            ci_percent=data.get("ci_percent", 50),
            alpha=float(data.get("alpha", 0.05)),
        )


def load_scenario(path) -> ScenarioSpec:
    """Read a scenario JSON file (a single object, fields as in :class:`ScenarioSpec`)."""
    with open(path, encoding="utf-8") as fh:
        return ScenarioSpec.from_dict(json.load(fh))


@dataclass(frozen=True)
class PowerEstimate:
    scenario: str
    power: float
    mc_std_error: float
    mean_retained_items: float
    replicates: int
    seed: int
    rejections: int = 0
    row_alignment: str = RETAINED

    def to_dict(self) -> dict:
        return asdict(self)


def _scenario_arrays(spec: ScenarioSpec) -> tuple[np.ndarray, np.ndarray]:
    probs = np.array([p.probabilities for p in spec.specialists])
    cum = np.cumsum(probs, axis=1)[:, :-1]
    truth = np.arange(spec.n_items) % spec.n_dims
    return cum, truth


def _labels(spec: ScenarioSpec, u: np.ndarray) -> np.ndarray:
    """Map uniforms ``(B, m*s)`` to dimension codes ``(B, m, s)``."""
    cum, truth = _scenario_arrays(spec)
    m, s = spec.n_items, spec.n_specialists
    u = u.reshape(-1, m, s)
    offset = (u[..., None] >= cum[None, None, :, :]).sum(axis=-1)
    return (truth[None, :, None] + offset) % spec.n_dims


def simulate_judgements(spec: ScenarioSpec, seed: int, replicate: int = 0) -> JudgementMatrix:
    """One simulated judgement table; replicate ``r`` of :func:`estimate_power` with the same seed."""
    size = spec.n_items * spec.n_specialists
    u = rng.replicate_uniforms(seed, replicate, replicate + 1, size)
    codes = _labels(spec, u)[0]
    labels = [f"C{k + 1}" for k in range(spec.n_dims)]
    return JudgementMatrix(
        items=[str(l + 1) for l in range(spec.n_items)],
        specialists=[str(j + 1) for j in range(spec.n_specialists)],
        cells=[[labels[k] for k in row] for row in codes.tolist()],
        theoretical=[labels[k] for k in (np.arange(spec.n_items) % spec.n_dims)],
        dimensions=labels,
    )


def _w_tables(spec: ScenarioSpec, X: np.ndarray, row_alignment: str) -> tuple[np.ndarray, np.ndarray]:
    """Masked W tables ``(B, m, s)`` and the number of W rows per replicate."""
    n, s = spec.n_dims, spec.n_specialists
    c = _exact(spec.ci_percent)
    onehot = X[..., None] == np.arange(n)
    counts = onehot.sum(axis=2)
    top = counts.max(axis=-1)
    if row_alignment == RETAINED:
        unique = (counts == top[..., None]).sum(axis=-1) == 1
        keep = (100 * top * c.denominator >= c.numerator * s) & unique
        mode = counts.argmax(axis=-1)
    else:
        v = (100 * top * c.denominator > c.numerator * s).sum(axis=1)
        keep = np.arange(spec.n_items)[None, :] < v[:, None]
        # first specialist position naming each label; s when absent
        first = np.where(onehot.any(axis=2), onehot.argmax(axis=2), s)
        first = np.where(counts == top[..., None], first, s + 1)
        mode = first.argmin(axis=-1)
    W = (X == mode[..., None]) & keep[..., None]
    return W, keep.sum(axis=1)


def _power_block(spec: ScenarioSpec, seed: int, start: int, stop: int, row_alignment: str) -> tuple[int, int]:
    s = spec.n_specialists
    u = rng.replicate_uniforms(seed, start, stop, spec.n_items * s)
    X = _labels(spec, u)
    W, rows = _w_tables(spec, X, row_alignment)
    R = W.sum(axis=2, dtype=np.int64)
    D = W.sum(axis=1, dtype=np.int64)
    N = R.sum(axis=1)
    den = (R * (s - R)).sum(axis=1)
    sum_sq = (D * D).sum(axis=1)
    testable = (rows >= 2) & (den > 0)
    q = (s - 1) * (s * sum_sq[testable] - N[testable] ** 2) / den[testable]
    p = chi_square_sf_many(q, s - 1)
    return int((p < spec.alpha).sum()), int(rows.sum())


def estimate_power(
    spec: ScenarioSpec,
    replicates: int = 50_000,
    seed: int = 0,
    workers: int = 1,
    row_alignment: str = RETAINED,
) -> PowerEstimate:
    """Rejection rate of the asymptotic Q test over simulated panels.

    Counts are integers summed over fixed replicate blocks, so the
    estimate is identical for any ``workers``.
    """
    if replicates < 1000:
        raise ValueError("replicates must be at least 1000")
    if row_alignment not in ROW_ALIGNMENTS:
        raise ValueError(f"row_alignment must be one of {ROW_ALIGNMENTS}")
    tasks = [(spec, seed, a, b, row_alignment) for a, b in rng.blocks(replicates)]
    results = rng.map_blocks(_power_block, tasks, workers)
    rejections = sum(r for r, _ in results)
    retained = sum(k for _, k in results)
    power = rejections / replicates
    return PowerEstimate(
        scenario=spec.name,
        power=power,
        mc_std_error=math.sqrt(power * (1 - power) / replicates),
        mean_retained_items=retained / replicates,
        replicates=replicates,
        seed=seed,
        rejections=rejections,
        row_alignment=row_alignment,
    )


def _uniform(name: str, ps: Sequence[float]) -> ScenarioSpec:
    return ScenarioSpec(name=name, specialists=tuple(CapabilityProfile.symmetric(p) for p in ps))


def _skewed(name: str, p: float, s: int = 9) -> ScenarioSpec:
    # specialist j sends (0.25 + d_j, 0.75 - d_j) of its error mass to the two wrong dimensions
    deltas = np.linspace(-0.2, 0.2, s)
    profiles = tuple(CapabilityProfile(p, (0.25 + d, 0.75 - d)) for d in deltas.tolist())
    return ScenarioSpec(name=name, specialists=profiles)


def builtin_scenarios() -> list[ScenarioSpec]:
    """Ten reference scenarios: nine specialists, 30 items, three dimensions, CI 50%, alpha 0.05.

    Scenarios 1-8 use symmetric error splits.  Scenarios 9 and 10 give
    every specialist the same ``p_correct`` (0.9 and 0.6) but a different,
    asymmetric split of the error mass.
    """
    return [
        _uniform("scenario-1", [0.45] + [0.9] * 8),
        _uniform("scenario-2", [0.45] * 3 + [0.9] * 6),
        _uniform("scenario-3", [0.45, 0.35, 0.25] + [0.9] * 6),
        _uniform("scenario-4", [0.8] + [0.9] * 8),
        _uniform("scenario-5", [0.8] * 2 + [0.9] * 7),
        _uniform("scenario-6", [0.75] * 3 + [0.6] * 6),
        _uniform("scenario-7", [0.75] * 3 + [0.3] * 6),
        _uniform("scenario-8", [0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9]),
        _skewed("scenario-9", 0.9),
        _skewed("scenario-10", 0.6),
    ]


def builtin_scenario(name: str) -> ScenarioSpec:
    for spec in builtin_scenarios():
        if spec.name == name:
            return spec
    raise KeyError(f"unknown builtin scenario {name!r}")


def _binomial_tail(n: int, p: float, k: int) -> float:
    """``P(X >= k)`` for ``X ~ Binomial(n, p)``, summed term by term."""
    if k <= 0:
        return 1.0
    if k > n:
        return 0.0
    return math.fsum(math.comb(n, i) * p**i * (1 - p) ** (n - i) for i in range(k, n + 1))


def prop2_w_probability(p_correct: float, wrong_probs: Sequence[float], s: int, c: float) -> float:
    """Closed form for ``P(W = 1)`` under the homogeneity hypothesis.

    ``P(X >= f) p + sum_k P(X_k >= f) p_k`` with ``X ~ Bin(s-1, p)``,
    ``X_k ~ Bin(s-1, p_k)`` and ``f = floor(c s / 100)``.
    """
    wrong = [float(x) for x in wrong_probs]
    probs = [float(p_correct), *wrong]
    if any(not 0 <= x <= 1 for x in probs):
        raise ValueError("probabilities must lie in [0, 1]")
    if abs(math.fsum(probs) - 1) > _PROB_TOL:
        raise ValueError(f"p_correct and wrong_probs must sum to 1, got {math.fsum(probs)}")
    if s < 2:
        raise ValueError("s must be at least 2")
    f = math.floor(_exact(c) * s / 100)
    return math.fsum(_binomial_tail(s - 1, p, f) * p for p in probs)

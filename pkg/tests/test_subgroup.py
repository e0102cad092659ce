import math

import numpy as np
import pytest
from hypothesis import given, settings

from contentq.cochran import ASYMPTOTIC, EXACT, PermutationBudget
from contentq.condition import ConditionSpec
from contentq.judgements import JudgementMatrix
from contentq.pipeline import analyze
from contentq.subgroup import (
    analyze_subgroups,
    enumerate_subgroups,
    format_subgroup_csv,
    parse_subgroup_csv,
)

from conftest import judgement_codes


def test_enumeration_counts():
    assert len(enumerate_subgroups(9, 6, 8)) == sum(math.comb(9, k) for k in (6, 7, 8)) + 1 == 130
    assert len(enumerate_subgroups(9, 6, 8, include_full=False)) == 129
    assert enumerate_subgroups(9, 9, 9) == [tuple(range(9))]
    assert len(enumerate_subgroups(9, 6, 9)) == 130


def test_enumeration_order():
    subsets = enumerate_subgroups(7, 6, 6, include_full=False)
    assert subsets[0] == (0, 1, 2, 3, 4, 5)
    assert subsets == sorted(subsets)
    assert len(set(subsets)) == len(subsets)
    assert enumerate_subgroups(7, 6, 6)[-1] == tuple(range(7))


@pytest.mark.parametrize("args", [(9, 1, 5), (9, 7, 6), (9, 6, 10), (5, 6, 6)])
def test_enumeration_bounds(args):
    with pytest.raises(ValueError):
        enumerate_subgroups(*args)


def test_panel_search(panel):
    report = analyze_subgroups(panel)
    assert len(report) == 130
    assert sum(len(e.positions) == 9 for e in report.entries) == 1
    p = [e.p_value for e in report.entries]
    assert p == sorted(p, reverse=True)


def test_entries_match_standalone_runs(panel):
    report = analyze_subgroups(panel)
    rnd = np.random.default_rng(0)
    for k in rnd.choice(len(report), size=15, replace=False):
        e = report.entries[k]
        alone = analyze(panel.restrict(e.positions), method=ASYMPTOTIC)
        assert (e.q, e.p_value, e.n_retained, e.degenerate) == (
            alone.test.q, alone.test.p_value, alone.w.shape[0], alone.test.degenerate)
        assert e.specialists == tuple(panel.specialists[j] for j in e.positions)


def test_full_panel_entry_equals_analysis(panel):
    report = analyze_subgroups(panel)
    full = next(e for e in report.entries if len(e.positions) == 9)
    result = analyze(panel, method=ASYMPTOTIC)
    assert (full.q, full.p_value, full.n_retained) == (result.test.q, result.test.p_value, 24)


def test_retention_recomputed_per_subpanel(panel):
    # head-count oracle for the sub-panel: count of items whose unique modal label reaches half
    report = analyze_subgroups(panel, min_size=6, max_size=6, include_full=False)
    codes = panel.codes()
    for e in report.entries[:20]:
        sub = codes[:, list(e.positions)]
        counts = np.stack([(sub == k).sum(axis=1) for k in range(3)], axis=1)
        top = counts.max(axis=1)
        unique = (counts == top[:, None]).sum(axis=1) == 1
        assert e.n_retained == int(((2 * top >= 6) & unique).sum())


def test_identical_panel_degenerate_everywhere():
    m = JudgementMatrix.from_codes(np.array([[k % 3] * 8 for k in range(12)]), labels=["A", "B", "C"])
    report = analyze_subgroups(m)
    assert all(e.degenerate and e.p_value == 1.0 for e in report.entries)
    assert report.rejected() == []


def test_csv_round_trip_and_top(panel):
    report = analyze_subgroups(panel)
    rows = parse_subgroup_csv(format_subgroup_csv(report))
    assert len(rows) == 130
    for row, e in zip(rows, report.entries):
        assert row["specialists"] == e.specialists
        assert (row["q"], row["p_value"], row["n_retained"], row["degenerate"]) == (
            e.q, e.p_value, e.n_retained, e.degenerate)
    assert len(parse_subgroup_csv(format_subgroup_csv(report, top=10))) == 10


def test_deterministic_across_workers(panel):
    a = analyze_subgroups(panel)
    assert analyze_subgroups(panel, workers=3) == a
    assert format_subgroup_csv(a) == format_subgroup_csv(analyze_subgroups(panel))


def test_exact_method_on_small_subpanels():
    rnd = np.random.default_rng(3)
    m = JudgementMatrix.from_codes(rnd.integers(0, 2, size=(5, 7)), labels=["A", "B"])
    report = analyze_subgroups(m, method=EXACT, budget=PermutationBudget(exact_cutoff=10**9))
    assert {e.method for e in report.entries} <= {EXACT, "none"}


@settings(max_examples=25, deadline=None)
@given(judgement_codes(max_items=8, min_specialists=7, max_specialists=8))
def test_random_panels_match_standalone(data):
    codes, n = data
    m = JudgementMatrix.from_codes(codes, labels=[f"L{k}" for k in range(n)])
    report = analyze_subgroups(m, condition=ConditionSpec.concordance(60), min_size=6)
    for e in report.entries:
        alone = analyze(m.restrict(e.positions), ConditionSpec.concordance(60), method=ASYMPTOTIC)
        assert e.p_value == alone.test.p_value

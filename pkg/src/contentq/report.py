"""JSON objects and text rendering for analysis, subgroup and power results.

JSON keeps full float precision; text output rounds statistics to three
decimals.  Schemas for the JSON objects ship in ``contentq/schemas``.
"""

from __future__ import annotations

import csv
import io
import json
from importlib import resources
from typing import Sequence

from .cochran import QTestResult
from .judgements import JudgementMatrix, ValidationReport
from .pipeline import Analysis, theoretical_agreement
from .powersim import PowerEstimate
from .subgroup import SubgroupReport


def load_schema(name: str) -> dict:
    """Load a shipped schema: ``analysis``, ``subgroups`` or ``power``."""
    text = resources.files("contentq").joinpath("schemas", f"{name}.schema.json").read_text("utf-8")
    return json.loads(text)


def _condition_dict(analysis: Analysis) -> dict:
    c = analysis.condition
    return {"kind": c.kind, "ci_percent": c.ci_percent, "cvr_threshold": c.cvr_threshold}


def analysis_to_dict(matrix: JudgementMatrix, analysis: Analysis, validation: ValidationReport | None = None) -> dict:
    w = analysis.w
    agreement = theoretical_agreement(matrix, analysis.retention)
    return {
        "n_items": matrix.n_items,
        "n_specialists": matrix.n_specialists,
        "dimensions": list(matrix.dimensions),
        "condition": _condition_dict(analysis),
        "row_alignment": analysis.row_alignment,
        "retention": {
            "retained": [{"item": i, "dimension": d} for i, d in analysis.retention.retained],
            "excluded": [{"item": i, "reason": r} for i, r in analysis.retention.excluded],
        },
        "theoretical_agreement": None if matrix.theoretical is None else [
            {"item": i, "assigned": a, "theoretical": t, "agrees": ok} for i, a, t, ok in agreement
        ],
        "w": {
            "items": list(w.items),
            "specialists": list(w.specialists),
            "cells": w.cells.tolist(),
            "row_totals": w.row_totals.tolist(),
            "col_totals": w.col_totals.tolist(),
            "grand_total": w.grand_total,
        },
        "test": analysis.test.to_dict(),
        "alpha": analysis.alpha,
        "reject": analysis.reject,
        "decision": analysis.decision,
        "validation": None if validation is None else {
            "errors": [list(e) for e in validation.errors],
            "warnings": [list(e) for e in validation.warnings],
        },
    }


def subgroups_to_dict(report: SubgroupReport, top: int | None = None) -> dict:
    return {
        "alpha": report.alpha,
        "n_subsets": len(report),
        "n_rejected": len(report.rejected()),
        "entries": [e.to_dict() for e in report.entries[:top]],
    }


def power_to_dict(estimates: Sequence[PowerEstimate]) -> dict:
    return {"results": [e.to_dict() for e in estimates]}


def dumps(obj: dict) -> str:
    return json.dumps(obj, indent=2) + "\n"


def format_test(test: QTestResult) -> str:
    line = f"Cochran's Q = {test.q:.3f}, df = {test.df}, p = {test.p_value:.3f} ({test.method})"
    if test.mc_std_error is not None:
        line += f", MC s.e. = {test.mc_std_error:.3f}"
    if test.degenerate:
        line += " [degenerate: every W row unanimous]"
    return line


def render_analysis(matrix: JudgementMatrix, analysis: Analysis, validation: ValidationReport | None = None) -> str:
    out = []
    out.append(f"Judgements: {matrix.n_items} items x {matrix.n_specialists} specialists; "
               f"dimensions {', '.join(matrix.dimensions)}")
    out.append(f"Condition: {analysis.condition.describe()}")
    if validation is not None:
        for loc, msg in validation.warnings:
            out.append(f"warning: {loc}: {msg}")
    ret = analysis.retention
    out.append(f"Retained {len(ret.retained)} of {matrix.n_items} items")
    if ret.excluded:
        out.append("Excluded: " + ", ".join(f"{i} ({r})" for i, r in ret.excluded))
    agreement = theoretical_agreement(matrix, ret)
    if agreement:
        out.append("")
        out.append(f"{'item':>6}  {'assigned':>8}  {'theoretical':>11}")
        for item, assigned, theo, ok in agreement:
            out.append(f"{item:>6}  {assigned:>8}  {theo:>11}{'' if ok else '  *'}")
        agree = sum(ok for *_, ok in agreement)
        out.append(f"Assigned dimension matches the theoretical one for {agree} of {len(agreement)} items")
    out.append("")
    w = analysis.w
    if analysis.row_alignment != "retained":
        out.append(f"W rows: {analysis.row_alignment} alignment")
    totals = " ".join(f"{e}:{d}" for e, d in zip(w.specialists, w.col_totals.tolist()))
    out.append(f"W column totals: {totals}; N = {w.grand_total}")
    out.append(format_test(analysis.test))
    out.append(f"Decision at alpha = {analysis.alpha:g}: {analysis.decision}")
    return "\n".join(out) + "\n"


def render_subgroups(report: SubgroupReport, top: int | None = None) -> str:
    entries = report.entries[:top]
    width = max([len("(" + ",".join(e.specialists) + ")") for e in entries] + [11])
    out = [f"{len(report)} subgroups; H0 rejected at alpha = {report.alpha:g} for {len(report.rejected())}"]
    out.append(f"{'specialists':<{width}}  {'Q':>7}  {'p-value':>7}  {'items':>5}")
    for e in entries:
        ids = "(" + ",".join(e.specialists) + ")"
        out.append(f"{ids:<{width}}  {e.q:7.3f}  {e.p_value:7.3f}  {e.n_retained:5d}")
    return "\n".join(out) + "\n"


POWER_FIELDS = ("scenario", "power", "mc_std_error", "mean_retained", "replicates", "seed")


def format_power_csv(estimates: Sequence[PowerEstimate]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(POWER_FIELDS)
    for e in estimates:
        writer.writerow([e.scenario, repr(e.power), repr(e.mc_std_error), repr(e.mean_retained_items), e.replicates, e.seed])
    return buf.getvalue()


def render_power(estimates: Sequence[PowerEstimate]) -> str:
    out = [f"{'scenario':<12}  {'power':>6}  {'s.e.':>6}  {'items':>6}  {'reps':>7}  seed"]
    for e in estimates:
        out.append(f"{e.scenario:<12}  {e.power:6.4f}  {e.mc_std_error:6.4f}  {e.mean_retained_items:6.2f}  "
                   f"{e.replicates:7d}  {e.seed}")
    return "\n".join(out) + "\n"

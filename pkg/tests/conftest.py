import csv
from pathlib import Path

import numpy as np
import pytest
from hypothesis import strategies as st

from contentq.datasets import load_teaching_learning, teaching_learning_text

FIXTURES = Path(__file__).parent / "fixtures"

_CRITERIA: list[tuple[str, bool, str]] = []


@pytest.fixture
def record_criterion():
    """Record one acceptance line; printed in the terminal summary."""

    def record(name: str, passed: bool, detail: str = ""):
        _CRITERIA.append((name, bool(passed), detail))
        return passed

    return record


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for name, passed, detail in _CRITERIA:
        terminalreporter.write_line(f"{'PASS' if passed else 'FAIL'}  {name}  {detail}")


@pytest.fixture(scope="session")
def panel():
    return load_teaching_learning()


@pytest.fixture(scope="session")
def panel_csv():
    return teaching_learning_text()


@pytest.fixture(scope="session")
def reference_w():
    rows = list(csv.reader(open(FIXTURES / "reference_w.csv")))[1:]
    return np.array([[int(x) for x in r[1:]] for r in rows])


@pytest.fixture(scope="session")
def reference_subgroups():
    rows = list(csv.DictReader(open(FIXTURES / "reference_subgroups.csv")))
    return [(tuple(r["specialists"].split("+")), float(r["q"]), float(r["p_value"])) for r in rows]


@pytest.fixture(scope="session")
def reference_dimensions():
    rows = list(csv.DictReader(open(FIXTURES / "reference_dimensions.csv")))
    return {r["item"]: r["dimension"] for r in rows}


@st.composite
def binary_tables(draw, min_rows=1, max_rows=6, min_cols=2, max_cols=6):
    v = draw(st.integers(min_rows, max_rows))
    s = draw(st.integers(min_cols, max_cols))
    cells = draw(st.lists(st.lists(st.integers(0, 1), min_size=s, max_size=s), min_size=v, max_size=v))
    return np.array(cells, dtype=np.int64)


@st.composite
def judgement_codes(draw, max_items=12, min_specialists=3, max_specialists=9, max_dims=4):
    m = draw(st.integers(1, max_items))
    s = draw(st.integers(min_specialists, max_specialists))
    n = draw(st.integers(2, max_dims))
    cells = draw(st.lists(st.lists(st.integers(0, n - 1), min_size=s, max_size=s), min_size=m, max_size=m))
    return np.array(cells, dtype=np.int64), n

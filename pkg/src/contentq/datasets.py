"""Bundled judgement data."""

from importlib import resources

from .judgements import JudgementMatrix, parse_judgement_csv


def teaching_learning_text() -> str:
    """CSV text of the teaching-learning evaluation study: 30 items, 9 specialists, dimensions P/J/T."""
    return resources.files("contentq").joinpath("data", "teaching_learning.csv").read_text("utf-8")


def load_teaching_learning() -> JudgementMatrix:
    return parse_judgement_csv(teaching_learning_text())

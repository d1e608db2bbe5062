"""Shipped fixture projects."""

from pathlib import Path


def case_study_dir() -> Path:
    """Directory of the AIPL combination-product case-study project."""
    return Path(__file__).parent / "aipl"

"""Shared fixtures: canned replies, a small document corpus, and a replay
directory that lets the whole pipeline run offline."""

from __future__ import annotations

from pathlib import Path

import pytest

DATA_DIR = Path(__file__).parent / "data"


@pytest.fixture(scope="session")
def example_body() -> str:
    return (DATA_DIR / "example_body.txt").read_text(encoding="utf-8").strip()


@pytest.fixture(scope="session")
def timeline_reply() -> str:
    """The few-shot example table exactly as the timeline prompt shows it."""
    return (DATA_DIR / "timeline_reply.txt").read_text(encoding="utf-8")


@pytest.fixture(scope="session")
def demographics_reply() -> str:
    return (DATA_DIR / "demographics_reply.txt").read_text(encoding="utf-8")


@pytest.fixture(scope="session")
def diagnoses_reply() -> str:
    return (DATA_DIR / "diagnoses_reply.txt").read_text(encoding="utf-8")


def wrap_document(body: str) -> str:
    """Wrap a body in the section markers the corpus format uses."""
    return f"front matter\n==== Body\n{body}\n==== Refs\nreference list\n"


SINGLE_CASE_BODY = (
    "We describe a case report of a 57-year-old man admitted with fever. "
    "The fever resolved after treatment and he was discharged."
)
SERIES_BODY = (
    "This case presentation covers three patients; the first was a "
    "30 year old woman, the others were older."
)
NON_CASE_BODY = "A systematic review of sepsis outcomes in adults."


@pytest.fixture()
def corpus_dir(tmp_path: Path) -> Path:
    """Three documents: one single case, one series, one non-case."""
    directory = tmp_path / "corpus"
    directory.mkdir()
    (directory / "caseA.txt").write_text(
        wrap_document(SINGLE_CASE_BODY), encoding="utf-8"
    )
    (directory / "caseB.txt").write_text(wrap_document(SERIES_BODY), encoding="utf-8")
    (directory / "caseC.txt").write_text(
        wrap_document(NON_CASE_BODY), encoding="utf-8"
    )
    return directory


CASE_A_TIMELINE_REPLY = (
    "57 years old | 0\nfever | -48\nadmitted | 0\ntreatment | 2\n"
    "fever resolved | 30\ndischarged | 48\n"
)
CASE_A_DEMOGRAPHICS_REPLY = "57 | Male | Not Specified\n"
CASE_A_DIAGNOSES_REPLY = "fever\n"


@pytest.fixture()
def replay_dir(tmp_path: Path) -> Path:
    """Recorded replies for the corpus fixture; caseA is the accepted one."""
    directory = tmp_path / "replies"
    directory.mkdir()
    (directory / "caseA.case_count.txt").write_text("1\n", encoding="utf-8")
    (directory / "caseB.case_count.txt").write_text("3\n", encoding="utf-8")
    (directory / "caseA.timeline.txt").write_text(
        CASE_A_TIMELINE_REPLY, encoding="utf-8"
    )
    (directory / "caseA.demographics.txt").write_text(
        CASE_A_DEMOGRAPHICS_REPLY, encoding="utf-8"
    )
    (directory / "caseA.diagnoses.txt").write_text(
        CASE_A_DIAGNOSES_REPLY, encoding="utf-8"
    )
    return directory

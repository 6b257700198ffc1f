"""End-to-end extraction: render a prompt, query a backend, parse the reply.

Every extractor returns the parsed value together with the raw reply so the
caller can persist an audit trail and re-parse later without re-querying.
"""

from __future__ import annotations

from dataclasses import dataclass

from .corpus import (
    CaseDocument,
    DemographicsRecord,
    DiagnosisList,
    SkippedLine,
    TimelineAnnotation,
    parse_demographics,
    parse_diagnoses,
    parse_timeline,
)
from .llm import CompletionBackend, PromptTemplate, load_template


@dataclass(frozen=True)
class TimelineExtraction:
    """A parsed timeline plus its raw reply and skipped-line audit."""

    annotation: TimelineAnnotation
    raw_reply: str
    skipped: tuple[SkippedLine, ...]


@dataclass(frozen=True)
class DemographicsExtraction:
    record: DemographicsRecord
    raw_reply: str


@dataclass(frozen=True)
class DiagnosesExtraction:
    diagnoses: DiagnosisList
    raw_reply: str


def extract_timeline(
    doc: CaseDocument,
    backend: CompletionBackend,
    template: PromptTemplate | None = None,
) -> TimelineExtraction:
    """Extract a (event, time) timeline from one document.

    Args:
        doc: Document accepted by the corpus filter (or explicitly forced).
        backend: Completion backend.
        template: Timeline prompt; defaults to the shipped few-shot template.
            Ablation variants (no-role, zero-shot, and so on) are ordinary
            templates and run through the same path.

    Raises:
        LlmFailure: The backend failed.
        EmptyTimeline: The reply contained no parseable rows.
    """
    if template is None:
        template = load_template("timeline")
    reply = backend.complete(template.render(doc.body), case_id=doc.id, task="timeline")
    result = parse_timeline(reply, case_id=doc.id)
    return TimelineExtraction(
        annotation=result.annotation, raw_reply=reply, skipped=result.skipped
    )


def extract_demographics(
    doc: CaseDocument,
    backend: CompletionBackend,
    template: PromptTemplate | None = None,
) -> DemographicsExtraction:
    """Extract the age/sex/ethnicity row from one document.

    Raises:
        LlmFailure: The backend failed.
        MalformedDemographics: No row of the reply parsed.
    """
    if template is None:
        template = load_template("demographics")
    reply = backend.complete(
        template.render(doc.body), case_id=doc.id, task="demographics"
    )
    return DemographicsExtraction(record=parse_demographics(reply), raw_reply=reply)


def extract_diagnoses(
    doc: CaseDocument,
    backend: CompletionBackend,
    template: PromptTemplate | None = None,
) -> DiagnosesExtraction:
    """Extract the ordered diagnosis list from one document.

    Raises:
        LlmFailure: The backend failed.
        EmptyDiagnosisList: The reply contained no usable lines.
    """
    if template is None:
        template = load_template("diagnoses")
    reply = backend.complete(
        template.render(doc.body), case_id=doc.id, task="diagnoses"
    )
    return DiagnosesExtraction(
        diagnoses=parse_diagnoses(reply, case_id=doc.id), raw_reply=reply
    )

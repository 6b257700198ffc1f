"""Data types and parsers for case-report documents and timeline annotations.

A timeline annotation is an ordered list of (event, time) rows. Times are
relative hours: 0 is the admission/presentation anchor, negative values lie
before it, positive values after it. The on-disk format (".bsv") is one
``event | time`` row per line.

Usage:
    result = parse_timeline("fever | -72\\nrash | -72", case_id="PMC1")
    text = serialize_timeline(result.annotation)
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from decimal import Decimal
from pathlib import Path

from .errors import (
    EmptyDiagnosisList,
    EmptyTimeline,
    MalformedDemographics,
    MissingBodyMarker,
    MissingRefMarker,
)

NOT_SPECIFIED = "Not Specified"

# Document section markers. The closing marker is matched as a prefix so that
# "==== Refs" and "==== References" variants both terminate the body.
BODY_MARKER_RE = re.compile(r"^==== Body", re.MULTILINE)
REF_MARKER_RE = re.compile(r"^==== Ref", re.MULTILINE)

# A timestamp cell: plain integer or decimal, optional sign. Scientific
# notation is rejected on purpose; the extraction prompt asks for "a numeric
# value in hour unit".
TIME_RE = re.compile(r"^[+-]?(?:\d+(?:\.\d*)?|\.\d+)$")

# Reply chatter that is stripped silently: markdown code fences and
# table rule/alignment rows such as "|---|:---:|".
FENCE_RE = re.compile(r"^```\S*$")
TABLE_RULE_RE = re.compile(r"^[|\s:\-=]+$")

# Header rows some models prepend despite the prompt ("event | time").
HEADER_EVENT_CELLS = frozenset({"event", "events", "clinical event"})
HEADER_TIME_CELLS = frozenset(
    {"time", "timestamp", "time stamp", "time (hours)", "hours", "time_hours"}
)

# List decoration stripped from diagnosis lines: bullets and enumerations.
BULLET_RE = re.compile(r"^(?:[-*\u2022]\s+|\d+[.)]\s+)")


@dataclass(frozen=True)
class CaseDocument:
    """A case-report document body with its corpus identifier."""

    id: str
    body: str

    def __post_init__(self) -> None:
        if not self.id:
            raise ValueError("document id must be non-empty")


@dataclass(frozen=True)
class EventRecord:
    """One (event, time) row of a timeline.

    Attributes:
        event: Free-text clinical finding; non-empty and pipe-free.
        time_hours: Relative time in hours; must be finite.
    """

    event: str
    time_hours: float

    def __post_init__(self) -> None:
        object.__setattr__(self, "event", self.event.strip())
        object.__setattr__(self, "time_hours", float(self.time_hours))
        if not self.event:
            raise ValueError("event text must be non-empty")
        if "|" in self.event:
            raise ValueError("event text must not contain a pipe")
        if not math.isfinite(self.time_hours):
            raise ValueError("event time must be finite")


@dataclass(frozen=True)
class TimelineAnnotation:
    """An ordered timeline for one case; source order is preserved."""

    case_id: str
    events: tuple[EventRecord, ...] = ()

    def __len__(self) -> int:
        return len(self.events)

    def times(self) -> list[float]:
        return [e.time_hours for e in self.events]

    def texts(self) -> list[str]:
        return [e.event for e in self.events]


@dataclass(frozen=True)
class DemographicsRecord:
    """Parsed demographics: age in years (absent allowed), sex, ethnicity."""

    age_years: float | None
    sex: str
    ethnicity: str

    def __post_init__(self) -> None:
        if self.age_years is not None and not self.age_years >= 0:
            raise ValueError("age_years must be >= 0 when present")


@dataclass(frozen=True)
class DiagnosisList:
    """Ordered diagnoses for one case; the primary diagnosis comes first."""

    case_id: str
    diagnoses: tuple[str, ...]

    def __post_init__(self) -> None:
        if any(not d.strip() for d in self.diagnoses):
            raise ValueError("diagnoses must be non-empty strings")


@dataclass(frozen=True)
class SkippedLine:
    """A reply line that looked like data but did not parse."""

    line_no: int
    text: str
    reason: str


@dataclass(frozen=True)
class TimelineParseResult:
    """A parsed timeline plus the lines that were skipped and counted."""

    annotation: TimelineAnnotation
    skipped: tuple[SkippedLine, ...] = field(default=())


def extract_body(raw_document: str) -> str:
    """Return the text between the ``==== Body`` and ``==== Ref`` markers.

    The span starts after the body-marker line and ends at the first
    subsequent line starting with ``==== Ref``; surrounding whitespace is
    trimmed.

    Raises:
        MissingBodyMarker: No line-initial ``==== Body`` in the document.
        MissingRefMarker: No subsequent line-initial ``==== Ref`` marker.
    """
    body_match = BODY_MARKER_RE.search(raw_document)
    if body_match is None:
        raise MissingBodyMarker("document has no '==== Body' marker line")
    ref_match = REF_MARKER_RE.search(raw_document, body_match.end())
    if ref_match is None:
        raise MissingRefMarker("no '==== Ref' marker after the body marker")
    newline = raw_document.find("\n", body_match.end(), ref_match.start())
    start = body_match.end() if newline < 0 else newline + 1
    return raw_document[start : ref_match.start()].strip()


def load_document(path: str | Path) -> CaseDocument:
    """Read a marker-delimited document file; the file stem is the case id."""
    path = Path(path)
    raw = path.read_text(encoding="utf-8")
    return CaseDocument(id=path.stem, body=extract_body(raw))


def _split_row(line: str) -> tuple[str, str]:
    """Split a data row at its last pipe into (event cell, time cell)."""
    head, _, tail = line.rpartition("|")
    return head.strip(), tail.strip()


def _is_header_row(event_cell: str, time_cell: str) -> bool:
    return (
        event_cell.lower() in HEADER_EVENT_CELLS
        and time_cell.lower() in HEADER_TIME_CELLS
    )


def parse_timeline(text: str, case_id: str = "") -> TimelineParseResult:
    """Parse ``event | time`` rows out of an LLM reply or annotation file.

    Each line of the form ``<event> | <number>`` becomes an EventRecord; the
    event cell is everything before the last pipe (trimmed), so stray pipes
    inside the time column are impossible by construction. Blank lines,
    markdown fences, table rules, and header rows are stripped silently.
    Plain-prose lines without a pipe are treated as chatter while they appear
    before the first data row; after it they are counted as skipped. Rows
    whose cells do not parse are always counted as skipped.

    Args:
        text: Raw reply or annotation file body.
        case_id: Identifier attached to the resulting annotation.

    Returns:
        TimelineParseResult with the annotation and the skipped lines.

    Raises:
        EmptyTimeline: No line parsed; the extraction failed.
    """
    events: list[EventRecord] = []
    skipped: list[SkippedLine] = []
    for line_no, raw_line in enumerate(text.split("\n"), start=1):
        line = raw_line.strip()
        if not line:
            continue
        if FENCE_RE.match(line) or TABLE_RULE_RE.match(line):
            continue
        if "|" not in line:
            if events:
                skipped.append(SkippedLine(line_no, raw_line, "no pipe separator"))
            continue
        event_cell, time_cell = _split_row(line)
        if _is_header_row(event_cell, time_cell):
            continue
        if not event_cell:
            skipped.append(SkippedLine(line_no, raw_line, "empty event cell"))
            continue
        if "|" in event_cell:
            skipped.append(SkippedLine(line_no, raw_line, "extra pipe in event cell"))
            continue
        if not TIME_RE.match(time_cell):
            skipped.append(SkippedLine(line_no, raw_line, "unparseable time"))
            continue
        time_hours = float(time_cell)
        if not math.isfinite(time_hours):
            skipped.append(SkippedLine(line_no, raw_line, "non-finite time"))
            continue
        events.append(EventRecord(event_cell, time_hours))
    if not events:
        label = f" for case {case_id!r}" if case_id else ""
        raise EmptyTimeline(f"no timeline rows parsed{label}")
    return TimelineParseResult(
        annotation=TimelineAnnotation(case_id=case_id, events=tuple(events)),
        skipped=tuple(skipped),
    )


def format_time(value: float) -> str:
    """Render an hour value without trailing zeros or scientific notation.

    Integral values print as integers; other values print with the shortest
    decimal digits that round-trip, expanded to plain notation so the result
    stays parseable by the timestamp grammar.
    """
    if value.is_integer():
        return str(int(value))
    text = repr(value)
    if "e" in text or "E" in text:
        text = format(Decimal(text), "f")
    return text


def serialize_timeline(annotation: TimelineAnnotation) -> str:
    """Render a timeline as ``event | time`` lines.

    The output parses back to an identical annotation:
    ``parse_timeline(serialize_timeline(t)).annotation`` equals ``t`` for any
    valid input (up to the case id supplied at parse time).
    """
    return "\n".join(
        f"{e.event} | {format_time(e.time_hours)}" for e in annotation.events
    )


def to_context_string(annotation: TimelineAnnotation) -> str:
    """Flatten a timeline to ``(t1) e1 [SEP] (t2) e2 [SEP] ...``.

    An empty timeline yields an empty string.
    """
    return " ".join(
        f"({format_time(e.time_hours)}) {e.event} [SEP]" for e in annotation.events
    )


def _parse_age_cell(cell: str) -> float | None | object:
    """Return the age, None for 'Not Specified', or _INVALID on failure."""
    if cell.lower() == NOT_SPECIFIED.lower():
        return None
    try:
        age = float(cell)
    except ValueError:
        return _INVALID
    if not math.isfinite(age) or age < 0:
        return _INVALID
    return age


_INVALID = object()


def _canonical_category(cell: str) -> str:
    """Map a sex/ethnicity cell to its canonical spelling, keeping customs."""
    lowered = cell.lower()
    if lowered == "male":
        return "Male"
    if lowered == "female":
        return "Female"
    if lowered == NOT_SPECIFIED.lower():
        return NOT_SPECIFIED
    return cell


def parse_demographics(text: str) -> DemographicsRecord:
    """Parse the first ``age | sex | ethnicity`` row of a reply.

    The age cell accepts a non-negative number or "Not Specified" (absent
    age). Sex and ethnicity cells must be non-empty; the spellings Male,
    Female, and Not Specified are canonicalized case-insensitively and any
    other value is kept verbatim as a custom category.

    Raises:
        MalformedDemographics: No line of the reply parses as such a row.
    """
    for raw_line in text.split("\n"):
        line = raw_line.strip()
        if not line:
            continue
        cells = [c.strip() for c in line.split("|")]
        if len(cells) != 3:
            continue
        age = _parse_age_cell(cells[0])
        if age is _INVALID or not cells[1] or not cells[2]:
            continue
        return DemographicsRecord(
            age_years=age,
            sex=_canonical_category(cells[1]),
            ethnicity=_canonical_category(cells[2]),
        )
    raise MalformedDemographics("no 'age | sex | ethnicity' row found in reply")


def serialize_demographics(record: DemographicsRecord) -> str:
    """Render a demographics record as a single ``age | sex | ethnicity`` row."""
    age = NOT_SPECIFIED if record.age_years is None else format_time(record.age_years)
    return f"{age} | {record.sex} | {record.ethnicity}"


def parse_diagnoses(text: str, case_id: str = "") -> DiagnosisList:
    """Parse a one-diagnosis-per-line reply, stripping list chatter.

    Markdown fences, table rules, preamble lines ending in a colon, and
    leading bullet/enumeration markers are removed; remaining non-empty lines
    become diagnoses in source order. The stripped patterns are a documented
    superset of observed reply chatter.

    Raises:
        EmptyDiagnosisList: Nothing remains after stripping.
    """
    diagnoses: list[str] = []
    for raw_line in text.split("\n"):
        line = raw_line.strip()
        if not line:
            continue
        if FENCE_RE.match(line) or TABLE_RULE_RE.match(line):
            continue
        if line.endswith(":"):
            continue
        line = BULLET_RE.sub("", line).strip()
        if line:
            diagnoses.append(line)
    if not diagnoses:
        label = f" for case {case_id!r}" if case_id else ""
        raise EmptyDiagnosisList(f"no diagnoses parsed{label}")
    return DiagnosisList(case_id=case_id, diagnoses=tuple(diagnoses))

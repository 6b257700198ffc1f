"""Two-stage case-report identification and classification-quality metrics.

Stage one is a cheap regex screen; stage two asks an LLM how many case
reports a document contains and accepts exactly the single-case documents.
Documents whose count cannot be obtained are undecided: they are excluded
from the accepted set and listed separately, never silently accepted.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .corpus import CaseDocument
from .errors import LlmFailure, UnparseableReply
from .llm import CompletionBackend, PromptTemplate, load_template

CASE_PHRASE_RE = re.compile(r"case report|case presenta", re.IGNORECASE)
AGE_PHRASE_RE = re.compile(r"year-? ?old", re.IGNORECASE)

BARE_INTEGER_RE = re.compile(r"^\s*[+-]?\d+\s*$")
FIRST_INTEGER_RE = re.compile(r"-?\d+")


@dataclass(frozen=True)
class CaseCountResult:
    """A parsed case-count reply.

    Attributes:
        count: The integer the model reported.
        lenient: True when the reply was not a bare integer and the count
            was recovered from the first integer token.
        reply: The raw reply text, kept for audit output.
    """

    count: int
    lenient: bool
    reply: str


@dataclass(frozen=True)
class FilterDecision:
    """Outcome of both filter stages for one document.

    ``accepted`` implies ``passed_regex`` and ``llm_case_count == 1``.
    ``llm_case_count`` is None when the second stage did not run or failed;
    if it failed, ``error`` carries the reason and the document counts as
    undecided rather than rejected.
    """

    case_id: str
    passed_regex: bool
    llm_case_count: int | None
    accepted: bool
    lenient_parse: bool = False
    error: str | None = None

    @property
    def undecided(self) -> bool:
        return self.passed_regex and self.llm_case_count is None

    def __post_init__(self) -> None:
        if self.accepted and not (self.passed_regex and self.llm_case_count == 1):
            raise ValueError("accepted requires passed_regex and a count of 1")


@dataclass(frozen=True)
class ConfusionCounts:
    """Binary-classification confusion counts."""

    tp: int
    fp: int
    tn: int
    fn: int

    def __post_init__(self) -> None:
        for name in ("tp", "fp", "tn", "fn"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be non-negative")

    @property
    def total(self) -> int:
        return self.tp + self.fp + self.tn + self.fn


@dataclass(frozen=True)
class ClassificationMetrics:
    """Precision/recall/accuracy/F1; None marks an undefined metric."""

    precision: float | None
    recall: float | None
    accuracy: float | None
    f1: float | None


def regex_screen(body: str, case_sensitive: bool = False) -> bool:
    """Return True iff the body mentions a case report and a patient age.

    Both patterns must match: ``case report|case presenta`` and
    ``year-? ?old``. Matching is case-insensitive by default; pass
    ``case_sensitive=True`` for the literal lowercase patterns.
    """
    if case_sensitive:
        return (
            re.search(CASE_PHRASE_RE.pattern, body) is not None
            and re.search(AGE_PHRASE_RE.pattern, body) is not None
        )
    return CASE_PHRASE_RE.search(body) is not None and AGE_PHRASE_RE.search(body) is not None


def parse_case_count_reply(reply: str, strict: bool = False) -> tuple[int, bool]:
    """Read the case count out of a reply.

    A bare integer (optionally padded with whitespace) parses exactly. Any
    other reply is scanned for its first integer token and flagged as
    lenient, unless ``strict`` is set.

    Returns:
        (count, lenient) where lenient is True for non-bare replies.

    Raises:
        UnparseableReply: No integer found, or a non-bare reply in strict
            mode.
    """
    if BARE_INTEGER_RE.match(reply):
        return int(reply), False
    if strict:
        raise UnparseableReply(f"reply is not a bare integer: {reply!r:.80}")
    match = FIRST_INTEGER_RE.search(reply)
    if match is None:
        raise UnparseableReply(f"no integer in reply: {reply!r:.80}")
    return int(match.group()), True


def llm_case_count(
    doc: CaseDocument,
    client: CompletionBackend,
    template: PromptTemplate | None = None,
    strict: bool = False,
) -> CaseCountResult:
    """Ask the backend how many case reports the document contains.

    Args:
        doc: Document with a non-empty body.
        client: Completion backend.
        template: Prompt template; defaults to the shipped case-count prompt.
        strict: Reject replies that are not a bare integer.

    Raises:
        LlmFailure: The backend failed after its retries.
        UnparseableReply: The reply contained no usable integer.
    """
    if template is None:
        template = load_template("case_count")
    reply = client.complete(
        template.render(doc.body), case_id=doc.id, task="case_count"
    )
    count, lenient = parse_case_count_reply(reply, strict=strict)
    return CaseCountResult(count=count, lenient=lenient, reply=reply)


def filter_document(
    doc: CaseDocument,
    client: CompletionBackend | None,
    case_sensitive: bool = False,
    strict: bool = False,
    template: PromptTemplate | None = None,
) -> FilterDecision:
    """Run both filter stages on one document; never raises.

    Backend failures and unparseable replies are folded into the decision
    as an undecided outcome with the error message attached. If ``client``
    is None only the regex stage runs and every regex-passing document is
    undecided.
    """
    if not regex_screen(doc.body, case_sensitive=case_sensitive):
        return FilterDecision(doc.id, False, None, False)
    if client is None:
        return FilterDecision(doc.id, True, None, False, error="no backend configured")
    try:
        result = llm_case_count(doc, client, template=template, strict=strict)
    except (LlmFailure, UnparseableReply) as exc:
        return FilterDecision(doc.id, True, None, False, error=str(exc))
    return FilterDecision(
        case_id=doc.id,
        passed_regex=True,
        llm_case_count=result.count,
        accepted=result.count == 1,
        lenient_parse=result.lenient,
    )


def _ratio(numerator: int, denominator: int) -> float | None:
    return numerator / denominator if denominator else None


def classification_metrics(counts: ConfusionCounts) -> ClassificationMetrics:
    """Compute precision, recall, accuracy, and F1 from confusion counts.

    Any metric with a zero denominator is reported as None rather than
    raised, so degenerate benchmark slices stay visible in reports.
    """
    precision = _ratio(counts.tp, counts.tp + counts.fp)
    recall = _ratio(counts.tp, counts.tp + counts.fn)
    accuracy = _ratio(counts.tp + counts.tn, counts.total)
    if precision is None or recall is None or precision + recall == 0:
        f1 = None
    else:
        f1 = 2 * precision * recall / (precision + recall)
    return ClassificationMetrics(
        precision=precision, recall=recall, accuracy=accuracy, f1=f1
    )

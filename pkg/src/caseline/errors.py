"""Exception types shared across the package."""


class CaselineError(Exception):
    """Base class for all package-specific errors."""


class MissingBodyMarker(CaselineError):
    """Raised when a document has no line-initial ``==== Body`` marker."""


class MissingRefMarker(CaselineError):
    """Raised when no ``==== Ref`` marker follows the body marker."""


class EmptyTimeline(CaselineError):
    """Raised when zero timeline rows parse; signals a failed extraction."""


class MalformedDemographics(CaselineError):
    """Raised when no ``age | sex | ethnicity`` row parses from a reply."""


class EmptyDiagnosisList(CaselineError):
    """Raised when a diagnosis reply contains no usable lines."""


class InvalidTemplate(CaselineError):
    """Raised when a prompt template does not contain exactly one body slot."""


class LlmFailure(CaselineError):
    """Raised when a completion backend fails after exhausting retries."""


class UnparseableReply(CaselineError):
    """Raised when no integer can be read from a case-count reply."""


class EmptyReference(CaselineError):
    """Raised when a match rate is requested against an empty reference."""


class UndefinedCdf(CaselineError):
    """Raised when the log-time CDF is evaluated on an empty set."""


class UndefinedAultc(CaselineError):
    """Raised when the AULTC is requested for an empty discrepancy set."""


class BackendUnavailable(CaselineError):
    """Raised when the embedding service cannot be reached or replies badly."""

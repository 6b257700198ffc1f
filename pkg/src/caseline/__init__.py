"""Clinical case-report timelines: extraction, alignment, and temporal metrics.

The package turns narrative case reports into (event, time-in-hours) rows via
prompt-driven LLM extraction, and scores predicted timelines against reference
annotations with event matching, a concordance index, and the area under the
log-time CDF.
"""

__version__ = "0.1.0"

from .errors import (
    BackendUnavailable,
    CaselineError,
    EmptyDiagnosisList,
    EmptyReference,
    EmptyTimeline,
    InvalidTemplate,
    LlmFailure,
    MalformedDemographics,
    MissingBodyMarker,
    MissingRefMarker,
    UndefinedAultc,
    UndefinedCdf,
    UnparseableReply,
)

__all__ = [
    "__version__",
    "BackendUnavailable",
    "CaselineError",
    "EmptyDiagnosisList",
    "EmptyReference",
    "EmptyTimeline",
    "InvalidTemplate",
    "LlmFailure",
    "MalformedDemographics",
    "MissingBodyMarker",
    "MissingRefMarker",
    "UndefinedAultc",
    "UndefinedCdf",
    "UnparseableReply",
]

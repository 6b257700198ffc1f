"""Temporal evaluation metrics over matched event pairs.

Covers the concordance index (ordering agreement between reference and
predicted times), the log-time discrepancy and its empirical CDF, the area
under that CDF (AULTC), stratified discrepancy summaries, and the match
threshold sweep.

The AULTC normalizes the log-time CDF area to [0, 1]: with
L = log(1 + s_max) and the discrepancies x_i = log(1 + min(|Δt|, s_max)),

    AULTC = (1/L) ∫₀^L F(x) dx = (1/(k·L)) Σ_i max(L − x_i, 0).

1 means every timestamp is exact; 0 means every discrepancy reaches the
cutoff. Hours are the fixed unit, and s_max is carried on every result
because the score is only comparable at equal cutoffs.
"""

from __future__ import annotations

import math
import statistics
from bisect import bisect_right
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .alignment import MatchedPair, apply_threshold
from .errors import UndefinedAultc, UndefinedCdf

DEFAULT_S_MAX = 8760.0
DEFAULT_TAUS = tuple(round(i / 100, 2) for i in range(1, 26))

STRATUM_LABELS = ("presentation", "hour", "day", "week", "year", "beyond")


@dataclass(frozen=True)
class StratumBounds:
    """Upper bounds (in hours, on |t_ref|) of the reference-time buckets.

    The first bound is 0 and holds exactly the t_ref = 0 events (the
    presentation anchor); each later bucket takes the events with
    previous < |t_ref| ≤ bound; the final bound is +inf, so the buckets
    partition the whole axis.
    """

    bounds: tuple[float, ...] = (0.0, 1.0, 24.0, 168.0, 8760.0, math.inf)
    labels: tuple[str, ...] = STRATUM_LABELS

    def __post_init__(self) -> None:
        if len(self.bounds) != len(self.labels):
            raise ValueError("bounds and labels must have equal length")
        if len(self.bounds) < 2 or self.bounds[0] != 0 or self.bounds[-1] != math.inf:
            raise ValueError("bounds must run from 0 to +inf")
        if any(a >= b for a, b in zip(self.bounds, self.bounds[1:])):
            raise ValueError("bounds must be strictly increasing")

    def stratum_of(self, t_ref: float) -> str:
        """The label of the bucket holding a reference time."""
        if t_ref == 0:
            return self.labels[0]
        magnitude = abs(t_ref)
        for bound, label in zip(self.bounds[1:], self.labels[1:]):
            if magnitude <= bound:
                return label
        raise AssertionError("unreachable: final bound is +inf")


DEFAULT_STRATUM_BOUNDS = StratumBounds()


@dataclass(frozen=True)
class DiscrepancySet:
    """Sorted log-time discrepancies x_i = log(1 + min(|Δt|, s_max)).

    Attributes:
        values: Non-decreasing discrepancies, each in [0, log(1 + s_max)].
        s_max: The cutoff in hours; the unit is always hours.
    """

    values: tuple[float, ...]
    s_max: float

    def __post_init__(self) -> None:
        if not self.s_max > 0:
            raise ValueError("s_max must be > 0")
        limit = math.log1p(self.s_max)
        if any(a > b for a, b in zip(self.values, self.values[1:])):
            raise ValueError("values must be sorted non-decreasing")
        if self.values and (self.values[0] < 0 or self.values[-1] > limit):
            raise ValueError("values must lie in [0, log(1 + s_max)]")

    @property
    def k(self) -> int:
        return len(self.values)


def log_time_loss(t_pred: float, t_ref: float, s_max: float = DEFAULT_S_MAX) -> float:
    """Natural-log time loss log(1 + min(|t_pred − t_ref|, s_max))."""
    if not s_max > 0:
        raise ValueError("s_max must be > 0")
    return math.log1p(min(abs(t_pred - t_ref), s_max))


def build_discrepancies(
    matched: Sequence[MatchedPair], s_max: float = DEFAULT_S_MAX
) -> DiscrepancySet:
    """Collect the per-pair log-time discrepancies, sorted ascending.

    An empty input yields a k = 0 set; downstream CDF/AULTC evaluation on
    such a set is an error, so degenerate cases surface explicitly.
    """
    values = sorted(log_time_loss(p.t_pred, p.t_ref, s_max) for p in matched)
    return DiscrepancySet(values=tuple(values), s_max=s_max)


def ltcdf(d: DiscrepancySet, x: float) -> float:
    """The empirical CDF of the discrepancies at x (right-continuous).

    Raises:
        UndefinedCdf: The set is empty.
    """
    if d.k == 0:
        raise UndefinedCdf("the log-time CDF of an empty set is undefined")
    return bisect_right(d.values, x) / d.k


def aultc(d: DiscrepancySet) -> float:
    """Area under the log-time CDF over [0, L], normalized by L.

    Computed in closed form: each discrepancy x_i contributes its headroom
    L − x_i to the area, so discrepancies clipped at the cutoff contribute
    exactly zero and the score hits both stated endpoints (all-zero → 1,
    all-clipped → 0).

    Raises:
        UndefinedAultc: The set is empty.
    """
    if d.k == 0:
        raise UndefinedAultc("AULTC of an empty discrepancy set is undefined")
    limit = math.log1p(d.s_max)
    area = math.fsum(max(limit - v, 0.0) for v in d.values)
    return area / (d.k * limit)


def concordance_counts(
    t_ref: Sequence[float], t_pred: Sequence[float]
) -> tuple[int, int]:
    """Concordant and comparable pair counts over all index pairs i < j.

    A pair is comparable when both the reference times and the predicted
    times differ; it is concordant when the two differences share a sign.

    Returns:
        (concordant, comparable).
    """
    ref = np.asarray(t_ref, dtype=float)
    pred = np.asarray(t_pred, dtype=float)
    if ref.shape != pred.shape:
        raise ValueError("t_ref and t_pred must have equal length")
    if ref.size < 2:
        return 0, 0
    rows, cols = np.triu_indices(ref.size, k=1)
    d_ref = ref[rows] - ref[cols]
    d_pred = pred[rows] - pred[cols]
    comparable = (d_ref != 0) & (d_pred != 0)
    concordant = comparable & ((d_ref > 0) == (d_pred > 0))
    return int(np.count_nonzero(concordant)), int(np.count_nonzero(comparable))


def concordance_index(pairs: Sequence[MatchedPair]) -> float | None:
    """Fraction of comparable matched pairs ordered the same way by both
    timelines; None when no pair is comparable."""
    concordant, comparable = concordance_counts(
        [p.t_ref for p in pairs], [p.t_pred for p in pairs]
    )
    if comparable == 0:
        return None
    return concordant / comparable


@dataclass(frozen=True)
class StratumSummary:
    """Discrepancy statistics for one reference-time bucket."""

    stratum: str
    n: int
    discrepancies: DiscrepancySet
    aultc: float | None
    median_log_discrepancy: float | None


def stratified_discrepancy(
    matched: Sequence[MatchedPair],
    bounds: StratumBounds = DEFAULT_STRATUM_BOUNDS,
    s_max: float = DEFAULT_S_MAX,
) -> list[StratumSummary]:
    """Bucket matched pairs by |t_ref| and summarize each bucket.

    Every pair lands in exactly one bucket. All buckets appear in the
    result, empty ones with n = 0 and undefined statistics, so report
    shapes stay constant across cases.
    """
    grouped: dict[str, list[MatchedPair]] = {label: [] for label in bounds.labels}
    for pair in matched:
        grouped[bounds.stratum_of(pair.t_ref)].append(pair)
    summaries = []
    for label in bounds.labels:
        bucket = grouped[label]
        d = build_discrepancies(bucket, s_max)
        summaries.append(
            StratumSummary(
                stratum=label,
                n=d.k,
                discrepancies=d,
                aultc=aultc(d) if d.k else None,
                median_log_discrepancy=statistics.median(d.values) if d.k else None,
            )
        )
    return summaries


@dataclass(frozen=True)
class SweepPoint:
    """Metrics at one value of the match threshold."""

    tau: float
    match_rate: float
    c_index: float | None
    aultc: float | None


def threshold_sweep(
    pairs: Sequence[MatchedPair],
    ref_size: int,
    taus: Sequence[float] = DEFAULT_TAUS,
    s_max: float = DEFAULT_S_MAX,
) -> list[SweepPoint]:
    """Evaluate match rate, c-index, and AULTC at each threshold.

    Args:
        pairs: Output of best_match.
        ref_size: Reference event count (match-rate denominator).
        taus: Thresholds to evaluate; defaults to 0.01..0.25 in 0.01 steps.
        s_max: Discrepancy cutoff in hours.

    Raises:
        ValueError: Empty tau grid.
        EmptyReference: ``ref_size`` is 0.
    """
    if not taus:
        raise ValueError("taus must be non-empty")
    points = []
    for tau in taus:
        result = apply_threshold(pairs, tau, ref_size)
        d = build_discrepancies(result.matched, s_max)
        points.append(
            SweepPoint(
                tau=tau,
                match_rate=result.match_rate,
                c_index=concordance_index(result.matched),
                aultc=aultc(d) if d.k else None,
            )
        )
    return points

"""Per-case evaluation and corpus-level aggregation of timeline metrics.

A case evaluation aligns one predicted timeline against its reference,
applies the match threshold, and computes the three headline metrics plus
the stratified breakdown. The aggregate pools matched pairs across cases in
sorted case order, so corpus reports are byte-stable across reruns.
"""

from __future__ import annotations

import statistics
from dataclasses import dataclass
from typing import Sequence

from .alignment import DistanceMetric, MatchedPair, apply_threshold, best_match
from .corpus import TimelineAnnotation
from .temporal import (
    DEFAULT_S_MAX,
    DEFAULT_STRATUM_BOUNDS,
    DEFAULT_TAUS,
    StratumBounds,
    StratumSummary,
    aultc,
    build_discrepancies,
    concordance_counts,
    concordance_index,
    stratified_discrepancy,
)

DEFAULT_TAU = 0.1


@dataclass(frozen=True)
class CaseEvaluation:
    """Alignment and metrics for one (reference, predicted) timeline pair."""

    case_id: str
    n_ref: int
    n_pred: int
    n_matched: int
    match_rate: float
    c_index: float | None
    aultc: float | None
    s_max: float
    strata: tuple[StratumSummary, ...]
    pairs: tuple[MatchedPair, ...]
    matched: tuple[MatchedPair, ...]


def evaluate_case(
    ref: TimelineAnnotation,
    pred: TimelineAnnotation,
    metric: DistanceMetric,
    tau: float = DEFAULT_TAU,
    s_max: float = DEFAULT_S_MAX,
    bounds: StratumBounds = DEFAULT_STRATUM_BOUNDS,
) -> CaseEvaluation:
    """Align, threshold, and score one case.

    Raises:
        EmptyReference: The reference timeline has no events.
    """
    pairs = tuple(best_match(ref, pred, metric))
    result = apply_threshold(pairs, tau, len(ref))
    matched = result.matched
    d = build_discrepancies(matched, s_max)
    return CaseEvaluation(
        case_id=ref.case_id or pred.case_id,
        n_ref=len(ref),
        n_pred=len(pred),
        n_matched=len(matched),
        match_rate=result.match_rate,
        c_index=concordance_index(matched),
        aultc=aultc(d) if d.k else None,
        s_max=s_max,
        strata=tuple(stratified_discrepancy(matched, bounds, s_max)),
        pairs=pairs,
        matched=matched,
    )


def case_report(case: CaseEvaluation) -> dict:
    """The JSON-shaped per-case report."""
    return {
        "case_id": case.case_id,
        "n_ref": case.n_ref,
        "n_pred": case.n_pred,
        "n_matched": case.n_matched,
        "match_rate": case.match_rate,
        "c_index": case.c_index,
        "aultc": case.aultc,
        "s_max": case.s_max,
        "strata": [
            {
                "stratum": s.stratum,
                "n": s.n,
                "aultc": s.aultc,
                "median_log_discrepancy": s.median_log_discrepancy,
            }
            for s in case.strata
        ],
    }


def _median(values: list[float]) -> float | None:
    return statistics.median(values) if values else None


def _mean(values: list[float]) -> float | None:
    return statistics.fmean(values) if values else None


def _summary(values: list[float | None]) -> dict:
    defined = [v for v in values if v is not None]
    return {
        "median": _median(defined),
        "mean": _mean(defined),
        "n_undefined": len(values) - len(defined),
    }


def cdf_points(values: Sequence[float]) -> list[tuple[float, float]]:
    """Step points (x, F(x)) of the empirical CDF at each distinct value."""
    ordered = sorted(values)
    k = len(ordered)
    points = []
    for i, x in enumerate(ordered, start=1):
        if i == k or ordered[i] != x:
            points.append((x, i / k))
    return points


def _pooled_concordance(cases: Sequence[CaseEvaluation]) -> float | None:
    concordant = comparable = 0
    for case in cases:
        c, n = concordance_counts(
            [p.t_ref for p in case.matched], [p.t_pred for p in case.matched]
        )
        concordant += c
        comparable += n
    return concordant / comparable if comparable else None


def _pooled_sweep(
    cases: Sequence[CaseEvaluation],
    taus: Sequence[float],
    s_max: float,
) -> list[dict]:
    """Corpus-level sweep: rates pool reference counts, c-index pools
    within-case pair counts, AULTC pools matched discrepancies."""
    total_ref = sum(case.n_ref for case in cases)
    points = []
    for tau in taus:
        matched_per_case = [
            apply_threshold(case.pairs, tau, case.n_ref).matched for case in cases
        ]
        n_matched = sum(len(m) for m in matched_per_case)
        concordant = comparable = 0
        pooled_pairs: list[MatchedPair] = []
        for matched in matched_per_case:
            c, n = concordance_counts(
                [p.t_ref for p in matched], [p.t_pred for p in matched]
            )
            concordant += c
            comparable += n
            pooled_pairs.extend(matched)
        d = build_discrepancies(pooled_pairs, s_max)
        points.append(
            {
                "tau": tau,
                "match_rate": n_matched / total_ref if total_ref else None,
                "c_index": concordant / comparable if comparable else None,
                "aultc": aultc(d) if d.k else None,
            }
        )
    return points


def aggregate_report(
    cases: Sequence[CaseEvaluation],
    taus: Sequence[float] = DEFAULT_TAUS,
    s_max: float = DEFAULT_S_MAX,
) -> dict:
    """Corpus-level summary over per-case evaluations.

    Reports per-case medians and means (undefined values excluded and
    counted), the pooled c-index and AULTC, the pooled log-discrepancy CDF
    step points, and the pooled threshold sweep.
    """
    ordered = sorted(cases, key=lambda c: c.case_id)
    pooled_matched = [p for case in ordered for p in case.matched]
    pooled_d = build_discrepancies(pooled_matched, s_max)
    c_summary = _summary([case.c_index for case in ordered])
    c_summary["pooled"] = _pooled_concordance(ordered)
    a_summary = _summary([case.aultc for case in ordered])
    a_summary["pooled"] = aultc(pooled_d) if pooled_d.k else None
    return {
        "n_cases": len(ordered),
        "match_rate": _summary([case.match_rate for case in ordered]),
        "c_index": c_summary,
        "aultc": a_summary,
        "cdf": [{"x": x, "f": f} for x, f in cdf_points(pooled_d.values)],
        "sweep": _pooled_sweep(ordered, taus, s_max),
    }

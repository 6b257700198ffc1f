"""Tests for per-case evaluation and corpus-level aggregation."""

from __future__ import annotations

import math

import pytest

from caseline.alignment import EditDistanceMetric
from caseline.corpus import EventRecord, TimelineAnnotation
from caseline.errors import EmptyReference
from caseline.reports import (
    CaseEvaluation,
    aggregate_report,
    case_report,
    cdf_points,
    evaluate_case,
)
from caseline.temporal import DEFAULT_S_MAX, STRATUM_LABELS

METRIC = EditDistanceMetric()


def annotation(case_id: str, rows: list[tuple[str, float]]) -> TimelineAnnotation:
    return TimelineAnnotation(
        case_id=case_id, events=tuple(EventRecord(e, t) for e, t in rows)
    )


IDENTITY_ROWS = [
    ("fever", -72.0),
    ("admitted", 0.0),
    ("rash spread", 12.0),
    ("discharged", 96.0),
]


class TestEvaluateCase:
    def test_identity_case_is_perfect(self):
        ref = annotation("c1", IDENTITY_ROWS)
        case = evaluate_case(ref, ref, METRIC)
        assert case.case_id == "c1"
        assert case.n_ref == case.n_pred == case.n_matched == 4
        assert case.match_rate == 1.0
        assert case.c_index == 1.0
        assert case.aultc == 1.0
        assert case.s_max == DEFAULT_S_MAX

    def test_identity_strata_cover_all_buckets(self):
        ref = annotation("c1", IDENTITY_ROWS)
        case = evaluate_case(ref, ref, METRIC)
        assert [s.stratum for s in case.strata] == list(STRATUM_LABELS)
        by_label = {s.stratum: s for s in case.strata}
        assert by_label["presentation"].n == 1
        assert by_label["day"].n == 1
        assert by_label["week"].n == 2
        assert by_label["hour"].n == 0
        assert by_label["week"].aultc == 1.0

    def test_shifted_predictions_keep_order_but_lose_accuracy(self):
        ref = annotation("c1", IDENTITY_ROWS)
        pred = annotation("c1", [(e, t + 5.0) for e, t in IDENTITY_ROWS])
        case = evaluate_case(ref, pred, METRIC)
        assert case.match_rate == 1.0
        assert case.c_index == 1.0
        expected = 1.0 - math.log1p(5.0) / math.log1p(DEFAULT_S_MAX)
        assert case.aultc == pytest.approx(expected, rel=1e-12)
        assert case.aultc < 1.0

    def test_unmatched_events_lower_the_match_rate(self):
        ref = annotation("c1", IDENTITY_ROWS)
        pred = annotation("c1", [("completely unrelated finding xyz", 3.0)])
        case = evaluate_case(ref, pred, METRIC, tau=0.1)
        assert case.n_matched == 0
        assert case.match_rate == 0.0
        assert case.c_index is None
        assert case.aultc is None

    def test_single_matched_pair_has_undefined_c_index(self):
        ref = annotation("c1", [("fever", -72.0)])
        case = evaluate_case(ref, ref, METRIC)
        assert case.match_rate == 1.0
        assert case.c_index is None
        assert case.aultc == 1.0

    def test_empty_reference_raises(self):
        ref = TimelineAnnotation(case_id="c1")
        pred = annotation("c1", IDENTITY_ROWS)
        with pytest.raises(EmptyReference):
            evaluate_case(ref, pred, METRIC)

    def test_pairs_keep_the_pre_threshold_alignment(self):
        ref = annotation("c1", IDENTITY_ROWS)
        pred = annotation("c1", [("completely unrelated finding xyz", 3.0)])
        case = evaluate_case(ref, pred, METRIC, tau=0.1)
        assert len(case.pairs) == 1
        assert case.pairs[0].pred_event == "completely unrelated finding xyz"


class TestCaseReport:
    def test_report_shape(self):
        ref = annotation("c1", IDENTITY_ROWS)
        report = case_report(evaluate_case(ref, ref, METRIC))
        assert set(report) == {
            "case_id",
            "n_ref",
            "n_pred",
            "n_matched",
            "match_rate",
            "c_index",
            "aultc",
            "s_max",
            "strata",
        }
        assert len(report["strata"]) == len(STRATUM_LABELS)
        assert set(report["strata"][0]) == {
            "stratum",
            "n",
            "aultc",
            "median_log_discrepancy",
        }

    def test_report_is_json_ready(self):
        import json

        ref = annotation("c1", IDENTITY_ROWS)
        report = case_report(evaluate_case(ref, ref, METRIC))
        assert json.loads(json.dumps(report)) == report


class TestCdfPoints:
    def test_duplicates_collapse_to_one_step(self):
        assert cdf_points([1.0, 1.0, 2.0]) == [(1.0, 2 / 3), (2.0, 1.0)]

    def test_empty_input_has_no_points(self):
        assert cdf_points([]) == []

    def test_last_point_reaches_one(self):
        points = cdf_points([0.5, 0.25, 3.0, 0.25])
        assert points[-1][1] == 1.0
        xs = [x for x, _ in points]
        assert xs == sorted(set(xs))


class TestAggregateReport:
    @pytest.fixture()
    def two_cases(self) -> list[CaseEvaluation]:
        ref1 = annotation("c1", IDENTITY_ROWS)
        pred2 = annotation("c2", [(e, t + 5.0) for e, t in IDENTITY_ROWS])
        ref2 = annotation("c2", IDENTITY_ROWS)
        return [
            evaluate_case(ref1, ref1, METRIC),
            evaluate_case(ref2, pred2, METRIC),
        ]

    def test_match_rate_summary(self, two_cases):
        aggregate = aggregate_report(two_cases)
        assert aggregate["n_cases"] == 2
        assert aggregate["match_rate"] == {
            "median": 1.0,
            "mean": 1.0,
            "n_undefined": 0,
        }

    def test_pooled_c_index_counts_within_cases_only(self, two_cases):
        aggregate = aggregate_report(two_cases)
        assert aggregate["c_index"]["pooled"] == 1.0
        assert aggregate["c_index"]["median"] == 1.0
        assert aggregate["c_index"]["n_undefined"] == 0

    def test_aultc_mean_splits_the_difference(self, two_cases):
        aggregate = aggregate_report(two_cases)
        shifted = 1.0 - math.log1p(5.0) / math.log1p(DEFAULT_S_MAX)
        assert aggregate["aultc"]["mean"] == pytest.approx((1.0 + shifted) / 2)
        assert aggregate["aultc"]["n_undefined"] == 0

    def test_cdf_covers_pooled_discrepancies(self, two_cases):
        aggregate = aggregate_report(two_cases)
        xs = [point["x"] for point in aggregate["cdf"]]
        assert xs == [0.0, pytest.approx(math.log1p(5.0))]
        assert aggregate["cdf"][-1]["f"] == 1.0

    def test_sweep_match_rate_is_monotone(self, two_cases):
        aggregate = aggregate_report(two_cases)
        rates = [point["match_rate"] for point in aggregate["sweep"]]
        assert len(rates) == 25
        assert all(a <= b for a, b in zip(rates, rates[1:]))

    def test_undefined_metrics_are_counted_not_averaged(self):
        single = annotation("c1", [("fever", -72.0)])
        cases = [evaluate_case(single, single, METRIC)]
        aggregate = aggregate_report(cases)
        assert aggregate["c_index"] == {
            "median": None,
            "mean": None,
            "n_undefined": 1,
            "pooled": None,
        }
        assert aggregate["aultc"]["median"] == 1.0

    def test_no_cases_yields_empty_aggregate(self):
        aggregate = aggregate_report([])
        assert aggregate["n_cases"] == 0
        assert aggregate["match_rate"]["median"] is None
        assert aggregate["cdf"] == []
        assert all(point["match_rate"] is None for point in aggregate["sweep"])

    def test_aggregate_is_case_order_invariant(self, two_cases):
        forward = aggregate_report(two_cases)
        backward = aggregate_report(list(reversed(two_cases)))
        assert forward == backward

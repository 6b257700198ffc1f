"""Tests for the temporal metrics: log-time loss, CDF, AULTC, concordance,
strata, and the threshold sweep."""

from __future__ import annotations

import math

import numpy as np
import pytest

from caseline.alignment import MatchedPair
from caseline.errors import EmptyReference, UndefinedAultc, UndefinedCdf
from caseline.temporal import (
    DEFAULT_S_MAX,
    DEFAULT_TAUS,
    DiscrepancySet,
    StratumBounds,
    aultc,
    build_discrepancies,
    concordance_counts,
    concordance_index,
    log_time_loss,
    ltcdf,
    stratified_discrepancy,
    threshold_sweep,
)


def pair(t_ref: float, t_pred: float, distance: float = 0.0) -> MatchedPair:
    return MatchedPair("r", "p", distance, t_ref, t_pred, 0, 0)


def pairs_from_times(t_ref, t_pred, distances=None) -> list[MatchedPair]:
    distances = distances or [0.0] * len(t_ref)
    return [pair(r, p, d) for r, p, d in zip(t_ref, t_pred, distances)]


class TestLogTimeLoss:
    def test_zero_discrepancy(self):
        assert abs(log_time_loss(0, 0, 2)) <= 1e-12

    def test_clipped_at_cutoff(self):
        assert abs(log_time_loss(3, 0, 2) - math.log(3)) <= 1e-12

    def test_fractional_discrepancy(self):
        assert abs(log_time_loss(1.5, 0, 2) - math.log(2.5)) <= 1e-12

    def test_average_loss_is_not_convex(self):
        mixture = 0.5 * log_time_loss(0, 0, 2) + 0.5 * log_time_loss(3, 0, 2)
        at_mean = log_time_loss(1.5, 0, 2)
        assert at_mean - mixture > 0.36

    def test_symmetric_in_time_order(self):
        assert log_time_loss(5, 2, 100) == log_time_loss(2, 5, 100)

    def test_invalid_s_max(self):
        with pytest.raises(ValueError):
            log_time_loss(1, 0, 0)


class TestBuildDiscrepancies:
    def test_zero_discrepancy(self):
        d = build_discrepancies([pair(5, 5)], s_max=10)
        assert d.values == (0.0,)

    def test_log_identities(self):
        d = build_discrepancies(
            [pair(0, math.e - 1), pair(0, math.e**2 - 1)], s_max=1e9
        )
        assert abs(d.values[0] - 1.0) <= 1e-12
        assert abs(d.values[1] - 2.0) <= 1e-12

    def test_cutoff_clamp(self):
        d = build_discrepancies([pair(0, 10 * 8760)], s_max=8760)
        assert d.values == (math.log1p(8760),)

    def test_sorted_ascending(self):
        d = build_discrepancies([pair(0, 50), pair(0, 1), pair(0, 10)], s_max=100)
        assert list(d.values) == sorted(d.values)

    def test_empty_is_allowed(self):
        assert build_discrepancies([], s_max=10).k == 0

    def test_set_invariants_enforced(self):
        with pytest.raises(ValueError):
            DiscrepancySet(values=(2.0, 1.0), s_max=10)
        with pytest.raises(ValueError):
            DiscrepancySet(values=(-0.1,), s_max=10)
        with pytest.raises(ValueError):
            DiscrepancySet(values=(math.log1p(10) + 0.1,), s_max=10)
        with pytest.raises(ValueError):
            DiscrepancySet(values=(), s_max=0)


class TestLtcdf:
    def test_all_at_zero(self):
        assert ltcdf(DiscrepancySet((0.0, 0.0, 0.0), 10), 0) == 1.0

    def test_midpoint(self):
        assert ltcdf(DiscrepancySet((1.0, 2.0), 10), 1.5) == 0.5

    def test_below_all(self):
        assert ltcdf(DiscrepancySet((1.0, 2.0), 10), 0.5) == 0.0

    def test_right_continuous_at_a_value(self):
        d = DiscrepancySet((1.0, 2.0), 10)
        assert ltcdf(d, 1.0) == 0.5
        assert ltcdf(d, 1.0 - 1e-12) == 0.0

    def test_empty_set_raises(self):
        with pytest.raises(UndefinedCdf):
            ltcdf(DiscrepancySet((), 10), 0.5)

    def test_monotone_and_reaches_one(self):
        rng = np.random.default_rng(3)
        values = tuple(sorted(rng.uniform(0, math.log1p(50), size=12)))
        d = DiscrepancySet(values, 50)
        grid = np.linspace(0, math.log1p(50), 40)
        cdf = [ltcdf(d, x) for x in grid]
        assert cdf == sorted(cdf)
        assert ltcdf(d, max(values)) == 1.0


def numeric_aultc(d: DiscrepancySet, n_points: int = 200_000) -> float:
    """Oracle: midpoint-grid numeric integration of the step CDF."""
    limit = math.log1p(d.s_max)
    grid = (np.arange(n_points) + 0.5) * (limit / n_points)
    counts = n_points - np.searchsorted(grid, np.array(d.values), side="left")
    return float(counts.sum()) / (n_points * d.k)


class TestAultc:
    def test_all_zero_is_exactly_one(self):
        for k in (1, 2, 7, 100):
            d = DiscrepancySet((0.0,) * k, DEFAULT_S_MAX)
            assert aultc(d) == 1.0

    def test_all_clipped_is_exactly_zero(self):
        for k in (1, 3, 50):
            pairs = [pair(0, DEFAULT_S_MAX * (2 + i)) for i in range(k)]
            d = build_discrepancies(pairs, DEFAULT_S_MAX)
            assert aultc(d) == 0.0

    def test_half_limit_single_value(self):
        limit = math.log1p(DEFAULT_S_MAX)
        d = DiscrepancySet((limit / 2,), DEFAULT_S_MAX)
        assert aultc(d) == 0.5

    def test_empty_set_raises(self):
        with pytest.raises(UndefinedAultc):
            aultc(DiscrepancySet((), 10))

    def test_matches_numeric_integration(self):
        rng = np.random.default_rng(17)
        for _ in range(25):
            s_max = float(rng.choice([2.0, 100.0, 8760.0]))
            k = int(rng.integers(1, 40))
            raw = rng.uniform(0, 2 * s_max, size=k)
            d = build_discrepancies(
                [pair(0, delta) for delta in raw], s_max=s_max
            )
            assert abs(aultc(d) - numeric_aultc(d)) < 5e-6

    def test_non_increasing_when_a_discrepancy_grows(self):
        base = [pair(0, 1), pair(0, 10), pair(0, 100)]
        grown = [pair(0, 1), pair(0, 500), pair(0, 100)]
        s_max = 1000
        assert aultc(build_discrepancies(grown, s_max)) < aultc(
            build_discrepancies(base, s_max)
        )

    def test_permutation_invariant(self):
        times = [3.0, 50.0, 0.5, 7.0]
        forward = build_discrepancies([pair(0, t) for t in times], 100)
        backward = build_discrepancies([pair(0, t) for t in reversed(times)], 100)
        assert aultc(forward) == aultc(backward)

    def test_within_unit_interval(self):
        rng = np.random.default_rng(19)
        for _ in range(50):
            raw = rng.uniform(0, 3 * 8760, size=rng.integers(1, 30))
            d = build_discrepancies([pair(0, t) for t in raw], DEFAULT_S_MAX)
            assert 0.0 <= aultc(d) <= 1.0


def brute_concordance(t_ref, t_pred):
    concordant = comparable = 0
    for i in range(len(t_ref)):
        for j in range(i + 1, len(t_ref)):
            d_ref = t_ref[i] - t_ref[j]
            d_pred = t_pred[i] - t_pred[j]
            if d_ref != 0 and d_pred != 0:
                comparable += 1
                if (d_ref > 0) == (d_pred > 0):
                    concordant += 1
    return concordant, comparable


class TestConcordance:
    def test_identical_ordering(self):
        assert concordance_index(pairs_from_times([0, 1, 2], [5, 6, 7])) == 1.0

    def test_reversed_ordering(self):
        assert concordance_index(pairs_from_times([0, 1, 2], [7, 6, 5])) == 0.0

    def test_ties_shrink_the_comparable_set(self):
        pairs = pairs_from_times([0, 0, 1], [2, 3, 1])
        assert concordance_counts([0, 0, 1], [2, 3, 1]) == (0, 2)
        assert concordance_index(pairs) == 0.0

    def test_undefined_when_no_comparable_pairs(self):
        assert concordance_index(pairs_from_times([1, 1], [2, 3])) is None
        assert concordance_index([]) is None
        assert concordance_index(pairs_from_times([1], [2])) is None

    def test_matches_brute_force(self):
        rng = np.random.default_rng(5)
        for _ in range(100):
            n = int(rng.integers(0, 20))
            t_ref = rng.integers(-5, 5, size=n).astype(float)
            t_pred = rng.integers(-5, 5, size=n).astype(float)
            assert concordance_counts(t_ref, t_pred) == brute_concordance(
                list(t_ref), list(t_pred)
            )

    def test_shift_invariance(self):
        t_ref = [0.0, 3.0, 7.0, 7.0]
        t_pred = [1.0, 2.0, 9.0, 4.0]
        shifted = [t + 5.0 for t in t_pred]
        assert concordance_index(pairs_from_times(t_ref, t_pred)) == (
            concordance_index(pairs_from_times(t_ref, shifted))
        )

    def test_role_swap_invariance(self):
        t_ref = [0.0, 3.0, 7.0, 2.0]
        t_pred = [1.0, 2.0, 9.0, 4.0]
        assert concordance_index(pairs_from_times(t_ref, t_pred)) == (
            concordance_index(pairs_from_times(t_pred, t_ref))
        )

    def test_strictly_increasing_transform_invariance(self):
        t_ref = [0.0, 3.0, 7.0, 2.0, 2.0]
        t_pred = [1.0, 2.0, 9.0, 4.0, 8.0]
        for transform in (lambda x: 2 * x + 3, lambda x: x**3, math.atan):
            transformed = [transform(t) for t in t_pred]
            assert concordance_index(pairs_from_times(t_ref, t_pred)) == (
                concordance_index(pairs_from_times(t_ref, transformed))
            )

    def test_length_mismatch_rejected(self):
        with pytest.raises(ValueError):
            concordance_counts([1, 2], [1])


class TestStrata:
    def test_presentation_is_exactly_zero(self):
        bounds = StratumBounds()
        assert bounds.stratum_of(0.0) == "presentation"
        assert bounds.stratum_of(-0.0) == "presentation"

    def test_week_bucket_example(self):
        assert StratumBounds().stratum_of(-72.0) == "week"

    @pytest.mark.parametrize(
        "t_ref,label",
        [
            (0.5, "hour"),
            (1.0, "hour"),
            (-1.5, "day"),
            (24.0, "day"),
            (25.0, "week"),
            (168.0, "week"),
            (169.0, "year"),
            (8760.0, "year"),
            (8761.0, "beyond"),
            (-1e7, "beyond"),
        ],
    )
    def test_boundaries(self, t_ref, label):
        assert StratumBounds().stratum_of(t_ref) == label

    def test_invalid_bounds_rejected(self):
        with pytest.raises(ValueError):
            StratumBounds(bounds=(0.0, 1.0), labels=("a",))
        with pytest.raises(ValueError):
            StratumBounds(bounds=(1.0, math.inf), labels=("a", "b"))
        with pytest.raises(ValueError):
            StratumBounds(bounds=(0.0, 5.0, 4.0, math.inf), labels=("a", "b", "c", "d"))
        with pytest.raises(ValueError):
            StratumBounds(bounds=(0.0, 1.0, 2.0), labels=("a", "b", "c"))

    def test_partition_counts_sum(self):
        rng = np.random.default_rng(13)
        matched = [
            pair(float(t), float(t) + float(rng.normal()))
            for t in rng.uniform(-2e4, 2e4, size=200)
        ]
        summaries = stratified_discrepancy(matched)
        assert sum(s.n for s in summaries) == len(matched)

    def test_all_buckets_always_reported(self):
        summaries = stratified_discrepancy([pair(0, 0)])
        assert [s.stratum for s in summaries] == list(
            ("presentation", "hour", "day", "week", "year", "beyond")
        )
        by_label = {s.stratum: s for s in summaries}
        assert by_label["presentation"].n == 1
        assert by_label["presentation"].aultc == 1.0
        assert by_label["hour"].n == 0
        assert by_label["hour"].aultc is None
        assert by_label["hour"].median_log_discrepancy is None

    def test_median_log_discrepancy(self):
        matched = [pair(-30, -30), pair(-40, -40 + (math.e - 1))]
        summary = {s.stratum: s for s in stratified_discrepancy(matched, s_max=100)}
        assert summary["week"].n == 2
        assert abs(summary["week"].median_log_discrepancy - 0.5) <= 1e-12


class TestThresholdSweep:
    def test_default_grid(self):
        assert len(DEFAULT_TAUS) == 25
        assert DEFAULT_TAUS[0] == 0.01
        assert DEFAULT_TAUS[-1] == 0.25

    def test_saturated_matching(self):
        pairs = pairs_from_times([0, 1, 2], [0, 1, 2])
        points = threshold_sweep(pairs, ref_size=3)
        assert len(points) == 25
        assert all(p.match_rate == 1.0 for p in points)
        assert all(p.aultc == 1.0 for p in points)
        assert all(p.c_index == 1.0 for p in points)

    def test_nothing_within_any_tau(self):
        pairs = pairs_from_times([0, 1], [0, 1], distances=[0.9, 0.8])
        points = threshold_sweep(pairs, ref_size=2)
        assert all(p.match_rate == 0.0 for p in points)
        assert all(p.aultc is None and p.c_index is None for p in points)

    def test_match_rate_monotone_on_random_instances(self):
        rng = np.random.default_rng(37)
        for _ in range(30):
            n = int(rng.integers(1, 30))
            pairs = pairs_from_times(
                rng.uniform(-100, 100, size=n),
                rng.uniform(-100, 100, size=n),
                distances=list(rng.uniform(0, 0.3, size=n)),
            )
            rates = [p.match_rate for p in threshold_sweep(pairs, ref_size=n)]
            assert rates == sorted(rates)

    def test_empty_reference_propagates(self):
        with pytest.raises(EmptyReference):
            threshold_sweep([], ref_size=0)

    def test_empty_tau_grid_rejected(self):
        with pytest.raises(ValueError):
            threshold_sweep([], ref_size=1, taus=())

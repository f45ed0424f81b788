import json
import math
import random

import pytest

from histoseg.engine import (
    ClassArray,
    ClassRecord,
    EmptyHistogram,
    Histogram,
    InvalidLevel,
    InvalidStop,
    SingleClass,
    between_class_variance,
    build_initial,
    find_min_pair,
    histogram_from_csv,
    histogram_from_json,
    merge_step,
    pair_distance,
    run_dendrogram,
    thresholds_at,
)
from histoseg.oracle import naive_variances

from helpers import dense_histogram, hist_from, rel_err, sparse_histogram

EXAMPLE = hist_from({1: 2, 2: 2, 5: 1})


def record(n, a, g_lo, g_hi):
    return ClassRecord(n=n, a=float(a), g_lo=g_lo, g_hi=g_hi, gray_sum=round(n * a))


def array_of(*recs):
    total = sum(r.gray_sum for r in recs)
    n = sum(r.n for r in recs)
    return ClassArray(classes=tuple(recs), grand_mean=total / n, N=n)


class TestHistogram:
    def test_basic_properties(self):
        assert EXAMPLE.G == 256
        assert EXAMPLE.N == 5

    def test_rejects_negative_counts(self):
        with pytest.raises(ValueError):
            Histogram((1, -1))

    def test_rejects_zero_bins(self):
        with pytest.raises(ValueError):
            Histogram(())


class TestBuildInitial:
    def test_three_bin_example(self):
        c = build_initial(EXAMPLE)
        assert c.K == 3
        assert c.grand_mean == pytest.approx(2.2, rel=1e-12)
        w0 = between_class_variance(c)
        assert w0 == pytest.approx(5.4, rel=1e-9)
        # cross-check against the independent naive recomputation
        v_naive, w_naive = naive_variances(c, EXAMPLE)
        assert v_naive == 0.0
        assert w_naive == pytest.approx(w0, rel=1e-9)

    def test_single_bin(self):
        c = build_initial(hist_from({7: 10}))
        assert c.K == 1
        assert c.grand_mean == 7.0
        assert between_class_variance(c) is None

    def test_all_zero_raises(self):
        with pytest.raises(EmptyHistogram):
            build_initial(Histogram((0,) * 256))

    def test_empty_bins_dropped(self):
        c = build_initial(EXAMPLE)
        assert [(r.n, r.g_lo, r.g_hi) for r in c.classes] == [(2, 1, 1), (2, 2, 2), (1, 5, 5)]
        assert sum(r.n for r in c.classes) == c.N


class TestPairDistance:
    def test_examples(self):
        assert pair_distance(record(2, 1, 1, 1), record(2, 2, 2, 2)) == pytest.approx(1.0, rel=1e-12)
        assert pair_distance(record(2, 2, 2, 2), record(1, 5, 5, 5)) == pytest.approx(6.0, rel=1e-12)
        assert pair_distance(record(3, 4, 4, 4), record(9, 4, 5, 9)) == 0.0

    def test_non_negative(self):
        rng = random.Random(11)
        for _ in range(200):
            n1, n2 = rng.randint(1, 50), rng.randint(1, 50)
            a1, a2 = rng.uniform(0, 255), rng.uniform(0, 255)
            assert pair_distance(record(n1, a1, 0, 0), record(n2, a2, 1, 1)) >= 0.0


class TestFindMinPair:
    def test_picks_smallest(self):
        c = array_of(record(2, 1, 1, 1), record(2, 2, 2, 2), record(1, 5, 5, 5))
        assert find_min_pair(c) == 0

    def test_tie_goes_to_lowest_index(self):
        c = array_of(record(1, 0, 0, 0), record(1, 1, 1, 1), record(1, 2, 2, 2))
        assert find_min_pair(c) == 0

    def test_single_class_raises(self):
        with pytest.raises(SingleClass):
            find_min_pair(array_of(record(5, 3, 3, 3)))


class TestMergeStep:
    def test_worked_example(self):
        c = build_initial(EXAMPLE)
        c1, rec = merge_step(c, 0.0, between_class_variance(c), step=1)
        assert rec.left_index == 0
        assert rec.boundary_gray == 1
        assert rec.K_after == 2
        assert rec.d_sq == pytest.approx(1.0, rel=1e-9)
        assert rec.v == pytest.approx(1 / 3, rel=1e-9)
        assert rec.w == pytest.approx(9.8, rel=1e-9)
        assert rec.q == pytest.approx(1 / 29.4, rel=1e-9)
        assert [(r.n, r.a, r.g_lo, r.g_hi) for r in c1.classes] == [
            (4, 1.5, 1, 2),
            (1, 5.0, 5, 5),
        ]
        assert c1.grand_mean == c.grand_mean
        # the recursion must agree with naive recomputation on the new partition
        v_naive, w_naive = naive_variances(c1, EXAMPLE)
        assert rel_err(rec.v, v_naive) <= 1e-9
        assert rel_err(rec.w, w_naive) <= 1e-9

    def test_zero_distance_merge(self):
        c = array_of(record(3, 4, 4, 4), record(9, 4, 5, 9))
        c1, rec = merge_step(c, 0.0, 0.0)
        assert rec.d_sq == 0.0
        assert rec.v == 0.0
        assert (c1.classes[0].n, c1.classes[0].a) == (12, 4.0)

    def test_terminal_merge_drops_w(self):
        c = array_of(record(1, 0, 0, 0), record(1, 255, 255, 255))
        c1, rec = merge_step(c, 0.0, between_class_variance(c))
        assert c1.K == 1
        assert rec.w is None
        assert rec.q is None

    def test_single_class_raises(self):
        with pytest.raises(SingleClass):
            merge_step(array_of(record(5, 3, 3, 3)), 0.0, 0.0)


class TestRunDendrogram:
    def test_worked_example_trace(self):
        trace = run_dendrogram(EXAMPLE)
        assert len(trace.records) == 2
        assert [r.d_sq for r in trace.records] == [
            pytest.approx(1.0, rel=1e-9),
            pytest.approx(9.8, rel=1e-9),
        ]
        assert trace.records[-1].v == pytest.approx(2.7, rel=1e-9)
        assert trace.records[-1].w is None
        assert [r.K_after for r in trace.records] == [2, 1]
        assert trace.ss_total == pytest.approx(10.8, rel=1e-12)

    def test_single_class_histogram(self):
        trace = run_dendrogram(hist_from({7: 10}))
        assert trace.records == ()

    def test_stop_at_initial_count_is_noop(self):
        trace = run_dendrogram(EXAMPLE, stop_at=3)
        assert trace.records == ()
        assert trace.initial.K == 3

    def test_invalid_stop(self):
        with pytest.raises(InvalidStop):
            run_dendrogram(EXAMPLE, stop_at=4)
        with pytest.raises(InvalidStop):
            run_dendrogram(EXAMPLE, stop_at=0)

    def test_matches_iterated_merge_step_exactly(self):
        rng = random.Random(23)
        for _ in range(25):
            h = sparse_histogram(rng)
            trace = run_dendrogram(h)
            c = build_initial(h)
            v, w = 0.0, between_class_variance(c)
            chained = []
            for step in range(1, c.K):
                c, rec = merge_step(c, v, w, step=step)
                v, w = rec.v, rec.w
                chained.append(rec)
            assert tuple(chained) == trace.records

    def test_conservation_identity(self):
        rng = random.Random(31)
        for _ in range(30):
            h = sparse_histogram(rng)
            trace = run_dendrogram(h)
            n = trace.initial.N
            k = trace.initial.K
            w0 = between_class_variance(trace.initial) or 0.0
            lhs = (n - k) * 0.0 + (k - 1) * w0
            assert abs(lhs - trace.ss_total) <= 1e-9 * max(1.0, trace.ss_total)
            for rec in trace.records:
                lhs = (n - rec.K_after) * rec.v + (rec.K_after - 1) * (rec.w or 0.0)
                assert abs(lhs - trace.ss_total) <= 1e-9 * max(1.0, trace.ss_total)

    def test_monotonicity(self):
        rng = random.Random(37)
        for _ in range(30):
            trace = run_dendrogram(sparse_histogram(rng))
            prev_v = 0.0
            prev_sw = math.inf
            for rec in trace.records:
                assert rec.v >= prev_v
                sw = (rec.K_after - 1) * (rec.w or 0.0)
                assert sw <= prev_sw
                prev_v, prev_sw = rec.v, sw

    def test_k_decreases_by_one(self):
        trace = run_dendrogram(dense_histogram(random.Random(41), bins=64))
        ks = [trace.initial.K] + [r.K_after for r in trace.records]
        assert ks == list(range(64, 0, -1))

    def test_grand_mean_invariant(self):
        rng = random.Random(43)
        for _ in range(10):
            h = sparse_histogram(rng)
            c = build_initial(h)
            gm = c.grand_mean
            v, w = 0.0, between_class_variance(c)
            while c.K > 1:
                c, rec = merge_step(c, v, w)
                v, w = rec.v, rec.w
                recomputed = sum(r.n * r.a for r in c.classes) / c.N
                assert rel_err(recomputed, gm) <= 1e-12
                assert c.grand_mean == gm

    def test_determinism(self):
        h = dense_histogram(random.Random(47), bins=128)
        assert run_dendrogram(h) == run_dendrogram(h)


class TestThresholdsAt:
    def test_two_class_example(self):
        trace = run_dendrogram(EXAMPLE)
        t = thresholds_at(trace, 2)
        assert t.cuts == (2,)
        assert t.means == (1.5, 5.0)
        assert t.top == 5

    def test_identity_partition(self):
        trace = run_dendrogram(EXAMPLE)
        t = thresholds_at(trace, 3)
        assert t.cuts == (1, 2)
        assert t.means == (1.0, 2.0, 5.0)

    def test_single_class(self):
        trace = run_dendrogram(EXAMPLE)
        t = thresholds_at(trace, 1)
        assert t.cuts == ()
        assert t.means == (pytest.approx(2.2),)

    def test_invalid_level(self):
        trace = run_dendrogram(EXAMPLE)
        with pytest.raises(InvalidLevel):
            thresholds_at(trace, 4)
        with pytest.raises(InvalidLevel):
            thresholds_at(trace, 0)

    def test_partial_trace_rejects_finer_levels(self):
        trace = run_dendrogram(EXAMPLE, stop_at=2)
        assert thresholds_at(trace, 2).cuts == (2,)
        with pytest.raises(InvalidLevel):
            thresholds_at(trace, 1)

    def test_refinement_nesting(self):
        rng = random.Random(53)
        for _ in range(20):
            trace = run_dendrogram(sparse_histogram(rng))
            k0 = trace.initial.K
            for m in range(1, k0):
                coarse = set(thresholds_at(trace, m).cuts)
                fine = set(thresholds_at(trace, m + 1).cuts)
                assert coarse < fine
                assert len(fine - coarse) == 1


class TestTraceSerialization:
    def test_schema(self):
        data = run_dendrogram(EXAMPLE).to_dict()
        assert set(data) == {"G", "N", "grand_mean", "ss_total", "initial_classes", "merges"}
        assert data["G"] == 256
        assert data["N"] == 5
        assert all(set(c) == {"n", "a", "g_lo", "g_hi"} for c in data["initial_classes"])
        first, last = data["merges"][0], data["merges"][-1]
        assert set(first) == {"step", "boundary_gray", "d_sq", "v", "w", "q", "K_after"}
        # terminal record has no defined w or q
        assert set(last) == {"step", "boundary_gray", "d_sq", "v", "K_after"}

    def test_json_round_trip_and_determinism(self):
        a = run_dendrogram(EXAMPLE).to_json()
        b = run_dendrogram(EXAMPLE).to_json()
        assert a == b
        assert json.loads(a)["merges"][0]["v"] == pytest.approx(1 / 3, rel=1e-12)


class TestHistogramIngestion:
    def test_from_json(self):
        h = histogram_from_json("[0, 2, 2, 0, 0, 1]")
        assert h.G == 6
        assert h.N == 5

    def test_from_json_rejects_non_integers(self):
        with pytest.raises(ValueError):
            histogram_from_json("[1, 2.5]")
        with pytest.raises(ValueError):
            histogram_from_json("{\"a\": 1}")

    def test_from_csv(self):
        text = "gray,count\n# comment\n1,2\n2,2\n5,1\n"
        h = histogram_from_csv(text)
        assert h.counts[1] == 2 and h.counts[2] == 2 and h.counts[5] == 1
        assert h.N == 5 and h.G == 256

    def test_from_csv_accumulates_duplicates(self):
        assert histogram_from_csv("3,1\n3,4\n").counts[3] == 5

    def test_from_csv_rejects_bad_lines(self):
        with pytest.raises(ValueError):
            histogram_from_csv("1,2,3\n")
        with pytest.raises(ValueError):
            histogram_from_csv("300,1\n")
        with pytest.raises(ValueError):
            histogram_from_csv("3,-1\n")

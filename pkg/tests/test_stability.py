import math
import random

import numpy as np
import pytest

from framesift.errors import DimensionMismatch, NoSamples, SequenceTooShort
from framesift.metrics import IoUCurve
from framesift.stability import (
    QuotientSample,
    frame_distance,
    grayscale_map,
    lipschitz_quotients,
    quantile,
    quantiles,
)

from conftest import gray_frame, gray_sequence


def curve(values, frames=None) -> IoUCurve:
    frames = tuple(range(len(values))) if frames is None else tuple(frames)
    return IoUCurve(class_id=0, frames=frames, values=tuple(values))


class TestFrameDistance:
    def test_identical_frames(self):
        a = gray_frame(0, [[7, 7], [7, 7]])
        b = gray_frame(1, [[7, 7], [7, 7]])
        assert frame_distance(a, b) == 0.0

    def test_maximal_uniform_difference(self):
        a = gray_frame(0, np.zeros((3, 4)))
        b = gray_frame(1, np.full((3, 4), 255))
        assert frame_distance(a, b) == 255.0

    def test_hand_example(self):
        a = gray_frame(0, [[0, 10], [20, 30]])
        b = gray_frame(1, [[5, 10], [20, 25]])
        assert frame_distance(a, b) == 2.5  # D = 10 over 4 pixels

    def test_dimension_mismatch(self):
        a = gray_frame(0, np.zeros((2, 2)))
        b = gray_frame(1, np.zeros((2, 3)))
        with pytest.raises(DimensionMismatch):
            frame_distance(a, b)


def distinct_grays(n, h=2, w=2):
    """n luma planes, pairwise distinct so no quotient pair is dropped."""
    return {i: gray_frame(i, np.full((h, w), (i * 37) % 256)) for i in range(n)}


class TestQuotients:
    def test_constant_curve_gives_zero_quotients(self):
        grays = distinct_grays(4)
        qset = lipschitz_quotients(curve([0.7] * 4), grays, "all_pairs")
        assert all(s.quotient == 0.0 for s in qset.samples)

    def test_pair_counts(self):
        grays = distinct_grays(3)
        assert len(lipschitz_quotients(curve([1, 0.5, 0]), grays, "all_pairs").samples) == 3
        assert len(lipschitz_quotients(curve([1, 0.5, 0]), grays, "consecutive").samples) == 2

    def test_hand_quotient(self):
        grays = {
            0: gray_frame(0, [[0, 10], [20, 30]]),
            1: gray_frame(1, [[5, 10], [20, 25]]),
        }
        qset = lipschitz_quotients(curve([1.0, 0.5]), grays, "consecutive")
        (s,) = qset.samples
        assert s.numerator == 0.5
        assert s.denominator == 2.5
        assert s.quotient == 0.2

    def test_zero_denominator_dropped_and_counted(self):
        grays = {
            0: gray_frame(0, [[9]]),
            1: gray_frame(1, [[9]]),  # identical to frame 0
            2: gray_frame(2, [[50]]),
        }
        qset = lipschitz_quotients(curve([1.0, 0.5, 0.0]), grays, "all_pairs")
        assert qset.dropped_zero_denominator == 1
        assert len(qset.samples) == 2
        assert len(qset.samples) == math.comb(3, 2) - qset.dropped_zero_denominator

    def test_consecutive_subset_of_all_pairs(self):
        rng = np.random.default_rng(3)
        n = 7
        grays = {
            i: gray_frame(i, rng.integers(0, 256, size=(3, 3))) for i in range(n)
        }
        values = rng.random(n).round(3)
        all_pairs = lipschitz_quotients(curve(values), grays, "all_pairs")
        consecutive = lipschitz_quotients(curve(values), grays, "consecutive")
        assert set(consecutive.samples) <= set(all_pairs.samples)

    def test_short_curve_rejected(self):
        with pytest.raises(SequenceTooShort):
            lipschitz_quotients(curve([1.0]), distinct_grays(1), "all_pairs")

    def test_subset_curve_uses_curve_frames(self):
        grays = distinct_grays(10)
        sub = curve([0.9, 0.4, 0.1], frames=[2, 5, 9])
        qset = lipschitz_quotients(sub, grays, "all_pairs")
        assert {(s.i, s.j) for s in qset.samples} == {(2, 5), (2, 9), (5, 9)}

    def test_grayscale_map_covers_sequence(self):
        seq = gray_sequence([[0, 1]], [[2, 3]], [[4, 5]])
        grays = grayscale_map(seq)
        assert sorted(grays) == [0, 1, 2]


def sample(i, j, num, den) -> QuotientSample:
    return QuotientSample.from_parts(i, j, num, den)


class TestQuantile:
    def test_reference_midpoint(self):
        assert quantile([1, 2, 3, 4], 50) == 2.5

    def test_single_sample(self):
        for q in (0, 50, 99):
            assert quantile([3.25], q) == 3.25

    def test_all_equal(self):
        report = quantiles([sample(0, 1, 2.0, 1.0)] * 5)
        assert set(report.percentiles.values()) == {2.0}

    def test_matches_numpy_linear_oracle(self):
        rng = np.random.default_rng(17)
        for _ in range(40):
            n = int(rng.integers(1, 1001))
            values = rng.exponential(2.0, size=n)
            for q in (50, 90, 95, 99, 12.5, 100, 0):
                ours = quantile(list(values), q)
                oracle = float(np.percentile(values, q, method="linear"))
                assert ours == pytest.approx(oracle, rel=1e-12, abs=1e-300)

    def test_monotone_in_level(self):
        rng = random.Random(11)
        for _ in range(50):
            values = [rng.uniform(0, 9) for _ in range(rng.randint(1, 60))]
            ks = [quantile(values, q) for q in (50, 90, 95, 99)]
            assert all(a <= b for a, b in zip(ks, ks[1:]))

    def test_no_samples(self):
        with pytest.raises(NoSamples):
            quantile([], 50)
        with pytest.raises(NoSamples):
            quantiles([])


class TestReport:
    def test_report_fields(self):
        samples = [sample(0, 1, 1.0, 2.0), sample(0, 2, 3.0, 2.0), sample(1, 2, 2.0, 2.0)]
        report = quantiles(samples)
        assert report.sample_count == 3
        assert report.percentiles[50] == 1.0
        ks = [report.percentiles[q] for q in (50, 90, 95, 99)]
        assert ks == sorted(ks)

    def test_homogeneity_power_of_two_exact(self):
        rng = random.Random(23)
        base = [
            sample(i, j, rng.uniform(0, 1), rng.uniform(0.1, 5))
            for i, j in [(0, 1), (0, 2), (1, 2), (1, 3), (2, 3)]
        ]
        for c in (2.0, 0.5, 8.0):
            scaled = [
                sample(s.i, s.j, s.numerator, s.denominator * c) for s in base
            ]
            r0 = quantiles(base)
            r1 = quantiles(scaled)
            for q in (50, 90, 95, 99):
                assert r1.percentiles[q] == r0.percentiles[q] / c

    def test_homogeneity_general_scale(self):
        rng = random.Random(29)
        base = [
            sample(i, i + 1, rng.uniform(0, 1), rng.uniform(0.1, 5))
            for i in range(30)
        ]
        c = 3.7
        scaled = [sample(s.i, s.j, s.numerator, s.denominator * c) for s in base]
        r0, r1 = quantiles(base), quantiles(scaled)
        for q in (50, 90, 95, 99):
            assert r1.percentiles[q] == pytest.approx(
                r0.percentiles[q] / c, rel=1e-12
            )

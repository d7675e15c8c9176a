import numpy as np
import pytest

from nyqmon.errors import EmptyTrace, GapTooLarge, InvalidRate, ShapeMismatch
from nyqmon.series import (
    QuantizationSpec,
    TimeSeries,
    UniformSeries,
    decimate,
    l2_distance,
    quantize,
    regularize,
)

from oracles import nearest_index_earlier, nearest_index_later


def ts(t, v):
    return TimeSeries(np.array(t, float), np.array(v, float), "m", "u")


class TestTimeSeries:
    def test_rejects_non_increasing(self):
        with pytest.raises(ValueError):
            ts([0, 1, 1], [1, 2, 3])

    def test_rejects_length_mismatch(self):
        with pytest.raises(ShapeMismatch):
            ts([0, 1], [1])

    def test_rejects_nan(self):
        with pytest.raises(ValueError):
            ts([0, 1], [1, np.nan])

    def test_points_roundtrip(self):
        s = ts([0, 1.5], [3, 4])
        assert TimeSeries.from_points(s.points, "m", "u") == s

    def test_arrays_are_read_only(self):
        s = ts([0, 1], [1, 2])
        with pytest.raises(ValueError):
            s.values[0] = 5


class TestUniformSeries:
    def test_timestamps(self):
        us = UniformSeries([1, 2, 3], 4.0, start_time=10.0)
        np.testing.assert_allclose(us.timestamps, [10, 10.25, 10.5])
        assert us.duration == 0.75

    @pytest.mark.parametrize("rate", [0.0, -1.0, float("inf"), float("nan")])
    def test_bad_rate(self, rate):
        with pytest.raises(InvalidRate):
            UniformSeries([1.0], rate)

    def test_to_timeseries(self):
        us = UniformSeries([5, 6], 2.0, 1.0, "cpu", "%")
        s = us.to_timeseries()
        assert s.metric_name == "cpu" and list(s.timestamps) == [1.0, 1.5]


class TestRegularize:
    def test_identity_on_uniform(self):
        out = regularize(ts([0, 1, 2, 3], [10, 20, 30, 40]), 1.0)
        assert list(out.values) == [10, 20, 30, 40]

    def test_nearest_neighbour(self):
        out = regularize(ts([0, 0.9, 2.1], [1, 2, 3]), 1.0)
        assert list(out.values) == [1, 2, 3]

    def test_tie_goes_to_earlier(self):
        # grid instant 1.0 is equidistant from 0.5 and 1.5
        out = regularize(ts([0, 0.5, 1.5, 2.0], [1, 2, 3, 4]), 1.0)
        assert list(out.values) == [1, 2, 4]

    def test_gap_too_large(self):
        with pytest.raises(GapTooLarge):
            regularize(ts([0, 10], [1, 2]), 1.0, max_gap=5)

    def test_too_short(self):
        with pytest.raises(EmptyTrace):
            regularize(ts([0], [1]), 1.0)

    def test_against_brute_force(self):
        rng = np.random.default_rng(3)
        t = np.cumsum(rng.uniform(0.3, 1.7, 60))
        v = rng.normal(size=60)
        out = regularize(ts(t, v), 1.0)
        grid = t[0] + np.arange(len(out))
        expected = [v[nearest_index_earlier(t, g)] for g in grid]
        np.testing.assert_array_equal(out.values, expected)
        assert grid[-1] <= t[-1]


class TestDecimate:
    def test_integer_factor(self):
        us = UniformSeries(list("abcdefgh".encode()), 4.0)
        assert list(decimate(us, 2.0).values) == list("aceg".encode())

    def test_three_to_two(self):
        us = UniformSeries([0, 1, 2, 3, 4, 5], 3.0)
        assert list(decimate(us, 2.0).values) == [0, 2, 3, 5]

    def test_against_brute_force(self):
        us = UniformSeries(np.arange(50.0), 7.0)
        out = decimate(us, 3.0)
        src_t = us.timestamps
        expected = [us.values[nearest_index_later(src_t, k / 3.0)] for k in range(len(out))]
        np.testing.assert_array_equal(out.values, expected)

    def test_identity(self):
        us = UniformSeries([1.0, 2.0], 5.0)
        assert decimate(us, 5.0) == us

    @pytest.mark.parametrize("target", [0.0, -1.0, 6.0])
    def test_invalid(self, target):
        with pytest.raises(InvalidRate):
            decimate(UniformSeries([1.0, 2.0], 5.0), target)


class TestQuantize:
    @pytest.mark.parametrize(
        "values, quantum, expected",
        [([1.2, 1.6, -0.4], 1.0, [1, 2, 0]), ([0.05, 0.14], 0.1, [0.1, 0.1]), ([0.5, -0.5, 2.5], 1.0, [1, -1, 3])],
    )
    def test_examples(self, values, quantum, expected):
        out = quantize(UniformSeries(values, 1.0), QuantizationSpec(quantum))
        np.testing.assert_allclose(out.values, expected, atol=1e-12)

    def test_origin(self):
        out = quantize(UniformSeries([0.74, 0.76], 1.0), QuantizationSpec(0.5, origin=0.25))
        np.testing.assert_allclose(out.values, [0.75, 0.75])

    def test_bad_quantum(self):
        with pytest.raises(ValueError):
            QuantizationSpec(0.0)


class TestL2:
    @pytest.mark.parametrize(
        "a, b, d", [([0, 0], [3, 4], 5.0), ([1, 2, 3], [1, 2, 4], 1.0), ([1, 2], [1, 2], 0.0)]
    )
    def test_examples(self, a, b, d):
        assert l2_distance(UniformSeries(a, 1.0), UniformSeries(b, 1.0)) == d

    def test_shape_mismatch(self):
        with pytest.raises(ShapeMismatch):
            l2_distance(UniformSeries([1, 2], 1.0), UniformSeries([1], 1.0))
        with pytest.raises(ShapeMismatch):
            l2_distance(UniformSeries([1, 2], 1.0), UniformSeries([1, 2], 2.0))

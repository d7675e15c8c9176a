import numpy as np
import pytest

from nyqmon.errors import ParseError
from nyqmon.spectral import Rate, estimate_nyquist
from nyqmon.synth import (
    ChangeEvent,
    Component,
    SignalSpec,
    SpecSource,
    two_tone_spec,
    format_spec,
    generate,
    load_spec,
    parse_spec,
    query,
    temperature_like,
    true_nyquist,
)


class TestQuery:
    def test_quarter_period(self):
        assert query(SignalSpec((Component(1.0, 1.0, 0.0),)), 0.25) == pytest.approx(1.0)

    @pytest.mark.parametrize("t", [0.0, 3.7, 1e6])
    def test_offset_only(self, t):
        assert query(SignalSpec(offset=5.0), t) == 5.0

    def test_two_tones_at_zero(self):
        assert query(two_tone_spec(), 0.0) == 0.0

    def test_trend(self):
        assert query(SignalSpec(offset=1.0, trend=0.5), 4.0) == 3.0

    def test_vector_in_vector_out(self):
        out = query(SignalSpec(offset=2.0), np.array([0.0, 1.0]))
        assert isinstance(out, np.ndarray) and list(out) == [2.0, 2.0]

    def test_change_event(self):
        spec = SignalSpec((Component(1.0, 1.0),), change_events=[(10.0, [(2.0, 3.0, 0.0)])])
        assert query(spec, 9.25) == pytest.approx(1.0)
        assert query(spec, 10.125) == pytest.approx(3.0)

    def test_noise_reproducible_and_bounded(self):
        spec = SignalSpec(noise_amplitude=0.5, seed=7)
        t = np.linspace(0, 100, 1001)
        a, b = query(spec, t), query(spec, t)
        assert np.array_equal(a, b)
        assert np.all(np.abs(a) <= 0.5) and a.std() > 0.2
        other = query(SignalSpec(noise_amplitude=0.5, seed=8), t)
        assert not np.array_equal(a, other)

    def test_noise_independent_of_query_order(self):
        spec = SignalSpec(noise_amplitude=1.0, seed=1)
        t = np.array([3.0, 1.0, 2.0])
        assert query(spec, 1.0) == query(spec, t)[1]


class TestGenerate:
    def test_matches_query(self):
        spec = SignalSpec((Component(0.3, 2.0, 0.1),), offset=1.0, noise_amplitude=0.01, seed=3)
        us = generate(spec, 4.0, 10.0, start_time=2.0)
        assert len(us) == 40
        assert np.array_equal(us.values, query(spec, us.timestamps))

    def test_short_duration_gives_one_sample(self):
        assert len(generate(SignalSpec(), 10.0, 0.01)) == 1

    def test_two_tone_at_890(self):
        est = estimate_nyquist(generate(two_tone_spec(), 890.0, 1.0))
        assert est == Rate(880.0)

    def test_bad_args(self):
        with pytest.raises(ValueError):
            generate(SignalSpec(), 0.0, 1.0)


class TestTrueNyquist:
    def test_two_tones(self):
        assert true_nyquist(two_tone_spec()) == 880.0

    def test_dc_only(self):
        assert true_nyquist(SignalSpec(offset=3.0)) == 0.0

    def test_per_interval(self):
        spec = SignalSpec((Component(10, 1),), change_events=[ChangeEvent(100.0, (Component(50, 1),))])
        assert true_nyquist(spec, 0, 100) == 20.0
        assert true_nyquist(spec, 100, 200) == 100.0
        assert true_nyquist(spec) == 100.0


def test_temperature_preset_is_slow():
    spec = temperature_like()
    assert spec.offset == 300.0
    assert all(c.frequency <= 1e-3 for c in spec.components)


def test_source_adapter():
    src = SpecSource(two_tone_spec())
    assert src.query(0.0) == 0.0


def test_validation():
    with pytest.raises(ValueError):
        Component(-1.0, 1.0)
    with pytest.raises(ValueError):
        SignalSpec(change_events=[(5.0, []), (1.0, [])])
    with pytest.raises(ValueError):
        SignalSpec(noise_amplitude=-1)


class TestTextFormat:
    text = """\
# header comment
seed = 4
offset = 300
noise_amplitude = 0.1
component = 0.001, 2.0, 0.5   # slow
component = 0.002, 1.0
event = 3600 | 0.01, 1, 0 ; 0.002, 1, 0
event = 7200 |
"""

    def test_parse(self):
        spec = parse_spec(self.text)
        assert spec.seed == 4 and spec.offset == 300.0 and spec.noise_amplitude == 0.1
        assert spec.components == (Component(0.001, 2.0, 0.5), Component(0.002, 1.0, 0.0))
        assert spec.change_events[0] == ChangeEvent(3600.0, (Component(0.01, 1, 0), Component(0.002, 1, 0)))
        assert spec.change_events[1].components == ()

    def test_format_round_trip(self):
        spec = parse_spec(self.text)
        assert parse_spec(format_spec(spec)) == spec

    @pytest.mark.parametrize(
        "text, line",
        [
            ("offset = 1\nbogus = 2\n", 2),
            ("component = 1\n", 1),
            ("\n\nseed = x\n", 3),
            ("event = 5 | 1,1\nevent = 2 | 1,1\n", 2),
            ("no equals here\n", 1),
            ("component = 1, -2\n", 1),
        ],
    )
    def test_errors_carry_line(self, text, line):
        with pytest.raises(ParseError, match=f"spec.txt:{line}:"):
            parse_spec(text, path="spec.txt")

    def test_load(self, tmp_path):
        p = tmp_path / "s.txt"
        p.write_text(self.text)
        assert load_spec(p) == parse_spec(self.text)

import math

import numpy as np
import pytest

from nyqmon.errors import ConfigViolation, HorizonTooShort
from nyqmon.sampler import (
    Mode,
    SamplerConfig,
    SamplerState,
    SamplingLog,
    dual_rates,
    fixed_rate_log,
    run,
    step_window,
    total_cost,
    write_log_csv,
    write_samples_csv,
)
from nyqmon.synth import ChangeEvent, Component, SignalSpec, SpecSource, generate, true_nyquist

W = 21600.0
F = 200 / W  # bin-aligned tone for a 6-hour window


def cfg(**kw):
    base = dict(initial_rate=2.4 * F, min_rate=1e-5, max_rate=1.0)
    base.update(kw)
    return SamplerConfig(**base)


def window_pair(spec, state, config, start=0.0):
    plan = dual_rates(state.current_rate, config)
    return generate(spec, plan.f1, config.window, start), generate(spec, plan.f2, config.window, start)


SLOW = SignalSpec((Component(F, 1.0, 0.3), Component(F / 4, 2.0, 0.1)), offset=5.0)


class TestConfig:
    @pytest.mark.parametrize(
        "kw",
        [
            dict(step=30000.0),
            dict(initial_rate=2.0, max_rate=1.0),
            dict(probe_factor=1.0),
            dict(headroom=0.9),
            dict(decrease_patience=0),
            dict(memory_depth=-1),
            dict(dual_ratio=2.0),
        ],
    )
    def test_invariants(self, kw):
        with pytest.raises(ValueError):
            cfg(**kw)

    def test_defaults(self):
        c = cfg()
        assert (c.window, c.step, c.probe_factor, c.headroom) == (21600.0, 300.0, 2.0, 1.2)
        assert (c.decrease_patience, c.memory_depth, c.dual_ratio, c.alias_threshold) == (3, 8, 1.5, 0.1)


class TestDualRates:
    def test_whole_samples_per_window(self):
        plan = dual_rates(480 / W, cfg())
        assert plan.f2 * W == pytest.approx(480) and plan.f1 * W == pytest.approx(720)

    def test_odd_count_rounds_fast_rate_up(self):
        plan = dual_rates(33 / W, cfg())
        assert plan.f1 * W == pytest.approx(50)

    def test_integer_ratio_is_avoided(self):
        plan = dual_rates(2 / W, cfg())
        assert plan.f1 * W == pytest.approx(3)
        plan = dual_rates(1 / W, cfg())
        assert plan.ratio == pytest.approx(1.5)


class TestStepWindow:
    def test_aliased_probes_up(self):
        c = cfg(initial_rate=60 / W)
        state = SamplerState.initial(c)
        new, rate = step_window(state, window_pair(SLOW, state, c), c)
        assert new.mode is Mode.PROBE and rate == pytest.approx(120 / W)
        assert new.windows_below == 0

    def test_probe_clamped_at_max(self):
        c = cfg(initial_rate=60 / W, max_rate=100 / W)
        state = SamplerState.initial(c)
        _, rate = step_window(state, window_pair(SLOW, state, c), c)
        assert rate == 100 / W

    def test_memory_shortcut(self):
        c = cfg(initial_rate=60 / W)
        state = SamplerState(Mode.STEADY, 60 / W, remembered_max=(400 / W,))
        _, rate = step_window(state, window_pair(SLOW, state, c), c)
        assert rate == pytest.approx(480 / W)

    def test_steady_holds_when_target_not_below(self):
        c = cfg()
        state = SamplerState.initial(c)
        new, rate = step_window(state, window_pair(SLOW, state, c), c)
        assert new.mode is Mode.STEADY and rate == state.current_rate

    def test_decrease_after_patience(self):
        c = cfg(initial_rate=4800 / W)
        state = SamplerState.initial(c)
        rates = []
        for _ in range(c.decrease_patience):
            state, rate = step_window(state, window_pair(SLOW, state, c), c)
            rates.append(rate * W)
        assert rates[:-1] == [4800, 4800]
        assert rates[-1] == pytest.approx(480)

    def test_constant_descends_to_min_rate(self):
        c = cfg(initial_rate=4800 / W, min_rate=100 / W)
        state = SamplerState.initial(c)
        flat = SignalSpec(offset=3.0)
        for _ in range(c.decrease_patience):
            state, rate = step_window(state, window_pair(flat, state, c), c)
        assert rate == c.min_rate

    def test_rates_must_match_state(self):
        c = cfg()
        state = SamplerState.initial(c)
        s1, s2 = window_pair(SLOW, state, c)
        with pytest.raises(ConfigViolation):
            step_window(state, (s2, s1), c)

    def test_short_window_probes(self):
        c = cfg(initial_rate=4 / W)
        state = SamplerState.initial(c)
        new, rate = step_window(state, window_pair(SLOW, state, c), c)
        assert new.mode is Mode.PROBE and rate == pytest.approx(8 / W)

    def test_short_window_at_max_rate_holds(self):
        c = cfg(initial_rate=4 / W, max_rate=4 / W)
        state = SamplerState(Mode.STEADY, 4 / W)
        _, rate = step_window(state, window_pair(SLOW, state, c), c)
        assert rate == 4 / W

    def test_memory_depth_bound(self):
        c = cfg(memory_depth=2)
        state = SamplerState(Mode.STEADY, 4800 / W, remembered_max=(100 / W, 1000 / W), episode_peak=3000 / W)
        for _ in range(c.decrease_patience):
            state, _ = step_window(state, window_pair(SLOW, state, c), c)
        assert len(state.remembered_max) == 2 and state.remembered_max[-1] == pytest.approx(3000 / W)


class TestRun:
    def test_horizon_too_short(self):
        with pytest.raises(HorizonTooShort):
            run(SpecSource(SLOW), cfg(), W - 1)

    def test_probe_steps_match_log2(self):
        # rate starts 16x below headroom x Nyquist
        c = cfg(initial_rate=2.4 * F / 16)
        log = run(SpecSource(SLOW), c, 6 * W)
        modes = [r.mode for r in log.records]
        probes = modes.index(Mode.STEADY)
        assert probes == math.ceil(math.log2(2 * F * c.headroom / c.initial_rate)) == 4
        assert all(m is Mode.PROBE for m in modes[:probes])

    def test_converges_within_probe_factor(self):
        c = cfg(initial_rate=2.4 * F / 5)
        log = run(SpecSource(SLOW), c, 10 * W)
        target = c.headroom * true_nyquist(SLOW)
        final = log.records[-1].next_rate
        assert target * (1 - 1e-9) <= final <= c.probe_factor * target + 1 / W
        used = [r.rate_used for r in log.records]
        probes = [r.mode for r in log.records].index(Mode.STEADY)
        assert used[: probes + 1] == sorted(used[: probes + 1])
        reached = next(i for i, r in enumerate(used) if r >= target * (1 - 1e-9))
        assert min(used[reached:]) >= target * (1 - 1e-9)

    def test_descends_from_100x(self):
        nu = true_nyquist(SLOW)
        c = cfg(initial_rate=100 * nu, max_rate=10.0)
        log = run(SpecSource(SLOW), c, 3 * W)
        decided = [r.next_rate for r in log.records[: c.decrease_patience]]
        assert decided[-1] - c.headroom * nu <= 1 / W + 1e-12
        assert decided[-1] >= c.headroom * nu

    def test_change_event_reenters_probe(self):
        high = SLOW.components + (Component(5 * F, 1.0, 0.2),)
        spec = SignalSpec(SLOW.components, offset=5.0, change_events=[ChangeEvent(4 * W, high)])
        log = run(SpecSource(spec), cfg(), 9 * W)
        first = next(r for r in log.records if r.mode is Mode.PROBE)
        assert 4 * W < first.window_start + W <= 5 * W

    def test_log_invariants(self):
        c = cfg(initial_rate=2.4 * F / 8)
        log = run(SpecSource(SLOW), c, 8 * W)
        assert np.all(np.diff(log.timestamps) > 0)
        assert all(c.min_rate <= r.rate_used <= c.max_rate for r in log.records)
        assert total_cost(log) == log.timestamps.size

    def test_deterministic(self):
        spec = SignalSpec(SLOW.components, noise_amplitude=0.01, seed=5)
        a = run(SpecSource(spec), cfg(initial_rate=0.3 * F), 5 * W)
        b = run(SpecSource(spec), cfg(initial_rate=0.3 * F), 5 * W)
        assert np.array_equal(a.values, b.values) and a.records == b.records

    def test_decisions_follow_step_and_restart(self):
        c = cfg()
        log = run(SpecSource(SLOW), c, 2 * W)
        starts = [r.window_start for r in log.records]
        assert starts[0] == 0.0
        assert np.allclose(np.diff(starts), c.step)


class TestCost:
    def test_empty_log(self):
        assert total_cost(SamplingLog()) == 0

    @pytest.mark.parametrize("rate, horizon", [(0.1, 1000.0), (1 / 300, 86400.0), (0.37, 999.0)])
    def test_fixed_rate(self, rate, horizon):
        cost = total_cost(fixed_rate_log(SpecSource(SLOW), rate, horizon))
        assert abs(cost - rate * horizon) <= 1

    def test_dual_counts_shared_instants_once(self):
        # f2 = 1, f1 = 1.5: every second instant of the fast grid coincides with the slow grid
        cost = total_cost(fixed_rate_log(SpecSource(SLOW), 1.0, 100.0, dual_ratio=1.5))
        assert cost == 200


def test_csv_exports(tmp_path):
    c = cfg(initial_rate=2.4 * F / 4)
    log = run(SpecSource(SLOW), c, 4 * W)
    p = tmp_path / "log.csv"
    write_log_csv(log, p)
    lines = p.read_text().splitlines()
    assert lines[0] == "# window=21600.0 step=300.0"
    header = next(i for i, l in enumerate(lines) if not l.startswith("#"))
    assert lines[header] == "window_start,mode,rate_hz,nyquist_estimate_hz,aliased"
    first = lines[header + 1].split(",")
    assert first[1] == "probe" and first[4] == "true"
    s = tmp_path / "samples.csv"
    write_samples_csv(log, s)
    assert s.read_text().splitlines()[0] == "timestamp,value"
    assert len(s.read_text().splitlines()) == total_cost(log) + 1

import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from wpspec.fourier import GRID_BINS, PsdEstimate, periodogram
from wpspec.metrics import (
    DB_FLOOR,
    BandLabel,
    BandSpec,
    MetricsReport,
    Scenario,
    ScenarioKind,
    band_stats,
    compare,
    evaluate,
    grade,
    mainlobe_width,
    sidelobe_suppression,
    to_db,
    transition_width,
)
from wpspec.signals import make_partial_band, make_tone

GRID = np.linspace(0.0, 1.0, 2049)


def est_from(values, freqs=GRID, desc="x"):
    return PsdEstimate(freqs, values, desc)


class TestBands:
    def test_band_spec_validation(self):
        with pytest.raises(ValueError):
            BandSpec(0.5, 0.4)
        assert BandSpec(0.1, 0.2, "passband").label is BandLabel.PASSBAND

    def test_stats_match_numpy(self, rng):
        v = rng.random(GRID.size) + 0.1
        st_ = band_stats(est_from(v), [BandSpec(0.0, 0.2), BandSpec(0.8, 1.0)])
        mask = (GRID <= 0.2) | (GRID >= 0.8)
        assert st_.count == mask.sum()
        assert st_.mean == pytest.approx(v[mask].mean())
        assert st_.variance == pytest.approx(v[mask].var(ddof=1))
        assert st_.mean_db == pytest.approx(np.mean(10 * np.log10(v[mask])))

    def test_db_floor(self):
        assert to_db([0.0, 1.0, 100.0]).tolist() == [DB_FLOOR, 0.0, 20.0]

    def test_needs_two_points(self):
        with pytest.raises(ValueError, match="at least 2"):
            band_stats(est_from(np.ones(GRID.size)), BandSpec(0.1, 0.1001))


class TestShapes:
    def test_sidelobe_known_curve(self):
        # main lobe with a single sidelobe 20 dB down
        v = np.full(GRID.size, 1e-6)
        c = 1024
        v[c - 5:c + 6] = [1e-3, 0.05, 0.2, 0.5, 0.8, 1.0, 0.8, 0.5, 0.2, 0.05, 1e-3]
        v[c + 40] = 0.01
        assert sidelobe_suppression(est_from(v), 0.5) == pytest.approx(20.0)

    def test_sidelobe_capped(self):
        v = np.zeros(GRID.size)
        v[1024] = 1.0
        assert sidelobe_suppression(est_from(v), 0.5) == 200.0

    def test_peak_hint_checked(self):
        v = np.ones(GRID.size)
        v[100] = 5.0
        with pytest.raises(ValueError, match="not within"):
            mainlobe_width(est_from(v), 0.5)

    @pytest.mark.parametrize("halfwidth", [0, 3, 10])
    def test_mainlobe_width_counts_half_power_points(self, halfwidth):
        v = np.full(GRID.size, 1e-3)
        v[1024 - halfwidth:1024 + halfwidth + 1] = 0.6
        v[1024] = 1.0
        assert mainlobe_width(est_from(v), 0.5) == pytest.approx((2 * halfwidth + 1) / 2048)

    def test_mainlobe_of_bin_centred_tone(self):
        est = periodogram(make_tone(1024, 0.5))
        assert mainlobe_width(est, 0.5) == pytest.approx(est.bin_width)

    @pytest.mark.parametrize("rising", [True, False])
    def test_transition_width_linear_ramp(self, rising):
        lo, hi = 0.01, 1.0
        ramp = np.clip((GRID - 0.2) / 0.1, 0, 1)
        v = lo + (hi - lo) * (ramp if rising else ramp[::-1])
        edge = 0.25 if rising else 0.75
        p3, s3 = hi * 10 ** -0.3, lo * 10 ** 0.3
        expected = (p3 - s3) / (hi - lo) * 0.1
        got = transition_width(est_from(v), edge, hi, lo)
        assert got == pytest.approx(expected, abs=2.5 / 2048)

    def test_transition_width_none_when_flat(self):
        assert transition_width(est_from(np.ones(GRID.size)), 0.5, 2.0, 1.0) is None


class TestScenario:
    def test_partial_band_layout(self):
        s = Scenario.partial_band(0.25, 0.75)
        assert (s.passbands[0].lo, s.passbands[0].hi) == pytest.approx((0.30, 0.70))
        assert [(b.lo, b.hi) for b in s.stopbands] == pytest.approx([(0.0, 0.20), (0.80, 1.0)])
        assert s.edges == (0.25, 0.75)

    def test_single_tone_layout(self):
        s = Scenario.single_tone(0.5)
        assert [(b.lo, b.hi) for b in s.stopbands] == pytest.approx([(0.0, 0.4), (0.6, 1.0)])
        assert s.tone == 0.5


class TestEvaluate:
    def test_partial_band_report(self):
        sig = make_partial_band(4096, 0.25, 0.75, seed=1)
        r = evaluate(periodogram(sig, "hann"), Scenario.partial_band(), sig.source_desc)
        assert r.mean_pass > 1e6 * r.mean_stop
        assert r.transition_width is not None and 0 < r.transition_width <= 0.125
        assert r.mainlobe_width is None
        assert MetricsReport.from_dict(r.to_dict()) == r

    def test_single_tone_report(self):
        r = evaluate(periodogram(make_tone(1024, 0.5)), Scenario.single_tone(0.5))
        assert r.mainlobe_width == pytest.approx(2 / 1024)
        assert r.sidelobe_suppression_db > 100
        assert r.transition_width is None


class TestGrade:
    @pytest.mark.parametrize(
        "base,other,kind,higher,cell",
        [
            (1.0, 3.0, "ratio", False, "+"),
            (3.0, 1.0, "ratio", False, "-"),
            (1.0, 1.9, "ratio", False, "≈"),
            (10.0, 5.0, "db", True, "+"),
            (10.0, 8.0, "db", True, "≈"),
            (-50.0, -40.0, "db", False, "+"),
            (None, 1.0, "ratio", False, "n/a"),
        ],
    )
    def test_cells(self, base, other, kind, higher, cell):
        assert grade(base, other, kind, higher)[0] == cell

    @given(st.floats(1e-6, 1e6), st.floats(1e-6, 1e6))
    def test_antisymmetric(self, a, b):
        flip = {"+": "-", "-": "+", "≈": "≈"}
        assert grade(a, b, "ratio", False)[0] == flip[grade(b, a, "ratio", False)[0]]

    def test_zero_baseline_margin(self):
        assert grade(0.0, 1.0, "ratio", False) == ("+", None)


def _report(desc, **kw):
    base = dict(
        estimator_desc=desc, scenario="partial_band", source="s", mean_pass=1.0, var_pass=1.0,
        mean_pass_db=0.0, var_pass_db=1.0, mean_stop=0.01, var_stop=1e-4, mean_stop_db=-20.0,
        var_stop_db=1.0, sidelobe_suppression_db=20.0, transition_width=0.01,
    )
    base.update(kw)
    return MetricsReport(**base)


class TestCompare:
    def test_table(self):
        t = compare([_report("wp"), _report("pg", var_pass=10.0, sidelobe_suppression_db=30.0)], "wp")
        assert t.rows["pg"]["Variance in pass band"] == "+"
        assert t.rows["pg"]["Side lobe Suppression"] == "-"
        assert t.margins["pg"]["Variance in pass band"] == pytest.approx(10.0)
        assert "wp" not in t.rows
        text = t.to_text()
        assert text.splitlines()[0] == "baseline: wp" and "pg" in text

    def test_rejects_mixed_sources(self):
        with pytest.raises(ValueError, match="different"):
            compare([_report("a"), _report("b", source="t")], "a")

    def test_unknown_baseline(self):
        with pytest.raises(ValueError):
            compare([_report("a")], "zzz")


def test_bins_grid_supported():
    freqs = (np.arange(32) + 0.5) / 32
    v = np.where((freqs > 0.25) & (freqs < 0.75), 2.0, 1e-4)
    r = evaluate(PsdEstimate(freqs, v, "w", GRID_BINS), Scenario.partial_band())
    assert r.scenario == ScenarioKind.PARTIAL_BAND.value
    assert r.sidelobe_suppression_db == pytest.approx(10 * math.log10(2e4))

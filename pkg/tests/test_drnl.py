import numpy as np
import pytest

from conftest import db, steady_rms, tone
from civb.drnl import (
    FilterbankLayout,
    analyze,
    broken_stick,
    drnl_channel,
    gammatone_filter,
    greenwood_frequency,
    greenwood_position,
    lowpass_filter,
    make_filterbank,
)
from civb.signal_io import AudioBuffer

RATE = 20000.0


class TestGammatone:
    def test_unity_gain_at_cf(self):
        out = gammatone_filter(tone(1000.0, RATE, 0.5), 1000.0, 100.0, 3, RATE)
        level = db(steady_rms(out, RATE) * np.sqrt(2.0))
        assert abs(level) <= 1.0

    def test_octave_above_attenuated(self):
        out = gammatone_filter(tone(2000.0, RATE, 0.5), 1000.0, 100.0, 3, RATE)
        assert db(steady_rms(out, RATE) * np.sqrt(2.0)) <= -20.0

    def test_scaling_exact(self):
        x = np.random.default_rng(0).standard_normal(2000)
        ref = gammatone_filter(x, 1000.0, 100.0, 3, RATE)
        np.testing.assert_array_equal(
            gammatone_filter(2.0 * x, 1000.0, 100.0, 3, RATE), 2.0 * ref
        )

    def test_superposition(self):
        rng = np.random.default_rng(1)
        x, y = rng.standard_normal((2, 2000))
        both = gammatone_filter(x + y, 800.0, 120.0, 2, RATE)
        apart = gammatone_filter(x, 800.0, 120.0, 2, RATE) + gammatone_filter(
            y, 800.0, 120.0, 2, RATE
        )
        assert np.abs(both - apart).max() <= 1e-9

    def test_band_edge_rejected(self):
        with pytest.raises(ValueError):
            gammatone_filter(np.zeros(64), 9900.0, 300.0, 2, RATE)


class TestLowpass:
    def test_dc_gain(self):
        out = lowpass_filter(np.ones(int(0.5 * RATE)), 500.0, 4, RATE)
        assert abs(out[-1] - 1.0) <= 1e-3

    def test_stopband(self):
        out = lowpass_filter(tone(2000.0, RATE, 0.5), 500.0, 4, RATE)
        assert db(steady_rms(out, RATE) * np.sqrt(2.0)) <= -24.0

    def test_superposition(self):
        rng = np.random.default_rng(2)
        x, y = rng.standard_normal((2, 2000))
        both = lowpass_filter(x + y, 400.0, 2, RATE)
        apart = lowpass_filter(x, 400.0, 2, RATE) + lowpass_filter(y, 400.0, 2, RATE)
        assert np.abs(both - apart).max() <= 1e-9

    def test_cutoff_must_be_below_nyquist(self):
        with pytest.raises(ValueError):
            lowpass_filter(np.zeros(64), 10000.0, 2, RATE)


class TestBrokenStick:
    def test_zero(self):
        assert broken_stick(np.array([0.0]), 1000.0, 0.1, 0.25)[0] == 0.0

    def test_odd_symmetry(self):
        x = np.random.default_rng(3).standard_normal(100)
        np.testing.assert_allclose(
            broken_stick(-x, 1000.0, 0.1, 0.25),
            -broken_stick(x, 1000.0, 0.1, 0.25),
            atol=0.0,
        )

    def test_linear_branch_value(self):
        y = broken_stick(np.array([1e-6]), 1000.0, 0.1, 0.25)
        assert abs(y[0] - 1e-3) <= 1e-12

    def test_compressive_branch_value(self):
        y = broken_stick(np.array([1.0]), 1000.0, 0.1, 0.25)
        assert abs(y[0] - 0.1) <= 1e-12


class TestDrnlChannel:
    @staticmethod
    def _params():
        return make_filterbank(FilterbankLayout(), RATE)[7]

    def test_zero_input(self):
        out = drnl_channel(np.zeros(1000), self._params(), RATE)
        assert out.shape == (1000,) and not out.any()

    def test_small_signal_homogeneity(self):
        params = self._params()
        probe = tone(params.center_frequency_hz, RATE, 0.25)
        lo = drnl_channel(5e-7 * probe, params, RATE)
        hi = drnl_channel(1e-6 * probe, params, RATE)
        mismatch = steady_rms(hi - 2.0 * lo, RATE) / steady_rms(hi, RATE)
        assert mismatch <= 0.01

    def test_high_level_compression(self):
        params = self._params()
        probe = tone(params.center_frequency_hz, RATE, 0.25)
        out1 = steady_rms(drnl_channel(2e-5 * probe, params, RATE), RATE)
        out2 = steady_rms(drnl_channel(4e-5 * probe, params, RATE), RATE)
        assert out2 < 2.0 * out1

    def test_compression_slope_in_db(self):
        params = self._params()
        probe = tone(params.center_frequency_hz, RATE, 0.25)
        lo = steady_rms(drnl_channel(1e-5 * probe, params, RATE), RATE)
        hi = steady_rms(drnl_channel(1e-4 * probe, params, RATE), RATE)
        slope = db(hi / lo) / 20.0
        assert slope <= params.c + 0.2


class TestMakeFilterbank:
    def test_greenwood_endpoints(self):
        bank = make_filterbank(FilterbankLayout(), RATE)
        assert len(bank) == 16
        cfs = [p.center_frequency_hz for p in bank]
        assert abs(cfs[0] - 250.0) <= 0.1
        assert abs(cfs[-1] - 0.4 * RATE) <= 0.1
        assert np.all(np.diff(cfs) > 0)

    def test_log_spacing_geometric(self):
        layout = FilterbankLayout(num_channels=5, min_cf_hz=250.0, max_cf_hz=4000.0, spacing="log")
        cfs = [p.center_frequency_hz for p in make_filterbank(layout, RATE)]
        np.testing.assert_allclose(cfs, [250.0, 500.0, 1000.0, 2000.0, 4000.0], rtol=1e-9)

    def test_greenwood_map_round_trip(self):
        f = np.array([250.0, 1000.0, 4000.0])
        np.testing.assert_allclose(greenwood_frequency(greenwood_position(f)), f, rtol=1e-12)

    def test_single_channel(self):
        bank = make_filterbank(FilterbankLayout(num_channels=1), RATE)
        assert len(bank) == 1 and bank[0].center_frequency_hz == 250.0

    def test_rejects_unknown_override(self):
        with pytest.raises(ValueError):
            make_filterbank(FilterbankLayout(), RATE, {"bogus": 1.0})

    def test_override_applied(self):
        bank = make_filterbank(FilterbankLayout(), RATE, {"linear_gain": 123.0})
        assert all(p.linear_gain == 123.0 for p in bank)

    def test_rejects_bad_range(self):
        with pytest.raises(ValueError):
            make_filterbank(FilterbankLayout(min_cf_hz=5000.0, max_cf_hz=400.0), RATE)
        with pytest.raises(ValueError):
            make_filterbank(FilterbankLayout(max_cf_hz=11000.0), RATE)


class TestAnalyze:
    def test_zero_input(self):
        bank = make_filterbank(FilterbankLayout(), RATE)
        outs = analyze(AudioBuffer(np.zeros(500), RATE), bank)
        assert len(outs) == 16
        assert all(o.shape == (500,) and not o.any() for o in outs)

    def test_tone_energy_localized_to_neighborhood(self):
        # A small tone at channel k's CF concentrates in channel k or an
        # immediate neighbor (the at-CF lowpass trims each channel's own
        # passband, so an adjacent channel can edge it out); the band
        # edges resolve exactly.
        bank = make_filterbank(FilterbankLayout(), RATE)
        for k in (0, 5, 8, 15):
            cf = bank[k].center_frequency_hz
            probe = AudioBuffer(1e-7 * tone(cf, RATE, 0.4), RATE)
            outs = analyze(probe, bank)
            rmses = [steady_rms(o, RATE, settle_s=0.15) for o in outs]
            winner = int(np.argmax(rmses))
            assert abs(winner - k) <= 1
            if k in (0, 15):
                assert winner == k

    def test_bit_deterministic(self):
        bank = make_filterbank(FilterbankLayout(num_channels=4), RATE)
        buf = AudioBuffer(np.random.default_rng(6).standard_normal(2000) * 0.01, RATE)
        first = analyze(buf, bank)
        second = analyze(buf, bank)
        for a, b in zip(first, second):
            np.testing.assert_array_equal(a, b)

    def test_rate_mismatch_rejected(self):
        bank = make_filterbank(FilterbankLayout(), RATE)
        with pytest.raises(ValueError):
            analyze(AudioBuffer(np.zeros(100), 10000.0), bank)

    def test_empty_bank_rejected(self):
        with pytest.raises(ValueError):
            analyze(AudioBuffer(np.zeros(100), RATE), ())

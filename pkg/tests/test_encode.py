import numpy as np
import pytest

from conftest import dominant_frequency, spectral_centroid, tone
from civb.encode import (
    Electrodogram,
    EncoderConfig,
    analytic_signal,
    envelope_detect,
    pulse_encode,
    ssb_downshift,
)
from civb.metrics import aligned_correlation

RATE = 10000.0


class TestEncoderConfig:
    def test_defaults(self):
        cfg = EncoderConfig()
        assert cfg.envelope_cutoff_hz == 200.0
        assert cfg.envelope_lp_order == 4
        assert cfg.pulses_per_second == 900.0
        assert cfg.pulse_phase_samples == 1
        assert cfg.interleaved

    def test_field_validation(self):
        with pytest.raises(ValueError):
            EncoderConfig(envelope_cutoff_hz=0.0)
        with pytest.raises(ValueError):
            EncoderConfig(envelope_lp_order=0)
        with pytest.raises(ValueError):
            EncoderConfig(pulse_phase_samples=0)

    def test_pulse_rate_feasibility(self):
        EncoderConfig(pulses_per_second=5000.0).validate_at(RATE)
        with pytest.raises(ValueError):
            EncoderConfig(pulses_per_second=5001.0).validate_at(RATE)
        with pytest.raises(ValueError):
            EncoderConfig(pulses_per_second=2501.0, pulse_phase_samples=2).validate_at(RATE)

    def test_envelope_cutoff_below_nyquist(self):
        with pytest.raises(ValueError):
            EncoderConfig(envelope_cutoff_hz=5000.0).validate_at(RATE)


class TestAnalyticSignal:
    def test_unit_envelope_of_tone(self):
        x = np.cos(2.0 * np.pi * 500.0 * np.arange(4000) / RATE)
        mag = np.abs(analytic_signal(x))
        middle = mag[400:3600]
        assert np.abs(middle - 1.0).max() <= 0.01

    def test_real_part_is_input(self):
        x = np.random.default_rng(0).standard_normal(1024)
        assert np.abs(analytic_signal(x).real - x).max() <= 1e-9

    def test_phase_advances_at_tone_rate(self):
        omega = 2.0 * np.pi * 400.0 / RATE
        x = np.cos(omega * np.arange(4000))
        phase = np.unwrap(np.angle(analytic_signal(x)))
        steps = np.diff(phase[400:3600])
        assert np.abs(steps - omega).max() <= 1e-3

    def test_too_short(self):
        with pytest.raises(ValueError):
            analytic_signal(np.array([1.0]))


class TestSsbDownshift:
    def test_tone_at_carrier_lands_at_dc(self):
        x = np.cos(2.0 * np.pi * 1000.0 * np.arange(int(RATE)) / RATE)
        y = ssb_downshift(x, 1000.0, RATE)
        assert spectral_centroid(y, RATE) < 50.0

    def test_offset_tone_lands_at_offset(self):
        x = np.cos(2.0 * np.pi * 1100.0 * np.arange(int(RATE)) / RATE)
        y = ssb_downshift(x, 1000.0, RATE)
        peak, bin_hz = dominant_frequency(y, RATE)
        assert abs(peak - 100.0) <= bin_hz

    def test_zero_input(self):
        assert not ssb_downshift(np.zeros(256), 500.0, RATE).any()

    def test_carrier_range(self):
        with pytest.raises(ValueError):
            ssb_downshift(np.zeros(64), 5000.0, RATE)
        with pytest.raises(ValueError):
            ssb_downshift(np.zeros(64), 0.0, RATE)


class TestEnvelopeDetect:
    def test_zero_input(self):
        assert not envelope_detect(np.zeros(512), EncoderConfig(), RATE).any()

    def test_constant_passthrough(self):
        env = envelope_detect(np.full(int(RATE), 0.4), EncoderConfig(), RATE)
        assert abs(env[-1] - 0.4) <= 1e-3 * 0.4

    def test_tracks_am_modulator(self):
        t = np.arange(int(RATE)) / RATE
        modulator = 1.0 + 0.5 * np.cos(2.0 * np.pi * 50.0 * t)
        env = envelope_detect(
            modulator * np.cos(2.0 * np.pi * 2000.0 * t), EncoderConfig(), RATE
        )
        steady = slice(2000, None)
        r, _ = aligned_correlation(modulator[steady], env[steady], RATE, 0.01)
        assert r >= 0.95
        # the half-wave rectifier keeps 1/pi of the carrier amplitude
        assert abs(env[steady].mean() / modulator[steady].mean() - 1.0 / np.pi) <= 0.05

    def test_nonnegative_output(self):
        x = np.random.default_rng(1).standard_normal(4000)
        assert envelope_detect(x, EncoderConfig(), RATE).min() >= 0.0


class TestPulseEncode:
    def test_zero_envelopes_keep_schedule(self):
        gram = pulse_encode(
            [np.zeros(5000), np.zeros(5000)], EncoderConfig(), [500.0, 1000.0], RATE
        )
        assert gram.num_channels == 2
        for k in range(2):
            assert gram.onsets[k].size > 0
            assert not gram.amplitudes[k].any()

    def test_constant_envelope_rate_and_amplitude(self):
        gram = pulse_encode([np.full(int(RATE), 0.5)], EncoderConfig(), [1000.0], RATE)
        assert abs(gram.onsets[0].size - 900) <= 1
        assert np.all(gram.amplitudes[0] == 0.5)

    def test_every_pulse_charge_balanced(self):
        rng = np.random.default_rng(2)
        envs = [np.abs(rng.standard_normal(4000)) for _ in range(4)]
        cfg = EncoderConfig(pulse_phase_samples=3, pulses_per_second=400.0)
        gram = pulse_encode(envs, cfg, [300.0, 700.0, 1500.0, 3000.0], RATE)
        phase = cfg.pulse_phase_samples
        for k in range(4):
            wave = gram.pulse_waveform(k)
            width = gram.pulse_width_samples
            for onset in gram.onsets[k]:
                # per-phase sums are exact mirrors, so their total cancels
                # bit-exactly even when a naive 6-term sum would not
                pos = wave[onset : onset + phase].sum()
                neg = wave[onset + phase : onset + width].sum()
                assert pos == -neg
                assert pos + neg == 0.0

    def test_interleaved_channels_disjoint(self):
        envs = [np.full(8000, 0.3)] * 6
        gram = pulse_encode(envs, EncoderConfig(), [100.0 * (k + 1) for k in range(6)], RATE)
        seen = np.zeros(8000, dtype=bool)
        width = gram.pulse_width_samples
        for k in range(6):
            for onset in gram.onsets[k]:
                span = slice(onset, onset + width)
                assert not seen[span].any()
                seen[span] = True

    def test_sequential_mode_keeps_requested_rate(self):
        cfg = EncoderConfig(interleaved=False)
        gram = pulse_encode([np.full(int(RATE), 0.5)] * 2, cfg, [500.0, 1000.0], RATE)
        for k in range(2):
            assert abs(gram.onsets[k].size - 900) <= 1

    def test_amplitude_scaling_is_exact(self):
        env = np.abs(np.random.default_rng(3).standard_normal(4000))
        base = pulse_encode([env], EncoderConfig(), [1000.0], RATE)
        scaled = pulse_encode([2.5 * env], EncoderConfig(), [1000.0], RATE)
        np.testing.assert_array_equal(scaled.onsets[0], base.onsets[0])
        np.testing.assert_array_equal(scaled.amplitudes[0], 2.5 * base.amplitudes[0])

    def test_input_validation(self):
        with pytest.raises(ValueError):
            pulse_encode([], EncoderConfig(), [], RATE)
        with pytest.raises(ValueError):
            pulse_encode([np.zeros(10), np.zeros(11)], EncoderConfig(), [1.0, 2.0], RATE)
        with pytest.raises(ValueError):
            pulse_encode([np.zeros(10)], EncoderConfig(), [1.0, 2.0], RATE)
        with pytest.raises(ValueError):
            pulse_encode(
                [np.zeros(100)], EncoderConfig(pulses_per_second=9000.0), [1.0], RATE
            )


class TestElectrodogram:
    def test_rejects_overlapping_pulses(self):
        with pytest.raises(ValueError):
            Electrodogram(
                onsets=(np.array([10, 11]),),
                amplitudes=(np.array([0.1, 0.2]),),
                channel_cf_hz=(1000.0,),
                rate_hz=RATE,
                num_samples=100,
                pulse_phase_samples=1,
                interleaved=False,
            )

    def test_rejects_negative_amplitude(self):
        with pytest.raises(ValueError):
            Electrodogram(
                onsets=(np.array([10]),),
                amplitudes=(np.array([-0.1]),),
                channel_cf_hz=(1000.0,),
                rate_hz=RATE,
                num_samples=100,
                pulse_phase_samples=1,
                interleaved=False,
            )

    def test_rejects_cross_channel_overlap_when_interleaved(self):
        with pytest.raises(ValueError):
            Electrodogram(
                onsets=(np.array([10]), np.array([11])),
                amplitudes=(np.array([0.1]), np.array([0.1])),
                channel_cf_hz=(500.0, 1000.0),
                rate_hz=RATE,
                num_samples=100,
                pulse_phase_samples=1,
                interleaved=True,
            )

    def test_immutable_arrays(self):
        gram = pulse_encode([np.full(1000, 0.5)], EncoderConfig(), [1000.0], RATE)
        with pytest.raises(ValueError):
            gram.amplitudes[0][0] = 1.0

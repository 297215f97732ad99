"""Shared helpers and session fixtures for the test suite."""

import numpy as np
import pytest

from civb.fixtures import synthesize_utterance
from civb.signal_io import AudioBuffer, save_wav
from civb.experiment import PipelineConfig, run_matrix


def tone(freq_hz, rate_hz, duration_s, phase=0.0):
    t = np.arange(int(round(duration_s * rate_hz))) / rate_hz
    return np.sin(2.0 * np.pi * freq_hz * t + phase)


def steady_rms(x, rate_hz, settle_s=0.1):
    """RMS after discarding the filter settle-in region."""
    return float(np.sqrt(np.mean(np.square(x[int(settle_s * rate_hz):]))))


def dominant_frequency(x, rate_hz):
    """Location of the magnitude-spectrum peak (Hann-windowed)."""
    spectrum = np.abs(np.fft.rfft(x * np.hanning(x.size)))
    freqs = np.fft.rfftfreq(x.size, 1.0 / rate_hz)
    return float(freqs[np.argmax(spectrum)]), float(freqs[1] - freqs[0])


def spectral_centroid(x, rate_hz):
    power = np.abs(np.fft.rfft(x * np.hanning(x.size))) ** 2
    freqs = np.fft.rfftfreq(x.size, 1.0 / rate_hz)
    return float(np.sum(freqs * power) / np.sum(power))


def db(ratio):
    return 20.0 * np.log10(ratio)


@pytest.fixture(scope="session")
def short_speech():
    """First 0.8 s of a bundled-style utterance (lead-in plus two bursts)."""
    utt = synthesize_utterance("a")
    n = int(0.8 * utt.sample_rate_hz)
    return AudioBuffer(utt.samples[:n], utt.sample_rate_hz)


@pytest.fixture(scope="session")
def small_cfg():
    return PipelineConfig(sample_rate_hz=10000.0)


@pytest.fixture(scope="session")
def small_report(short_speech, small_cfg):
    """One-rate matrix on the short utterance, shared by report tests."""
    return run_matrix(short_speech, small_cfg, input_path="short_speech")


@pytest.fixture(scope="session")
def cli_wav(tmp_path_factory, short_speech):
    path = tmp_path_factory.mktemp("audio") / "probe.wav"
    save_wav(short_speech, path)
    return path

"""Waveform I/O, rate conversion, babble synthesis, and SNR mixing.

All operations are pure functions; AudioBuffer contents are frozen
(read-only numpy arrays) so values can be shared freely between threads.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

import numpy as np
from scipy.io import wavfile
from scipy.signal import firwin, lfilter, resample_poly

from .errors import FileError, FormatError

INT16_SCALE = 32768.0

# Anti-alias cutoff as a fraction of the lower sample rate. 0.48 keeps a
# tone at 0.98*Nyquist visible (~-12 dB) while content above Nyquist is
# suppressed by >90 dB with the 64-taps-per-phase Kaiser design below.
RESAMPLE_CUTOFF_FRACTION = 0.48
RESAMPLE_TAPS_PER_PHASE = 64
RESAMPLE_KAISER_BETA = 8.6

# Double real pole at this frequency gives the fixed all-pole "speech
# spectrum" used for babble streams: flat below, about -12 dB/oct above.
BABBLE_SHAPE_POLE_HZ = 500.0
BABBLE_RMS = 0.1


def _frozen(samples) -> np.ndarray:
    arr = np.array(samples, dtype=np.float64, copy=True)
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True)
class AudioBuffer:
    """Mono waveform plus sampling rate.

    Samples are dimensionless amplitudes, nominally in [-1, 1]. The array
    is copied and marked read-only on construction, and must be finite.
    """

    samples: np.ndarray
    sample_rate_hz: float

    def __post_init__(self):
        samples = _frozen(self.samples)
        if samples.ndim != 1:
            raise ValueError("AudioBuffer samples must be one-dimensional")
        if samples.size and not np.all(np.isfinite(samples)):
            raise ValueError("AudioBuffer samples must be finite")
        rate = float(self.sample_rate_hz)
        if not rate > 0:
            raise ValueError(f"sample_rate_hz must be positive, got {rate}")
        object.__setattr__(self, "samples", samples)
        object.__setattr__(self, "sample_rate_hz", rate)

    def __len__(self) -> int:
        return self.samples.size

    @property
    def duration_s(self) -> float:
        return self.samples.size / self.sample_rate_hz


@dataclass(frozen=True)
class NoiseSpec:
    """Where interfering noise comes from: seeded synthetic babble or a file."""

    kind: str = "synthetic_babble"
    num_talkers: int = 8
    seed: int = 0
    path: str | None = None

    def __post_init__(self):
        if self.kind not in ("synthetic_babble", "file"):
            raise ValueError(f"unknown noise kind {self.kind!r}")
        if self.kind == "synthetic_babble" and self.num_talkers < 1:
            raise ValueError("synthetic babble needs num_talkers >= 1")
        if self.kind == "file" and not self.path:
            raise ValueError("file noise needs a path")


def load_wav(path) -> AudioBuffer:
    """Read a PCM WAV file as a mono AudioBuffer.

    16-bit integer samples are scaled by 1/32768; 32-bit float is taken
    as-is. Multichannel input is averaged down to mono.
    """
    path = Path(path)
    if not path.is_file():
        raise FileError(f"cannot read WAV file: {path} does not exist")
    try:
        rate, data = wavfile.read(path)
    except OSError as exc:
        raise FileError(f"cannot read WAV file {path}: {exc}") from exc
    except ValueError as exc:
        raise FormatError(f"unsupported WAV file {path}: {exc}") from exc
    if data.dtype == np.int16:
        samples = data.astype(np.float64) / INT16_SCALE
    elif data.dtype in (np.float32, np.float64):
        samples = data.astype(np.float64)
    else:
        raise FormatError(
            f"unsupported sample encoding {data.dtype} in {path}: "
            "expected 16-bit PCM or 32-bit float"
        )
    if samples.ndim == 2:
        samples = samples.mean(axis=1)
    return AudioBuffer(samples, float(rate))


def save_wav(buffer: AudioBuffer, path) -> None:
    """Write a buffer as 16-bit PCM mono WAV, clamping samples to [-1, 1]."""
    path = Path(path)
    clipped = np.clip(buffer.samples, -1.0, 1.0)
    # Symmetric 1/32768 quantization step (matching load_wav) keeps the
    # round-trip error within 2**-15 and int16 data bit-exact; only the
    # unrepresentable +1.0 end is pinned to +32767.
    pcm = np.clip(np.round(clipped * INT16_SCALE), -32768.0, 32767.0).astype(np.int16)
    try:
        wavfile.write(path, int(round(buffer.sample_rate_hz)), pcm)
    except OSError as exc:
        raise FileError(f"cannot write WAV file {path}: {exc}") from exc


def _rational_ratio(target_rate: float, source_rate: float) -> tuple[int, int]:
    frac = Fraction(target_rate / source_rate).limit_denominator(1000)
    return frac.numerator, frac.denominator


def resample(buffer: AudioBuffer, target_rate_hz: float) -> AudioBuffer:
    """Band-limited rate conversion (polyphase, Kaiser windowed-sinc taps).

    Output length is round(n * target/source); content above the target
    Nyquist is removed by the anti-alias filter.
    """
    target_rate_hz = float(target_rate_hz)
    if not target_rate_hz > 0:
        raise ValueError(f"target rate must be positive, got {target_rate_hz}")
    src = buffer.sample_rate_hz
    if target_rate_hz == src:
        return AudioBuffer(buffer.samples, src)
    up, down = _rational_ratio(target_rate_hz, src)
    ntaps = RESAMPLE_TAPS_PER_PHASE * max(up, down) + 1
    cutoff = RESAMPLE_CUTOFF_FRACTION * min(src, target_rate_hz)
    taps = firwin(ntaps, cutoff, window=("kaiser", RESAMPLE_KAISER_BETA), fs=src * up)
    out = resample_poly(buffer.samples, up, down, window=taps)
    n_out = int(round(buffer.samples.size * target_rate_hz / src))
    if out.size < n_out:
        out = np.pad(out, (0, n_out - out.size))
    return AudioBuffer(out[:n_out], target_rate_hz)


def _babble_shaping_denominator(rate_hz: float) -> np.ndarray:
    pole = np.exp(-2.0 * np.pi * BABBLE_SHAPE_POLE_HZ / rate_hz)
    # (1 - p z^-1)^2
    return np.array([1.0, -2.0 * pole, pole * pole])


def synthesize_babble(spec: NoiseSpec, duration_s: float, rate_hz: float) -> AudioBuffer:
    """Seeded multi-talker babble: summed speech-shaped noise streams.

    Each talker is white noise through a fixed all-pole speech-spectrum
    approximation; the sum is normalized to RMS 0.1. Deterministic for a
    given (seed, duration, rate).
    """
    if spec.kind != "synthetic_babble":
        raise ValueError("synthesize_babble requires a synthetic_babble NoiseSpec")
    if not duration_s > 0 or not rate_hz > 0:
        raise ValueError("duration and rate must be positive")
    n = int(round(duration_s * rate_hz))
    warmup = int(round(0.1 * rate_hz))
    a = _babble_shaping_denominator(rate_hz)
    total = np.zeros(n)
    for talker in range(spec.num_talkers):
        rng = np.random.default_rng([spec.seed, talker])
        white = rng.standard_normal(n + warmup)
        shaped = lfilter([1.0], a, white)[warmup:]
        total += shaped
    rms = np.sqrt(np.mean(total**2))
    if rms > 0:
        total *= BABBLE_RMS / rms
    return AudioBuffer(total, rate_hz)


def load_noise(spec: NoiseSpec, duration_s: float, rate_hz: float) -> AudioBuffer:
    """Materialize a NoiseSpec at the given rate, at least duration_s long."""
    if spec.kind == "synthetic_babble":
        return synthesize_babble(spec, duration_s, rate_hz)
    noise = load_wav(spec.path)
    if noise.sample_rate_hz != rate_hz:
        noise = resample(noise, rate_hz)
    if noise.duration_s < duration_s:
        raise ValueError(
            f"noise file {spec.path} is shorter ({noise.duration_s:.2f} s) "
            f"than the speech ({duration_s:.2f} s); looping is not supported"
        )
    return noise


def mix_at_snr(clean: AudioBuffer, noise: AudioBuffer, snr_db: float) -> AudioBuffer:
    """Return clean + g*noise with g chosen so the clean/noise power ratio
    over the full clean extent equals snr_db. Noise is truncated, never looped."""
    if clean.sample_rate_hz != noise.sample_rate_hz:
        raise ValueError(
            f"sample rate mismatch: clean {clean.sample_rate_hz} Hz "
            f"vs noise {noise.sample_rate_hz} Hz"
        )
    n = len(clean)
    if len(noise) < n:
        raise ValueError("noise is shorter than clean; looping is not supported")
    seg = noise.samples[:n]
    p_clean = float(np.mean(clean.samples**2))
    p_noise = float(np.mean(seg**2))
    if p_clean == 0.0:
        raise ValueError("clean signal has zero power")
    if p_noise == 0.0:
        raise ValueError("noise signal has zero power")
    gain = np.sqrt(p_clean / p_noise) * 10.0 ** (-snr_db / 20.0)
    return AudioBuffer(clean.samples + gain * seg, clean.sample_rate_hz)

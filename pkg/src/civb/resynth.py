"""Acoustic reconstruction from an electrodogram (tone vocoder).

Each channel's pulse amplitudes are held between onsets, smoothed back
into a continuous envelope, multiplied by a sinusoid at the channel
center frequency, and summed across channels.
"""

from __future__ import annotations

import numpy as np
from scipy.signal import lfilter

from .encode import Electrodogram
from .signal_io import AudioBuffer

SMOOTHING_CUTOFF_HZ = 200.0
PEAK_NORM = 0.9


def _smooth(x: np.ndarray, rate_hz: float) -> np.ndarray:
    # two identical one-pole sections: monotone step response, no
    # overshoot between pulse levels
    p = np.exp(-2.0 * np.pi * SMOOTHING_CUTOFF_HZ / rate_hz)
    b, a = [1.0 - p], [1.0, -p]
    return lfilter(b, a, lfilter(b, a, x))


def pulses_to_envelope(gram: Electrodogram, channel: int) -> np.ndarray:
    """Zero-order hold of a channel's pulse amplitudes, lowpass-refined.

    The envelope is zero before the first pulse, holds each amplitude
    until the next onset, and is smoothed at 200 Hz to remove the hold
    steps.
    """
    if not 0 <= channel < gram.num_channels:
        raise IndexError(f"channel {channel} out of range")
    onsets = gram.onsets[channel]
    amps = gram.amplitudes[channel]
    held = np.zeros(gram.num_samples)
    if onsets.size:
        bounds = np.append(onsets, gram.num_samples)
        held[onsets[0] :] = np.repeat(amps, np.diff(bounds))
    return _smooth(held, gram.rate_hz)


def synthesize(gram: Electrodogram) -> AudioBuffer:
    """Tone-vocoder resynthesis of the electrodogram.

    Per channel: smoothed envelope times a unit sinusoid at the channel
    CF (zero initial phase); channels are summed and the result is
    peak-normalized to 0.9. Silent input stays silent.
    """
    if gram.num_channels == 0:
        raise ValueError("electrodogram has no channels")
    t = np.arange(gram.num_samples) / gram.rate_hz
    out = np.zeros(gram.num_samples)
    for k, cf in enumerate(gram.channel_cf_hz):
        out += pulses_to_envelope(gram, k) * np.sin(2.0 * np.pi * cf * t)
    peak = float(np.max(np.abs(out))) if out.size else 0.0
    if peak > 0.0:
        out *= PEAK_NORM / peak
    return AudioBuffer(out, gram.rate_hz)

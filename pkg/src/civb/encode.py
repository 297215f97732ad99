"""Channel encoding: SSB downshift, envelope detection, biphasic pulses.

Each DRNL channel is translated down to baseband by its center frequency
(single-sideband via the analytic signal), envelope-detected, and sampled
into a charge-balanced biphasic pulse train. In interleaved mode the
channels fire round-robin in dedicated time slots, so no two channels are
ever active in the same sample.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.signal import hilbert

from .drnl import lowpass_filter


@dataclass(frozen=True)
class EncoderConfig:
    envelope_cutoff_hz: float = 200.0
    envelope_lp_order: int = 4
    pulses_per_second: float = 900.0
    pulse_phase_samples: int = 1
    interleaved: bool = True

    def __post_init__(self):
        if not self.envelope_cutoff_hz > 0:
            raise ValueError("envelope_cutoff_hz must be positive")
        if self.envelope_lp_order < 1:
            raise ValueError("envelope_lp_order must be >= 1")
        if not self.pulses_per_second > 0:
            raise ValueError("pulses_per_second must be positive")
        if self.pulse_phase_samples < 1:
            raise ValueError("pulse_phase_samples must be >= 1")

    def validate_at(self, rate_hz: float) -> None:
        if self.envelope_cutoff_hz >= rate_hz / 2.0:
            raise ValueError(
                f"envelope cutoff {self.envelope_cutoff_hz} Hz must be below "
                f"Nyquist ({rate_hz / 2.0} Hz)"
            )
        max_pps = rate_hz / (2.0 * self.pulse_phase_samples)
        if self.pulses_per_second > max_pps:
            raise ValueError(
                f"pulse rate {self.pulses_per_second} pps infeasible at "
                f"{rate_hz} Hz with {self.pulse_phase_samples}-sample phases "
                f"(max {max_pps})"
            )


@dataclass(frozen=True)
class Electrodogram:
    """Per-channel biphasic pulse trains.

    onsets[k] and amplitudes[k] describe channel k's pulses; a pulse at
    onset o with amplitude A occupies samples [o, o + 2*phase): +A for the
    first phase, -A for the second, so each pulse sums to zero exactly.
    """

    onsets: tuple
    amplitudes: tuple
    channel_cf_hz: tuple
    rate_hz: float
    num_samples: int
    pulse_phase_samples: int
    interleaved: bool

    def __post_init__(self):
        if len(self.onsets) != len(self.amplitudes) or len(self.onsets) != len(
            self.channel_cf_hz
        ):
            raise ValueError("per-channel field lengths disagree")
        if not self.rate_hz > 0 or self.num_samples < 0 or self.pulse_phase_samples < 1:
            raise ValueError("invalid Electrodogram geometry")
        width = self.pulse_width_samples
        frozen_on, frozen_amp = [], []
        for k, (on, amp) in enumerate(zip(self.onsets, self.amplitudes)):
            on = np.asarray(on, dtype=np.int64).copy()
            amp = np.asarray(amp, dtype=np.float64).copy()
            if on.shape != amp.shape or on.ndim != 1:
                raise ValueError(f"channel {k}: onset/amplitude shape mismatch")
            if on.size:
                if on[0] < 0 or on[-1] + width > self.num_samples:
                    raise ValueError(f"channel {k}: pulse outside the sample range")
                if np.any(np.diff(on) < width):
                    raise ValueError(f"channel {k}: overlapping pulses")
            if np.any(~np.isfinite(amp)) or np.any(amp < 0):
                raise ValueError(f"channel {k}: amplitudes must be finite and >= 0")
            on.flags.writeable = False
            amp.flags.writeable = False
            frozen_on.append(on)
            frozen_amp.append(amp)
        if self.interleaved:
            all_on = np.concatenate(frozen_on) if frozen_on else np.array([], dtype=np.int64)
            all_on = np.sort(all_on)
            if np.any(np.diff(all_on) < width):
                raise ValueError("interleaved electrodogram has cross-channel overlap")
        object.__setattr__(self, "onsets", tuple(frozen_on))
        object.__setattr__(self, "amplitudes", tuple(frozen_amp))
        object.__setattr__(self, "channel_cf_hz", tuple(float(f) for f in self.channel_cf_hz))

    @property
    def num_channels(self) -> int:
        return len(self.onsets)

    @property
    def pulse_width_samples(self) -> int:
        return 2 * self.pulse_phase_samples

    def pulse_waveform(self, channel: int) -> np.ndarray:
        """Render one channel's pulse train as a sample waveform."""
        if not 0 <= channel < self.num_channels:
            raise IndexError(f"channel {channel} out of range")
        wave = np.zeros(self.num_samples)
        phase = self.pulse_phase_samples
        for onset, amp in zip(self.onsets[channel], self.amplitudes[channel]):
            wave[onset : onset + phase] = amp
            wave[onset + phase : onset + 2 * phase] = -amp
        return wave


def analytic_signal(x) -> np.ndarray:
    """x + j*H(x), the frequency-domain analytic signal."""
    x = np.asarray(x, dtype=np.float64)
    if x.size < 2:
        raise ValueError("analytic_signal needs at least 2 samples")
    return hilbert(x)


def ssb_downshift(x, carrier_hz: float, rate_hz: float) -> np.ndarray:
    """Single-sideband downward translation by carrier_hz.

    Returns Re(analytic(x) * exp(-j*2*pi*carrier*n/rate)): content at
    carrier_hz lands at DC with within-band fine structure preserved.
    """
    if not 0 < carrier_hz < rate_hz / 2.0:
        raise ValueError(
            f"carrier {carrier_hz} Hz must lie in (0, Nyquist={rate_hz / 2.0} Hz)"
        )
    x = np.asarray(x, dtype=np.float64)
    n = np.arange(x.size)
    return np.real(analytic_signal(x) * np.exp(-2j * np.pi * carrier_hz * n / rate_hz))


def envelope_detect(x, cfg: EncoderConfig, rate_hz: float) -> np.ndarray:
    """Half-wave rectification, lowpass smoothing, then a clamp at zero."""
    cfg.validate_at(rate_hz)
    rectified = np.maximum(np.asarray(x, dtype=np.float64), 0.0)
    smoothed = lowpass_filter(rectified, cfg.envelope_cutoff_hz, cfg.envelope_lp_order, rate_hz)
    return np.maximum(smoothed, 0.0)


def _interleaved_onsets(
    channel: int, num_channels: int, period: float, width: int, num_samples: int
) -> np.ndarray:
    """Round-robin slot schedule: channel k owns slot k of every width*N
    cycle, firing in the earliest owned slot at or after each ideal onset
    j*period (never reusing a slot). Cross-channel disjointness is
    guaranteed by slot ownership."""
    cycle = num_channels * width
    base = channel * width
    onsets = []
    m_prev = -1
    j = 0
    while True:
        m = max(m_prev + 1, math.ceil((j * period - base) / cycle))
        onset = base + m * cycle
        if onset + width > num_samples:
            break
        onsets.append(onset)
        m_prev = m
        j += 1
    return np.array(onsets, dtype=np.int64)


def _sequential_onsets(period: float, width: int, num_samples: int) -> np.ndarray:
    onsets = []
    prev = -width
    j = 0
    while True:
        onset = max(int(round(j * period)), prev + width)
        if onset + width > num_samples:
            break
        onsets.append(onset)
        prev = onset
        j += 1
    return np.array(onsets, dtype=np.int64)


def pulse_encode(envelopes, cfg: EncoderConfig, cfs, rate_hz: float) -> Electrodogram:
    """Sample per-channel envelopes into biphasic pulse trains.

    Each pulse's amplitude is the envelope value at its onset sample. In
    interleaved mode the requested rate is quantized to the round-robin
    slot grid, so the effective per-channel rate is
    min(pulses_per_second, rate_hz / (2*phase*num_channels)).
    """
    cfg.validate_at(rate_hz)
    envelopes = [np.asarray(e, dtype=np.float64) for e in envelopes]
    if not envelopes:
        raise ValueError("no envelopes to encode")
    n = envelopes[0].size
    if any(e.ndim != 1 or e.size != n for e in envelopes):
        raise ValueError("all envelopes must be one-dimensional and equal-length")
    cfs = tuple(float(f) for f in cfs)
    if len(cfs) != len(envelopes):
        raise ValueError(f"{len(envelopes)} envelopes but {len(cfs)} center frequencies")
    width = 2 * cfg.pulse_phase_samples
    period = rate_hz / cfg.pulses_per_second
    onsets, amplitudes = [], []
    for k, env in enumerate(envelopes):
        if cfg.interleaved:
            on = _interleaved_onsets(k, len(envelopes), period, width, n)
        else:
            on = _sequential_onsets(period, width, n)
        onsets.append(on)
        amplitudes.append(env[on] if on.size else np.array([]))
    return Electrodogram(
        onsets=tuple(onsets),
        amplitudes=tuple(amplitudes),
        channel_cf_hz=cfs,
        rate_hz=float(rate_hz),
        num_samples=n,
        pulse_phase_samples=cfg.pulse_phase_samples,
        interleaved=cfg.interleaved,
    )

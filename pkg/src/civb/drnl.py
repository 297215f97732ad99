"""Dual resonance nonlinear (DRNL) filterbank.

Each channel sums two paths driven by the same input: a linear path
(gain -> gammatone cascade -> lowpass cascade) and a nonlinear path
(gammatone cascade -> broken-stick compression -> gammatone cascade ->
lowpass cascade). At low levels the nonlinear path dominates and the
channel is linear; at moderate levels its compressive branch engages.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.signal import butter, sosfilt

# Default per-channel parameters. Bandwidths scale with the channel CF;
# near Nyquist they are capped so every gammatone stays realizable.
DEFAULT_LINEAR_GAIN = 200.0
DEFAULT_LINEAR_GT_CASCADE = 2
DEFAULT_LINEAR_LP_CASCADE = 4
DEFAULT_NONLINEAR_GT_CASCADE = 3
DEFAULT_NONLINEAR_LP_CASCADE = 3
DEFAULT_A = 1000.0
DEFAULT_B = 0.1
DEFAULT_C = 0.25
LINEAR_BW_FRACTION = 0.3
NONLINEAR_BW_FRACTION = 0.25
BW_NYQUIST_MARGIN = 0.98

GREENWOOD_SCALE_HZ = 165.4
GREENWOOD_SLOPE = 2.1
GREENWOOD_OFFSET = 0.88


@dataclass(frozen=True)
class DrnlChannelParams:
    """One channel's filter constants.

    a is the low-level slope of the broken-stick element, b its
    compressive scale, c the compression exponent. design_rate_hz records
    the sample rate the channel was built for.
    """

    center_frequency_hz: float
    linear_gain: float
    linear_gt_cascade: int
    linear_lp_cascade: int
    linear_cf_hz: float
    linear_bw_hz: float
    nonlinear_gt_cascade: int
    nonlinear_lp_cascade: int
    nonlinear_cf_hz: float
    nonlinear_bw_hz: float
    a: float
    b: float
    c: float
    design_rate_hz: float | None = None

    def __post_init__(self):
        for name in (
            "center_frequency_hz",
            "linear_gain",
            "linear_cf_hz",
            "linear_bw_hz",
            "nonlinear_cf_hz",
            "nonlinear_bw_hz",
            "a",
            "b",
        ):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")
        for name in (
            "linear_gt_cascade",
            "linear_lp_cascade",
            "nonlinear_gt_cascade",
            "nonlinear_lp_cascade",
        ):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be >= 1")
        if not 0.0 < self.c <= 1.0:
            raise ValueError(f"c must be in (0, 1], got {self.c}")


@dataclass(frozen=True)
class FilterbankLayout:
    """Channel placement. max_cf_hz=None means 0.4 x sample rate."""

    num_channels: int = 16
    min_cf_hz: float = 250.0
    max_cf_hz: float | None = None
    spacing: str = "greenwood"

    def __post_init__(self):
        if self.num_channels < 1:
            raise ValueError("num_channels must be >= 1")
        if not self.min_cf_hz > 0:
            raise ValueError("min_cf_hz must be positive")
        if self.spacing not in ("greenwood", "log"):
            raise ValueError(f"unknown spacing {self.spacing!r}")


def greenwood_frequency(x) -> np.ndarray:
    """Cochlear place (0=apex, 1=base) to frequency in Hz."""
    return GREENWOOD_SCALE_HZ * (10.0 ** (GREENWOOD_SLOPE * np.asarray(x)) - GREENWOOD_OFFSET)


def greenwood_position(f_hz) -> np.ndarray:
    """Inverse of greenwood_frequency."""
    return np.log10(np.asarray(f_hz) / GREENWOOD_SCALE_HZ + GREENWOOD_OFFSET) / GREENWOOD_SLOPE


def _gammatone_sos(cf_hz: float, bw_hz: float, rate_hz: float, order: int) -> np.ndarray:
    theta = 2.0 * np.pi * cf_hz / rate_hz
    r = np.exp(-2.0 * np.pi * bw_hz / rate_hz)
    a1 = -2.0 * r * np.cos(theta)
    a2 = r * r
    # normalize each section to unity gain at cf
    z = np.exp(-1j * theta)
    gain = np.abs(1.0 + a1 * z + a2 * z * z)
    section = np.array([gain, 0.0, 0.0, 1.0, a1, a2])
    return np.tile(section, (order, 1))


def gammatone_filter(signal, cf_hz: float, bw_hz: float, order: int, rate_hz: float):
    """Cascade of `order` identical second-order resonator sections.

    The cascade realizes a gammatone response centered at cf_hz with
    per-section pole bandwidth bw_hz, normalized to unity gain at cf_hz.
    """
    if order < 1:
        raise ValueError("order must be >= 1")
    if not (cf_hz > 0 and bw_hz > 0):
        raise ValueError("cf_hz and bw_hz must be positive")
    if cf_hz + bw_hz >= rate_hz / 2.0:
        raise ValueError(
            f"cf {cf_hz} Hz + bw {bw_hz} Hz must stay below Nyquist ({rate_hz / 2.0} Hz)"
        )
    x = np.asarray(signal, dtype=np.float64)
    return sosfilt(_gammatone_sos(cf_hz, bw_hz, rate_hz, order), x)


def lowpass_filter(signal, cutoff_hz: float, order: int, rate_hz: float):
    """Butterworth lowpass of the given order, run as second-order sections."""
    if order < 1:
        raise ValueError("order must be >= 1")
    if not 0 < cutoff_hz < rate_hz / 2.0:
        raise ValueError(
            f"cutoff {cutoff_hz} Hz must lie in (0, Nyquist={rate_hz / 2.0} Hz)"
        )
    sos = butter(order, cutoff_hz, fs=rate_hz, output="sos")
    return sosfilt(sos, np.asarray(signal, dtype=np.float64))


def _lowpass_cascade(x, cutoff_hz: float, sections: int, rate_hz: float):
    """Cascade of identical second-order Butterworth sections (the DRNL
    path smoothing; distinct from a single higher-order Butterworth)."""
    sos = butter(2, cutoff_hz, fs=rate_hz, output="sos")
    return sosfilt(np.tile(sos, (sections, 1)), x)


def broken_stick(x, a: float, b: float, c: float):
    """Elementwise sign(x) * min(a|x|, b|x|^c): linear below the knee,
    compressive above it."""
    if not (a > 0 and b > 0):
        raise ValueError("a and b must be positive")
    if not 0.0 < c <= 1.0:
        raise ValueError(f"c must be in (0, 1], got {c}")
    x = np.asarray(x, dtype=np.float64)
    mag = np.abs(x)
    return np.sign(x) * np.minimum(a * mag, b * mag**c)


def drnl_channel(signal, params: DrnlChannelParams, rate_hz: float):
    """Run one DRNL channel: linear path + nonlinear path, summed."""
    x = np.asarray(signal, dtype=np.float64)
    lin = gammatone_filter(
        params.linear_gain * x,
        params.linear_cf_hz,
        params.linear_bw_hz,
        params.linear_gt_cascade,
        rate_hz,
    )
    lin = _lowpass_cascade(lin, params.linear_cf_hz, params.linear_lp_cascade, rate_hz)
    nl = gammatone_filter(
        x,
        params.nonlinear_cf_hz,
        params.nonlinear_bw_hz,
        params.nonlinear_gt_cascade,
        rate_hz,
    )
    nl = broken_stick(nl, params.a, params.b, params.c)
    nl = gammatone_filter(
        nl,
        params.nonlinear_cf_hz,
        params.nonlinear_bw_hz,
        params.nonlinear_gt_cascade,
        rate_hz,
    )
    nl = _lowpass_cascade(nl, params.nonlinear_cf_hz, params.nonlinear_lp_cascade, rate_hz)
    return lin + nl


def _channel_params(cf: float, rate_hz: float, overrides: dict) -> DrnlChannelParams:
    nyq = rate_hz / 2.0
    bw_cap = BW_NYQUIST_MARGIN * nyq - cf
    if bw_cap <= 0:
        raise ValueError(f"channel at {cf} Hz sits too close to Nyquist ({nyq} Hz)")
    lin_frac = overrides.get("linear_bw_fraction", LINEAR_BW_FRACTION)
    nl_frac = overrides.get("nonlinear_bw_fraction", NONLINEAR_BW_FRACTION)
    params = DrnlChannelParams(
        center_frequency_hz=cf,
        linear_gain=overrides.get("linear_gain", DEFAULT_LINEAR_GAIN),
        linear_gt_cascade=overrides.get("linear_gt_cascade", DEFAULT_LINEAR_GT_CASCADE),
        linear_lp_cascade=overrides.get("linear_lp_cascade", DEFAULT_LINEAR_LP_CASCADE),
        linear_cf_hz=cf,
        linear_bw_hz=min(lin_frac * cf, bw_cap),
        nonlinear_gt_cascade=overrides.get(
            "nonlinear_gt_cascade", DEFAULT_NONLINEAR_GT_CASCADE
        ),
        nonlinear_lp_cascade=overrides.get(
            "nonlinear_lp_cascade", DEFAULT_NONLINEAR_LP_CASCADE
        ),
        nonlinear_cf_hz=cf,
        nonlinear_bw_hz=min(nl_frac * cf, bw_cap),
        a=overrides.get("a", DEFAULT_A),
        b=overrides.get("b", DEFAULT_B),
        c=overrides.get("c", DEFAULT_C),
        design_rate_hz=rate_hz,
    )
    return params


DRNL_OVERRIDE_KEYS = (
    "linear_gain",
    "linear_gt_cascade",
    "linear_lp_cascade",
    "nonlinear_gt_cascade",
    "nonlinear_lp_cascade",
    "linear_bw_fraction",
    "nonlinear_bw_fraction",
    "a",
    "b",
    "c",
)


def make_filterbank(
    layout: FilterbankLayout, rate_hz: float, overrides: dict | None = None
) -> tuple[DrnlChannelParams, ...]:
    """Build the per-channel parameter table for a layout at a sample rate.

    Greenwood spacing places channels uniformly on the cochlear place
    axis between the positions of min_cf and max_cf; log spacing uses a
    geometric CF sequence. `overrides` may replace any DRNL_OVERRIDE_KEYS
    default for every channel.
    """
    if not rate_hz > 0:
        raise ValueError("rate_hz must be positive")
    overrides = dict(overrides or {})
    unknown = set(overrides) - set(DRNL_OVERRIDE_KEYS)
    if unknown:
        raise ValueError(f"unknown DRNL overrides: {sorted(unknown)}")
    nyq = rate_hz / 2.0
    max_cf = layout.max_cf_hz if layout.max_cf_hz is not None else 0.4 * rate_hz
    if not layout.min_cf_hz < max_cf < nyq:
        raise ValueError(
            f"need min_cf < max_cf < Nyquist, got {layout.min_cf_hz}, {max_cf}, {nyq}"
        )
    n = layout.num_channels
    if n == 1:
        cfs = np.array([layout.min_cf_hz])
    elif layout.spacing == "greenwood":
        positions = np.linspace(
            greenwood_position(layout.min_cf_hz), greenwood_position(max_cf), n
        )
        cfs = greenwood_frequency(positions)
    else:
        cfs = layout.min_cf_hz * (max_cf / layout.min_cf_hz) ** (np.arange(n) / (n - 1))
    if np.any(np.diff(cfs) <= 0):
        raise ValueError("channel center frequencies must be strictly increasing")
    return tuple(_channel_params(float(cf), rate_hz, overrides) for cf in cfs)


def analyze(signal, bank) -> list[np.ndarray]:
    """Run every channel of the bank over the signal (an AudioBuffer)."""
    if not bank:
        raise ValueError("filterbank is empty")
    rate = signal.sample_rate_hz
    for params in bank:
        if params.design_rate_hz is not None and params.design_rate_hz != rate:
            raise ValueError(
                f"filterbank built for {params.design_rate_hz} Hz "
                f"applied to a {rate} Hz signal"
            )
    return [drnl_channel(signal.samples, params, rate) for params in bank]

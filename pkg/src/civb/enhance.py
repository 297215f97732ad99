"""Kalman speech enhancement on an autoregressive voice model, plus preemphasis.

The enhancer treats clean speech as a frame-wise AR(p) process. Per frame
the AR coefficients are fitted by Levinson-Durbin, the signal is run
through a predict/update Kalman recursion in companion-matrix form
(state = the last p clean-sample estimates), and the whole pass is
repeated with AR models refitted on the previous pass's output.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NumericError
from .signal_io import AudioBuffer

DEFAULT_PREEMPHASIS_ALPHA = 0.97


def default_ar_order(rate_hz: float) -> int:
    """AR model order rule of thumb: 10 up to 10 kHz, 16 above."""
    return 10 if rate_hz <= 10000.0 else 16


@dataclass(frozen=True)
class KalmanConfig:
    """Settings for kalman_enhance. ar_order=None picks default_ar_order."""

    ar_order: int | None = None
    frame_ms: float = 20.0
    iterations: int = 2
    noise_estimate_ms: float = 100.0
    noise_variance_override: float | None = None

    def __post_init__(self):
        if self.ar_order is not None and self.ar_order < 1:
            raise ValueError("ar_order must be >= 1")
        if not self.frame_ms > 0:
            raise ValueError("frame_ms must be positive")
        if self.iterations < 1:
            raise ValueError("iterations must be >= 1")
        if not self.noise_estimate_ms > 0:
            raise ValueError("noise_estimate_ms must be positive")
        if self.noise_variance_override is not None and self.noise_variance_override < 0:
            raise ValueError("noise_variance_override must be nonnegative")


@dataclass
class KalmanState:
    """Snapshot of the filter after a frame (exposed for inspection hooks).

    ar_coefficients follow the positive convention
    s[n] = sum_i a_i * s[n-i] + e[n]; state holds the last p clean-sample
    estimates, oldest first.
    """

    ar_coefficients: np.ndarray
    state: np.ndarray
    covariance: np.ndarray
    process_variance: float
    measurement_variance: float


def estimate_noise_variance(noisy: AudioBuffer, cfg: KalmanConfig) -> float:
    """Measurement-noise variance: the override if set, else the sample
    variance of the leading noise_estimate_ms of signal (assumed speech-free)."""
    if cfg.noise_variance_override is not None:
        return float(cfg.noise_variance_override)
    n_lead = int(round(cfg.noise_estimate_ms * noisy.sample_rate_hz / 1000.0))
    if len(noisy) < n_lead:
        raise ValueError(
            f"buffer too short for noise estimation: {len(noisy)} samples "
            f"< {n_lead} ({cfg.noise_estimate_ms} ms lead-in)"
        )
    return float(np.var(noisy.samples[:n_lead]))


def _autocorrelation(x: np.ndarray, order: int) -> np.ndarray:
    n = x.size
    return np.array([np.dot(x[: n - k], x[k:]) for k in range(order + 1)]) / n


def lpc_coefficients(frame, order: int) -> tuple[np.ndarray, float]:
    """Levinson-Durbin AR fit of a frame.

    Returns (a, residual_variance) with a in the positive convention
    s[n] = sum_i a_i s[n-i] + e[n]. The frame mean is removed before the
    autocorrelation so residual_variance is bounded by the frame variance.
    Unstable fits are repaired by reflecting runaway poles inside the
    unit circle.
    """
    frame = np.asarray(frame, dtype=np.float64)
    if order < 1:
        raise ValueError("order must be >= 1")
    if frame.size <= order:
        raise ValueError(f"frame length {frame.size} must exceed order {order}")
    centered = frame - frame.mean()
    r = _autocorrelation(centered, order)
    if not r[0] > 0:
        raise NumericError("lpc", "silent frame has no AR structure to fit")
    a = np.zeros(order)
    err = r[0]
    for m in range(1, order + 1):
        acc = r[m] - np.dot(a[: m - 1], r[m - 1 : 0 : -1])
        if err <= 0:
            break
        k = acc / err
        a_prev = a[: m - 1].copy()
        a[: m - 1] = a_prev - k * a_prev[::-1]
        a[m - 1] = k
        err *= 1.0 - k * k
    err = max(float(err), 0.0)
    return _stabilize(a), err


def _stabilize(a: np.ndarray) -> np.ndarray:
    """Reflect any pole of 1 - sum a_i z^-i outside the unit circle to its
    conjugate-reciprocal position."""
    poly = np.concatenate(([1.0], -a))
    roots = np.roots(poly)
    mags = np.abs(roots)
    if not np.any(mags > 1.0):
        return a
    outside = mags > 1.0
    roots[outside] = roots[outside] / mags[outside] ** 2
    repaired = np.real(np.poly(roots))
    return -repaired[1:]


def _kalman_pass(
    y: np.ndarray,
    ar_source: np.ndarray,
    p: int,
    frame_len: int,
    R: float,
    on_frame=None,
) -> np.ndarray:
    n = y.size
    out = np.empty_like(y)
    warm = min(p, n)
    out[:warm] = y[:warm]
    if n <= p:
        return out
    state = y[:p].copy()
    P = np.eye(p) * (R + 1e-6)
    prev_model = None
    for start in range(0, n, frame_len):
        end = min(start + frame_len, n)
        frame = ar_source[start:end]
        if frame.size > p:
            try:
                model = lpc_coefficients(frame, p)
            except NumericError:
                model = None
        else:
            # tail too short to fit; reuse the last frame's model
            model = prev_model
        if model is None:
            # silent frame: bypass the filter, keep the state consistent
            lo = max(start, p)
            out[lo:end] = y[lo:end]
            state = out[end - p : end].copy()
            prev_model = None
            continue
        a, q = model
        prev_model = model
        a_rev = np.ascontiguousarray(a[::-1])
        for t in range(max(start, p), end):
            v = P @ a_rev
            s_pred = float(a_rev @ state)
            ppp = float(a_rev @ v) + q
            Pm = np.empty_like(P)
            Pm[:-1, :-1] = P[1:, 1:]
            Pm[:-1, -1] = v[1:]
            Pm[-1, :-1] = v[1:]
            Pm[-1, -1] = ppp
            xm = np.empty(p)
            xm[:-1] = state[1:]
            xm[-1] = s_pred
            S = ppp + R
            if S > 0:
                K = Pm[:, -1] / S
            else:
                K = np.zeros(p)
                K[-1] = 1.0
            state = xm + K * (y[t] - s_pred)
            B = Pm - np.outer(K, Pm[-1, :])
            P = B - np.outer(B[:, -1], K)
            if R > 0:
                P += R * np.outer(K, K)
            P = 0.5 * (P + P.T)
            out[t] = state[-1]
        if on_frame is not None:
            on_frame(KalmanState(a.copy(), state.copy(), P.copy(), float(q), R))
    return out


def kalman_enhance(noisy: AudioBuffer, cfg: KalmanConfig, on_frame=None) -> AudioBuffer:
    """Iterative AR-model Kalman enhancement.

    Iteration 1 fits AR models on the noisy signal; later iterations
    refit on the previous iteration's output. The measurements are always
    the noisy samples. `on_frame`, if given, receives a KalmanState
    snapshot after each frame of the final iteration.
    """
    rate = noisy.sample_rate_hz
    y = np.asarray(noisy.samples, dtype=np.float64)
    p = cfg.ar_order if cfg.ar_order is not None else default_ar_order(rate)
    frame_len = int(round(cfg.frame_ms * rate / 1000.0))
    if frame_len <= p:
        raise ValueError(
            f"ar_order {p} must be smaller than the frame length {frame_len}"
        )
    if y.size < frame_len:
        raise ValueError(f"signal ({y.size} samples) shorter than one frame ({frame_len})")
    R = estimate_noise_variance(noisy, cfg)
    out = y
    for it in range(cfg.iterations):
        ar_source = y if it == 0 else out
        hook = on_frame if it == cfg.iterations - 1 else None
        out = _kalman_pass(y, ar_source, p, frame_len, R, hook)
    return AudioBuffer(out, rate)


def preemphasize(signal: AudioBuffer, alpha: float = DEFAULT_PREEMPHASIS_ALPHA) -> AudioBuffer:
    """First-order high-pass differencing: y[0] = x[0], y[n] = x[n] - alpha*x[n-1]."""
    if not 0.0 <= alpha < 1.0:
        raise ValueError(f"alpha must be in [0, 1), got {alpha}")
    x = signal.samples
    y = x.copy()
    if y.size > 1:
        y[1:] = x[1:] - alpha * x[:-1]
    return AudioBuffer(y, signal.sample_rate_hz)

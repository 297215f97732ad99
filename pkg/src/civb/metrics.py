"""Waveform similarity metrics: Pearson correlation with lag alignment."""

from __future__ import annotations

import numpy as np

from .errors import NumericError

DEFAULT_MAX_LAG_S = 0.020


def pearson_r(x, y) -> float:
    """Sample Pearson correlation between two equal-length sequences.

    r = sum((x-mx)(y-my)) / sqrt(sum((x-mx)^2) * sum((y-my)^2))
    """
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if x.ndim != 1 or y.ndim != 1:
        raise ValueError("pearson_r expects one-dimensional inputs")
    if x.size != y.size:
        raise ValueError(f"length mismatch: {x.size} vs {y.size}")
    if x.size < 2:
        raise ValueError("pearson_r needs at least two samples")
    dx = x - x.mean()
    dy = y - y.mean()
    sx = float(np.dot(dx, dx))
    sy = float(np.dot(dy, dy))
    if sx == 0.0 or sy == 0.0:
        raise NumericError(
            "pearson", "correlation undefined for a constant sequence"
        )
    return float(np.dot(dx, dy) / np.sqrt(sx * sy))


def aligned_correlation(
    reference,
    test,
    rate_hz: float,
    max_lag_s: float = DEFAULT_MAX_LAG_S,
) -> tuple[float, int]:
    """Best Pearson correlation over integer lags in [-max_lag, +max_lag].

    Positive lag means the test signal is delayed relative to the
    reference (test[k + lag] lines up with reference[k]). For each lag the
    overlapping region is extracted and the exact Pearson correlation of
    that region is computed; the lag maximizing r wins, ties going to the
    smaller |lag| (and to the negative lag on a remaining tie, since that
    is scanned first).

    Returns (best_r, best_lag_samples).
    """
    reference = np.asarray(reference, dtype=np.float64)
    test = np.asarray(test, dtype=np.float64)
    if reference.ndim != 1 or test.ndim != 1:
        raise ValueError("aligned_correlation expects one-dimensional inputs")
    if not rate_hz > 0:
        raise ValueError("rate_hz must be positive")
    if max_lag_s < 0:
        raise ValueError("max_lag_s must be nonnegative")
    max_lag = int(round(max_lag_s * rate_hz))
    n = min(reference.size, test.size)
    if n - max_lag < 2:
        raise ValueError(
            f"signals too short ({n} samples) for a +/-{max_lag} sample search"
        )
    best_r = -np.inf
    best_lag = 0
    for lag in range(-max_lag, max_lag + 1):
        if lag >= 0:
            a = reference[: n - lag]
            b = test[lag : lag + a.size]
        else:
            b = test[: n + lag]
            a = reference[-lag : -lag + b.size]
        try:
            r = pearson_r(a, b)
        except NumericError:
            continue
        if r > best_r or (r == best_r and abs(lag) < abs(best_lag)):
            best_r = r
            best_lag = lag
    if not np.isfinite(best_r):
        raise NumericError(
            "alignment", "no lag produced a defined correlation"
        )
    return best_r, best_lag


def align(reference, test, max_lag_samples: int) -> tuple[np.ndarray, int]:
    """Shift the test signal onto the reference timeline.

    Searches lags in [-max_lag, +max_lag] for the one maximizing the
    normalized cross-correlation of the overlap (via aligned_correlation's
    per-lag Pearson scan) and returns (aligned_test, lag). aligned_test is
    the test content over the common support: its k-th sample pairs with
    reference[max(-lag, 0) + k].
    """
    reference = np.asarray(reference, dtype=np.float64)
    test = np.asarray(test, dtype=np.float64)
    if max_lag_samples < 0:
        raise ValueError("max_lag_samples must be nonnegative")
    n = min(reference.size, test.size)
    if max_lag_samples >= n:
        raise ValueError("max_lag_samples must be smaller than the signal length")
    _, lag = aligned_correlation(reference, test, 1.0, float(max_lag_samples))
    if lag >= 0:
        aligned = test[lag : lag + (n - lag)]
    else:
        aligned = test[: n + lag]
    return aligned, lag


def improvement_percent(proposed_r: float, baseline_r: float) -> float:
    """Relative gain of the proposed correlation over the baseline, in percent."""
    if baseline_r == 0.0:
        raise NumericError(
            "improvement", "baseline correlation is zero; relative gain undefined"
        )
    return 100.0 * (proposed_r - baseline_r) / baseline_r

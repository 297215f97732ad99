"""Experiment orchestration: the method x condition x rate matrix.

Runs the proposed pipeline (Kalman -> preemphasis -> DRNL -> SSB ->
envelope -> pulses -> resynthesis) and the DRNL-only baseline (same
chain minus the Kalman stage) across listening conditions, correlates
each reconstruction against the clean input, and emits CSV tables and
bar-chart plots of the results.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from .drnl import FilterbankLayout, analyze, make_filterbank
from .encode import EncoderConfig, Electrodogram, envelope_detect, pulse_encode, ssb_downshift
from .enhance import KalmanConfig, kalman_enhance, preemphasize
from .errors import CivbError, FileError, NumericError, StageError
from .metrics import aligned_correlation, improvement_percent
from .resynth import synthesize
from .signal_io import AudioBuffer, NoiseSpec, load_noise, mix_at_snr, resample

CONDITIONS = ("quiet", "babble_5dB", "babble_10dB")
CONDITION_SNR_DB = {"babble_5dB": 5.0, "babble_10dB": 10.0}
METHODS = ("proposed", "drnl_baseline")


@dataclass(frozen=True)
class PipelineConfig:
    """Every knob of one pipeline run. method selects the full chain
    ("proposed") or the same chain without the Kalman stage
    ("drnl_baseline")."""

    sample_rate_hz: float = 20000.0
    method: str = "proposed"
    kalman: KalmanConfig = field(default_factory=KalmanConfig)
    preemphasis_alpha: float = 0.97
    layout: FilterbankLayout = field(default_factory=FilterbankLayout)
    drnl_overrides: dict = field(default_factory=dict)
    encoder: EncoderConfig = field(default_factory=EncoderConfig)
    max_lag_s: float = 0.020
    noise: NoiseSpec = field(default_factory=NoiseSpec)
    seed: int = 0
    reference: str = "clean"

    def __post_init__(self):
        if self.method not in METHODS:
            raise ValueError(f"method must be one of {METHODS}, got {self.method!r}")
        if self.reference not in ("clean", "noisy"):
            raise ValueError(f"reference must be clean or noisy, got {self.reference!r}")
        if not self.sample_rate_hz > 0:
            raise ValueError("sample_rate_hz must be positive")
        if self.max_lag_s < 0:
            raise ValueError("max_lag_s must be nonnegative")


@dataclass(frozen=True)
class MetricsRow:
    condition: str
    sample_rate_hz: float
    method: str
    r: float
    alignment_lag_samples: int


@dataclass(frozen=True)
class ImprovementRow:
    condition: str
    sample_rate_hz: float
    percent: float


@dataclass(frozen=True)
class ExperimentReport:
    rows: tuple
    improvements: tuple
    config_snapshot: str
    input_path: str
    input_sha256: str


def _stage(name: str, fn, *args, **kwargs):
    """Run one pipeline stage; attach the stage name to any failure and
    reject non-finite output."""
    try:
        out = fn(*args, **kwargs)
    except CivbError:
        raise
    except Exception as exc:
        raise StageError(name, exc) from exc
    arrays = out if isinstance(out, (list, tuple)) else (out,)
    for arr in arrays:
        values = arr.samples if isinstance(arr, AudioBuffer) else arr
        if isinstance(values, np.ndarray) and not np.all(np.isfinite(values)):
            raise NumericError(name, "non-finite values at stage boundary")
    return out


def _condition_input(
    clean: AudioBuffer, cfg: PipelineConfig, condition: str
) -> tuple[AudioBuffer, AudioBuffer]:
    """Prepare (pipeline input, correlation reference) for a condition."""
    if condition not in CONDITIONS:
        raise ValueError(f"unknown condition {condition!r}; expected one of {CONDITIONS}")
    rate = cfg.sample_rate_hz
    work = clean
    if clean.sample_rate_hz != rate:
        work = _stage("resample", resample, clean, rate)
    reference = work
    if condition != "quiet":
        spec = replace(cfg.noise, seed=cfg.noise.seed + cfg.seed)
        noise = _stage("noise", load_noise, spec, work.duration_s, rate)
        work = _stage("mix", mix_at_snr, work, noise, CONDITION_SNR_DB[condition])
        if cfg.reference == "noisy":
            reference = work
    return work, reference


def encode_condition(
    clean: AudioBuffer, cfg: PipelineConfig, condition: str
) -> tuple[Electrodogram, AudioBuffer]:
    """Run the front half of the pipeline (through pulse generation).

    Returns the electrodogram and the correlation reference signal.
    """
    work, reference = _condition_input(clean, cfg, condition)
    rate = cfg.sample_rate_hz
    if cfg.method == "proposed":
        work = _stage("kalman", kalman_enhance, work, cfg.kalman)
    work = _stage("preemphasis", preemphasize, work, cfg.preemphasis_alpha)
    bank = _stage("filterbank", make_filterbank, cfg.layout, rate, cfg.drnl_overrides)
    channels = _stage("drnl", analyze, work, bank)
    cfs = [p.center_frequency_hz for p in bank]
    shifted = [
        _stage("ssb", ssb_downshift, ch, cf, rate) for ch, cf in zip(channels, cfs)
    ]
    envelopes = [
        _stage("envelope", envelope_detect, s, cfg.encoder, rate) for s in shifted
    ]
    gram = _stage("pulses", pulse_encode, envelopes, cfg.encoder, cfs, rate)
    return gram, reference


def run_condition(clean: AudioBuffer, cfg: PipelineConfig, condition: str) -> MetricsRow:
    """One cell of the experiment: pipeline end to end, then the aligned
    correlation of the reconstruction against the reference input."""
    gram, reference = encode_condition(clean, cfg, condition)
    recon = _stage("resynthesis", synthesize, gram)
    r, lag = _stage(
        "metrics",
        aligned_correlation,
        reference.samples,
        recon.samples,
        cfg.sample_rate_hz,
        cfg.max_lag_s,
    )
    return MetricsRow(
        condition=condition,
        sample_rate_hz=cfg.sample_rate_hz,
        method=cfg.method,
        r=float(r),
        alignment_lag_samples=int(lag),
    )


def run_matrix(
    clean: AudioBuffer,
    base_cfg: PipelineConfig,
    rates=None,
    conditions=None,
    input_path: str = "<memory>",
) -> ExperimentReport:
    """Both methods x requested conditions x requested rates.

    rates defaults to (base_cfg.sample_rate_hz,); conditions to all
    three. Each condition gets an improvement row comparing the two
    methods.
    """
    rates = tuple(float(r) for r in (rates or (base_cfg.sample_rate_hz,)))
    conditions = tuple(conditions or CONDITIONS)
    rows = []
    improvements = []
    for rate in rates:
        for condition in conditions:
            by_method = {}
            for method in METHODS:
                cfg = replace(base_cfg, sample_rate_hz=rate, method=method)
                row = run_condition(clean, cfg, condition)
                by_method[method] = row
                rows.append(row)
            improvements.append(
                ImprovementRow(
                    condition=condition,
                    sample_rate_hz=rate,
                    percent=improvement_percent(
                        by_method["proposed"].r, by_method["drnl_baseline"].r
                    ),
                )
            )
    digest = hashlib.sha256(np.ascontiguousarray(clean.samples).tobytes()).hexdigest()
    return ExperimentReport(
        rows=tuple(rows),
        improvements=tuple(improvements),
        config_snapshot=render_config(base_cfg),
        input_path=str(input_path),
        input_sha256=digest,
    )


def _fmt_rate(rate: float) -> str:
    return str(int(rate)) if float(rate).is_integer() else repr(float(rate))


def _condition_order(condition: str) -> int:
    return CONDITIONS.index(condition) if condition in CONDITIONS else len(CONDITIONS)


def emit_csv(report: ExperimentReport, path) -> None:
    """Write the report as CSV: header, one row per MetricsRow, then the
    improvement rows with method=improvement_pct. Byte-deterministic."""
    lines = ["condition,rate_hz,method,r,lag_samples"]
    for row in sorted(
        report.rows,
        key=lambda r: (r.sample_rate_hz, _condition_order(r.condition), r.method),
    ):
        lines.append(
            f"{row.condition},{_fmt_rate(row.sample_rate_hz)},{row.method},"
            f"{row.r!r},{row.alignment_lag_samples}"
        )
    for imp in sorted(
        report.improvements,
        key=lambda r: (r.sample_rate_hz, _condition_order(r.condition)),
    ):
        lines.append(
            f"{imp.condition},{_fmt_rate(imp.sample_rate_hz)},improvement_pct,"
            f"{imp.percent!r},"
        )
    try:
        Path(path).write_text("\n".join(lines) + "\n", encoding="ascii")
    except OSError as exc:
        raise FileError(f"cannot write CSV to {path}: {exc}") from exc


_SVG_SERIES = {"proposed": "#d95f02", "drnl_baseline": "#1b9e77"}


def _svg_for_rate(rate: float, rows) -> str:
    width, height = 640, 420
    left, right, top, bottom = 70, 30, 50, 70
    plot_w = width - left - right
    plot_h = height - top - bottom
    conditions = sorted({r.condition for r in rows}, key=_condition_order)
    methods = [m for m in METHODS if any(r.method == m for r in rows)]
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
        f'<rect width="{width}" height="{height}" fill="white"/>',
        f'<text x="{width / 2:.1f}" y="28" font-family="sans-serif" font-size="16" '
        f'text-anchor="middle">Correlation by listening condition, '
        f"{_fmt_rate(rate)} Hz</text>",
    ]
    # y axis spans [0, 1] with gridlines every 0.2
    for i in range(6):
        v = i / 5.0
        y = top + plot_h * (1.0 - v)
        parts.append(
            f'<line x1="{left}" y1="{y:.1f}" x2="{left + plot_w}" y2="{y:.1f}" '
            f'stroke="#dddddd"/>'
        )
        parts.append(
            f'<text x="{left - 8}" y="{y + 4:.1f}" font-family="sans-serif" '
            f'font-size="12" text-anchor="end">{v:.1f}</text>'
        )
    group_w = plot_w / max(len(conditions), 1)
    bar_w = group_w / (len(methods) + 1) if methods else group_w
    for gi, condition in enumerate(conditions):
        gx = left + gi * group_w
        parts.append(
            f'<text x="{gx + group_w / 2:.1f}" y="{top + plot_h + 20}" '
            f'font-family="sans-serif" font-size="13" text-anchor="middle">'
            f"{condition}</text>"
        )
        for mi, method in enumerate(methods):
            matches = [r for r in rows if r.condition == condition and r.method == method]
            if not matches:
                continue
            r_val = max(0.0, min(1.0, matches[0].r))
            x = gx + bar_w * (mi + 0.5)
            bh = plot_h * r_val
            y = top + plot_h - bh
            parts.append(
                f'<rect class="bar" x="{x:.1f}" y="{y:.1f}" width="{bar_w:.1f}" '
                f'height="{bh:.1f}" fill="{_SVG_SERIES[method]}"/>'
            )
            parts.append(
                f'<text x="{x + bar_w / 2:.1f}" y="{y - 4:.1f}" '
                f'font-family="sans-serif" font-size="11" text-anchor="middle">'
                f"{matches[0].r:.3f}</text>"
            )
    for mi, method in enumerate(methods):
        lx = left + 10 + mi * 180
        ly = top + plot_h + 40
        parts.append(
            f'<rect x="{lx}" y="{ly}" width="14" height="14" '
            f'fill="{_SVG_SERIES[method]}"/>'
        )
        parts.append(
            f'<text x="{lx + 20}" y="{ly + 12}" font-family="sans-serif" '
            f'font-size="13">{method}</text>'
        )
    parts.append(
        f'<line x1="{left}" y1="{top}" x2="{left}" y2="{top + plot_h}" stroke="black"/>'
    )
    parts.append(
        f'<line x1="{left}" y1="{top + plot_h}" x2="{left + plot_w}" '
        f'y2="{top + plot_h}" stroke="black"/>'
    )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def emit_plot(report: ExperimentReport, path) -> list:
    """Write grouped-bar SVG plots of r by condition, one file per rate.

    A single-rate report writes exactly `path`; with several rates the
    rate is appended to the stem (metrics_10000.svg, ...). Returns the
    written paths.
    """
    path = Path(path)
    rates = sorted({row.sample_rate_hz for row in report.rows})
    written = []
    for rate in rates:
        rows = [r for r in report.rows if r.sample_rate_hz == rate]
        target = (
            path
            if len(rates) == 1
            else path.with_name(f"{path.stem}_{_fmt_rate(rate)}{path.suffix}")
        )
        try:
            target.write_text(_svg_for_rate(rate, rows), encoding="ascii")
        except OSError as exc:
            raise FileError(f"cannot write plot to {target}: {exc}") from exc
        written.append(target)
    return written


# -- flat key=value config text ------------------------------------------

def _bool_text(value: bool) -> str:
    return "true" if value else "false"


def _opt(value) -> str:
    return "none" if value is None else str(value)


def render_config(cfg: PipelineConfig) -> str:
    """Serialize a PipelineConfig as the flat key=value text format."""
    pairs = {
        "sample_rate_hz": cfg.sample_rate_hz,
        "method": cfg.method,
        "preemphasis_alpha": cfg.preemphasis_alpha,
        "max_lag_s": cfg.max_lag_s,
        "seed": cfg.seed,
        "reference": cfg.reference,
        "kalman.ar_order": _opt(cfg.kalman.ar_order),
        "kalman.frame_ms": cfg.kalman.frame_ms,
        "kalman.iterations": cfg.kalman.iterations,
        "kalman.noise_estimate_ms": cfg.kalman.noise_estimate_ms,
        "kalman.noise_variance_override": _opt(cfg.kalman.noise_variance_override),
        "layout.num_channels": cfg.layout.num_channels,
        "layout.min_cf_hz": cfg.layout.min_cf_hz,
        "layout.max_cf_hz": _opt(cfg.layout.max_cf_hz),
        "layout.spacing": cfg.layout.spacing,
        "encoder.envelope_cutoff_hz": cfg.encoder.envelope_cutoff_hz,
        "encoder.envelope_lp_order": cfg.encoder.envelope_lp_order,
        "encoder.pulses_per_second": cfg.encoder.pulses_per_second,
        "encoder.pulse_phase_samples": cfg.encoder.pulse_phase_samples,
        "encoder.interleaved": _bool_text(cfg.encoder.interleaved),
        "noise.kind": cfg.noise.kind,
        "noise.num_talkers": cfg.noise.num_talkers,
        "noise.seed": cfg.noise.seed,
        "noise.path": _opt(cfg.noise.path),
    }
    for key, value in sorted(cfg.drnl_overrides.items()):
        pairs[f"drnl.{key}"] = value
    return "\n".join(f"{k}={v}" for k, v in sorted(pairs.items())) + "\n"

"""Command-line front end.

Subcommands:
  run     one condition, one method, one rate; prints the metrics row
  matrix  methods x conditions x rates; writes CSV and per-rate SVG plots
  encode  dump the electrodogram as CSV (channel, onset_sample, amplitude)
  resynth write the reconstructed waveform as a WAV file

Exit codes: 0 success, 2 bad arguments or config, 3 input file errors,
4 numeric failure (non-finite values at a stage boundary).
"""

from __future__ import annotations

import argparse
import os
import sys
from dataclasses import replace
from pathlib import Path

from .errors import CivbError, ConfigError, FileError, FormatError, NumericError, StageError
from .experiment import (
    CONDITIONS,
    METHODS,
    PipelineConfig,
    emit_csv,
    emit_plot,
    encode_condition,
    run_condition,
    run_matrix,
)
from .resynth import synthesize
from .signal_io import NoiseSpec, load_wav, save_wav

ENV_SEED = "CIVB_SEED"

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_FILE = 3
EXIT_NUMERIC = 4


def _int_or_none(raw: str):
    return None if raw.lower() == "none" else int(raw)


def _float_or_none(raw: str):
    return None if raw.lower() == "none" else float(raw)


def _str_or_none(raw: str):
    return None if raw.lower() == "none" else raw


def _bool(raw: str) -> bool:
    lowered = raw.lower()
    if lowered in ("true", "1", "yes"):
        return True
    if lowered in ("false", "0", "no"):
        return False
    raise ValueError(f"expected a boolean, got {raw!r}")


_CONVERTERS = {
    "sample_rate_hz": float,
    "method": str,
    "preemphasis_alpha": float,
    "max_lag_s": float,
    "seed": int,
    "reference": str,
    "kalman.ar_order": _int_or_none,
    "kalman.frame_ms": float,
    "kalman.iterations": int,
    "kalman.noise_estimate_ms": float,
    "kalman.noise_variance_override": _float_or_none,
    "layout.num_channels": int,
    "layout.min_cf_hz": float,
    "layout.max_cf_hz": _float_or_none,
    "layout.spacing": str,
    "encoder.envelope_cutoff_hz": float,
    "encoder.envelope_lp_order": int,
    "encoder.pulses_per_second": float,
    "encoder.pulse_phase_samples": int,
    "encoder.interleaved": _bool,
    "noise.kind": str,
    "noise.num_talkers": int,
    "noise.seed": int,
    "noise.path": _str_or_none,
    "drnl.linear_gain": float,
    "drnl.linear_gt_cascade": int,
    "drnl.linear_lp_cascade": int,
    "drnl.nonlinear_gt_cascade": int,
    "drnl.nonlinear_lp_cascade": int,
    "drnl.linear_bw_fraction": float,
    "drnl.nonlinear_bw_fraction": float,
    "drnl.a": float,
    "drnl.b": float,
    "drnl.c": float,
}


def parse_config_text(text: str) -> dict:
    """Parse the flat key=value config format (# starts a comment)."""
    pairs = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.split("#", 1)[0].strip()
        if not stripped:
            continue
        if "=" not in stripped:
            raise ConfigError(f"config line {lineno}: expected key=value, got {line!r}")
        key, _, value = stripped.partition("=")
        pairs[key.strip()] = value.strip()
    return pairs


def apply_config_pairs(cfg: PipelineConfig, pairs: dict) -> PipelineConfig:
    """Apply parsed key=value strings onto a PipelineConfig."""
    groups = {"kalman": {}, "layout": {}, "encoder": {}, "noise": {}}
    drnl_overrides = dict(cfg.drnl_overrides)
    top = {}
    for key, raw in pairs.items():
        conv = _CONVERTERS.get(key)
        if conv is None:
            raise ConfigError(f"unknown config key {key!r}")
        try:
            value = conv(raw)
        except ValueError as exc:
            raise ConfigError(f"bad value for {key}: {raw!r} ({exc})") from exc
        prefix, _, name = key.partition(".")
        if not name:
            top[key] = value
        elif prefix == "drnl":
            drnl_overrides[name] = value
        else:
            groups[prefix][name] = value
    try:
        cfg = replace(
            cfg,
            kalman=replace(cfg.kalman, **groups["kalman"]),
            layout=replace(cfg.layout, **groups["layout"]),
            encoder=replace(cfg.encoder, **groups["encoder"]),
            noise=replace(cfg.noise, **groups["noise"]),
            drnl_overrides=drnl_overrides,
            **top,
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    return cfg


_CONDITION_TOKENS = {
    "quiet": "quiet",
    "5": "babble_5dB",
    "10": "babble_10dB",
    "babble_5db": "babble_5dB",
    "babble_10db": "babble_10dB",
}


def _parse_conditions(raw: str) -> list:
    conditions = []
    for token in raw.split(","):
        token = token.strip()
        canonical = _CONDITION_TOKENS.get(token.lower())
        if canonical is None:
            raise ConfigError(
                f"unknown condition {token!r}; expected quiet, 5, or 10"
            )
        conditions.append(canonical)
    return conditions


def _parse_rates(raw: str) -> list:
    rates = []
    for token in raw.split(","):
        try:
            rate = float(token.strip())
        except ValueError as exc:
            raise ConfigError(f"bad rate {token.strip()!r}") from exc
        if rate <= 0:
            raise ConfigError(f"rates must be positive, got {rate}")
        rates.append(rate)
    return rates


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="civb",
        description="Cochlear-implant coding simulation: Kalman + DRNL + SSB "
        "pipeline against the DRNL-only baseline.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--input", required=True, help="input speech WAV file")
    common.add_argument("--config", help="flat key=value config file")
    common.add_argument("--seed", type=int, help=f"experiment seed (default ${ENV_SEED} or 0)")
    common.add_argument("--noise-file", help="use this WAV as the interferer instead of synthetic babble")
    common.add_argument("--out-dir", default=".", help="directory for emitted files")
    common.add_argument("--reference", choices=("clean", "noisy"), help="correlation reference signal")
    common.add_argument("--rates", default=None, help="comma-separated sample rates, e.g. 10000,20000")
    common.add_argument("--conditions", default=None, help="comma-separated conditions from quiet,5,10")

    single = argparse.ArgumentParser(add_help=False)
    single.add_argument("--method", choices=METHODS, default=None, help="pipeline variant")

    sub.add_parser("run", parents=[common, single], help="run one condition and print its metrics row")
    sub.add_parser("matrix", parents=[common], help="run the full comparison matrix; write CSV and plots")
    sub.add_parser("encode", parents=[common, single], help="write the electrodogram CSV")
    sub.add_parser("resynth", parents=[common, single], help="write the reconstructed WAV")
    return parser


def _configure(args) -> PipelineConfig:
    cfg = PipelineConfig()
    pairs = {}
    if args.config:
        config_path = Path(args.config)
        if not config_path.is_file():
            raise FileError(f"config file {config_path} does not exist")
        pairs = parse_config_text(config_path.read_text(encoding="utf-8"))
        cfg = apply_config_pairs(cfg, pairs)
    if args.seed is not None:
        cfg = replace(cfg, seed=args.seed)
    elif "seed" not in pairs and os.environ.get(ENV_SEED):
        try:
            cfg = replace(cfg, seed=int(os.environ[ENV_SEED]))
        except ValueError as exc:
            raise ConfigError(f"bad {ENV_SEED} value {os.environ[ENV_SEED]!r}") from exc
    if args.noise_file is not None:
        cfg = replace(cfg, noise=NoiseSpec(kind="file", path=args.noise_file))
    if args.reference is not None:
        cfg = replace(cfg, reference=args.reference)
    if getattr(args, "method", None):
        cfg = replace(cfg, method=args.method)
    return cfg


def _single_cell(args, cfg: PipelineConfig) -> tuple[PipelineConfig, str]:
    """Resolve the one (rate, condition) cell for run/encode/resynth."""
    rates = _parse_rates(args.rates) if args.rates else [cfg.sample_rate_hz]
    if len(rates) != 1:
        raise ConfigError(f"{args.command} expects exactly one rate, got {len(rates)}")
    conditions = _parse_conditions(args.conditions) if args.conditions else ["quiet"]
    if len(conditions) != 1:
        raise ConfigError(
            f"{args.command} expects exactly one condition, got {len(conditions)}"
        )
    return replace(cfg, sample_rate_hz=rates[0]), conditions[0]


def _out_dir(args) -> Path:
    out = Path(args.out_dir)
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise FileError(f"cannot create output directory {out}: {exc}") from exc
    return out


def _fmt_rate(rate: float) -> str:
    return str(int(rate)) if float(rate).is_integer() else repr(float(rate))


def _cmd_run(args) -> int:
    cfg, condition = _single_cell(args, _configure(args))
    clean = load_wav(args.input)
    row = run_condition(clean, cfg, condition)
    print(
        f"condition={row.condition} rate_hz={_fmt_rate(row.sample_rate_hz)} "
        f"method={row.method} r={row.r:.6f} lag_samples={row.alignment_lag_samples}"
    )
    return EXIT_OK


def _cmd_matrix(args) -> int:
    cfg = _configure(args)
    rates = _parse_rates(args.rates) if args.rates else [cfg.sample_rate_hz]
    conditions = _parse_conditions(args.conditions) if args.conditions else list(CONDITIONS)
    clean = load_wav(args.input)
    report = run_matrix(clean, cfg, rates=rates, conditions=conditions, input_path=args.input)
    out = _out_dir(args)
    csv_path = out / "metrics.csv"
    emit_csv(report, csv_path)
    plots = emit_plot(report, out / "metrics.svg")
    (out / "config.txt").write_text(report.config_snapshot, encoding="ascii")
    print(f"{'condition':<12} {'rate_hz':>8} {'method':<15} {'r':>9} {'lag':>5}")
    for row in report.rows:
        print(
            f"{row.condition:<12} {_fmt_rate(row.sample_rate_hz):>8} "
            f"{row.method:<15} {row.r:>9.4f} {row.alignment_lag_samples:>5}"
        )
    for imp in report.improvements:
        print(
            f"{imp.condition:<12} {_fmt_rate(imp.sample_rate_hz):>8} "
            f"{'improvement_pct':<15} {imp.percent:>9.3f}"
        )
    print(f"wrote {csv_path}")
    for plot in plots:
        print(f"wrote {plot}")
    return EXIT_OK


def _cmd_encode(args) -> int:
    cfg, condition = _single_cell(args, _configure(args))
    clean = load_wav(args.input)
    gram, _ = encode_condition(clean, cfg, condition)
    out = _out_dir(args)
    target = out / f"{Path(args.input).stem}_electrodogram.csv"
    lines = ["channel,onset_sample,amplitude"]
    for k in range(gram.num_channels):
        for onset, amp in zip(gram.onsets[k], gram.amplitudes[k]):
            lines.append(f"{k},{int(onset)},{float(amp)!r}")
    try:
        target.write_text("\n".join(lines) + "\n", encoding="ascii")
    except OSError as exc:
        raise FileError(f"cannot write {target}: {exc}") from exc
    print(f"wrote {target}")
    return EXIT_OK


def _cmd_resynth(args) -> int:
    cfg, condition = _single_cell(args, _configure(args))
    clean = load_wav(args.input)
    gram, _ = encode_condition(clean, cfg, condition)
    recon = synthesize(gram)
    out = _out_dir(args)
    target = out / f"{Path(args.input).stem}_resynth.wav"
    save_wav(recon, target)
    print(f"wrote {target}")
    return EXIT_OK


_COMMANDS = {
    "run": _cmd_run,
    "matrix": _cmd_matrix,
    "encode": _cmd_encode,
    "resynth": _cmd_resynth,
}


def _exit_code_for(exc: CivbError) -> int:
    if isinstance(exc, (FileError, FormatError)):
        return EXIT_FILE
    if isinstance(exc, ConfigError):
        return EXIT_USAGE
    if isinstance(exc, NumericError):
        return EXIT_NUMERIC
    if isinstance(exc, StageError):
        if isinstance(exc.cause, (FileError, FormatError)):
            return EXIT_FILE
        return EXIT_NUMERIC
    return EXIT_NUMERIC


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except CivbError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return _exit_code_for(exc)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())

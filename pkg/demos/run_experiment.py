"""Full comparison matrix on a bundled utterance.

Runs both pipeline variants (with and without Kalman enhancement) across
the three listening conditions, prints the correlation table and the
relative improvements, and writes the CSV / SVG / config snapshot that
the command-line `matrix` subcommand would produce.

Equivalent CLI:
    civb matrix --input src/civb/data/speech_a.wav --out-dir demos/output
"""

from pathlib import Path

from civb import PipelineConfig, emit_csv, emit_plot, render_config, run_matrix
from civb.fixtures import fixture_path, load_fixture


def main():
    out = Path(__file__).parent / "output"
    out.mkdir(exist_ok=True)

    clean = load_fixture("speech_a.wav")
    cfg = PipelineConfig()
    report = run_matrix(clean, cfg, input_path=str(fixture_path("speech_a.wav")))

    print(f"{'condition':<12} {'rate':>6} {'method':<14} {'r':>8} {'lag':>5}")
    for row in report.rows:
        print(f"{row.condition:<12} {row.sample_rate_hz:6.0f} {row.method:<14} "
              f"{row.r:8.4f} {row.alignment_lag_samples:5d}")
    print()
    for imp in report.improvements:
        print(f"{imp.condition:<12} {imp.sample_rate_hz:6.0f} "
              f"improvement {imp.percent:+7.3f}%")

    emit_csv(report, out / "metrics.csv")
    svg_paths = emit_plot(report, out / "metrics.svg")
    (out / "config.txt").write_text(render_config(cfg))
    for p in [out / "metrics.csv"] + list(svg_paths) + [out / "config.txt"]:
        print(f"wrote {p}")


if __name__ == "__main__":
    main()

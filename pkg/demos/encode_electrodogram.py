"""Encode an utterance into an interleaved biphasic pulse train.

Runs the front half of the pipeline (enhancement, preemphasis, filterbank,
single-sideband downshift, envelope detection, pulse generation) on a
bundled utterance in quiet, then summarizes the electrodogram: pulses per
channel, amplitude range, and a charge-balance check on every pulse.
"""

import numpy as np

from civb import PipelineConfig, encode_condition
from civb.fixtures import load_fixture


def main():
    clean = load_fixture("speech_b.wav")
    cfg = PipelineConfig()
    gram, _ = encode_condition(clean, cfg, "quiet")

    print(f"input: {clean.duration_s:.2f} s at {clean.sample_rate_hz:.0f} Hz")
    print(f"electrodogram: {gram.num_channels} channels, "
          f"{gram.num_samples} samples, pulse width {gram.pulse_width_samples}")
    print(f"{'ch':>3} {'pulses':>7} {'max amp':>9} {'mean amp':>9}")
    for k in range(gram.num_channels):
        amps = gram.amplitudes[k]
        if len(amps) == 0:
            print(f"{k:3d} {0:7d} {'-':>9} {'-':>9}")
            continue
        print(f"{k:3d} {len(amps):7d} {np.max(amps):9.4f} {np.mean(amps):9.4f}")

    # every biphasic pulse must cancel exactly
    worst = 0.0
    for k in range(gram.num_channels):
        wave = gram.pulse_waveform(k)
        half = gram.pulse_width_samples // 2
        for onset in gram.onsets[k]:
            pos = wave[onset : onset + half].sum()
            neg = wave[onset + half : onset + gram.pulse_width_samples].sum()
            worst = max(worst, abs(pos + neg))
    print(f"\nworst per-pulse charge imbalance: {worst:.1e}")


if __name__ == "__main__":
    main()

"""Tone-vocoder resynthesis from an electrodogram.

Encodes a bundled utterance, reconstructs an acoustic waveform by
modulating a sine carrier per channel with the smoothed pulse envelope,
and writes the result as a WAV file alongside the original.
"""

from pathlib import Path

import numpy as np

from civb import PipelineConfig, encode_condition, save_wav, synthesize
from civb.fixtures import load_fixture


def main():
    out = Path(__file__).parent / "output"
    out.mkdir(exist_ok=True)

    clean = load_fixture("speech_a.wav")
    cfg = PipelineConfig()
    gram, _ = encode_condition(clean, cfg, "quiet")
    voc = synthesize(gram)

    print(f"original:  {clean.duration_s:.2f} s, peak {np.max(np.abs(clean.samples)):.3f}")
    print(f"vocoded:   {voc.duration_s:.2f} s, peak {np.max(np.abs(voc.samples)):.3f}")

    save_wav(clean, out / "speech_a_original.wav")
    save_wav(voc, out / "speech_a_vocoded.wav")
    print(f"wrote {out / 'speech_a_original.wav'}")
    print(f"wrote {out / 'speech_a_vocoded.wav'}")


if __name__ == "__main__":
    main()

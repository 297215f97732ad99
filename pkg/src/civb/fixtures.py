"""Bundled test utterances.

The package ships two short synthetic utterances so the experiment
matrix runs out of the box. Each is a syllable train: a fixed chord of
gated sinusoids plus a low-level breath-like noise floor. The chord
partials sit at (or between) the default analysis center frequencies of
both supported rates, which keeps the reconstruction correlation
informative at desk scale; the first 120 ms of each file carries only
the noise floor, giving the enhancement stage a clean noise-estimation
window. This module both locates the bundled WAVs and regenerates them
deterministically.
"""

from __future__ import annotations

import numpy as np

from pathlib import Path

from .errors import FileError
from .signal_io import AudioBuffer, load_wav, save_wav

FIXTURE_RATE_HZ = 20000.0
LEAD_IN_S = 0.12
PEAK = 0.5
RAMP_S = 0.015
NOISE_FLOOR = 0.058

# chord partials: (frequency_hz, amplitude, phase_rad)
_PARTIALS = (
    (250.00000000000003, 0.2600000391946432, 2.617993877991494),
    (317.0727217613922, 0.24903215192045555, 2.617993877991494),
    (338.38041565191105, 0.24533984122583066, 3.141592653589793),
    (395.5187901484648, 0.23516838321791936, 2.617993877991494),
    (446.50816634650806, 0.22596304131880562, 2.617993877991494),
    (487.26675390757754, 0.21864715891240386, 2.617993877991494),
    (578.7955105961743, 0.20271859034622186, 2.617993877991494),
    (594.5721807698711, 0.20007189093633726, 2.617993877991494),
    (720.0731092082455, 0.18031441736005147, 2.0943951023931953),
    (740.6405627332306, 0.17730518816679075, 2.617993877991494),
    (866.8549030042551, 0.16033161183296968, 2.0943951023931953),
    (938.6475682394475, 0.15173197755624765, 2.617993877991494),
    (1038.5261030348888, 0.1410897437012946, 2.0943951023931953),
    (1180.8963964355498, 0.12771261017068097, 2.617993877991494),
    (1239.3071410491477, 0.12347999524578673, 1.5707963267948966),
    (1474.134096408519, 0.1088114073224487, 1.5707963267948966),
    (1477.2722474432176, 0.10681600237514545, 2.0943951023931953),
    (1748.7800465875196, 0.008732006572173105, 1.5707963267948966),
    (1839.8690274342969, 0.0042761372174316935, 2.0943951023931953),
    (2069.996994762356, 0.02766913367489745, 1.0471975511965976),
    (2283.4828522883918, 0.017858340894084564, 2.0943951023931953),
    (2445.681863690912, 0.0756310751468693, 1.0471975511965976),
    (2826.215817557753, 0.09374615494058239, 1.5707963267948966),
    (2885.0706367423386, 0.2605262156104668, 0.5235987755982988),
    (3398.965418915088, 0.5747745809344257, 0.5235987755982988),
    (3490.214672162778, 0.28103327384794136, 1.5707963267948966),
    (4000.0000000000014, 1.0, 0.0),
    (4302.574538120001, 0.5109109639318273, 1.0471975511965976),
    (5296.444553469036, 0.7147380915327245, 0.5235987755982988),
    (6512.380555238363, 0.9195894395255177, 0.5235987755982988),
    (7999.999999999999, 0.9997438421018388, 0.0),
)

# per-utterance plans: noise seed, duration, syllables as (start_s, end_s, level)
_UTTERANCES = {
    "a": (
        424242,
        1.50,
        ((0.12, 0.32, 1.0), (0.45, 0.68, 0.9), (0.82, 1.02, 1.0), (1.15, 1.38, 0.95)),
    ),
    "b": (
        606060,
        1.74,
        ((0.12, 0.40, 0.95), (0.52, 0.66, 1.0), (0.78, 1.04, 0.85),
         (1.16, 1.30, 1.0), (1.42, 1.62, 0.9)),
    ),
}

FIXTURE_NAMES = tuple(f"speech_{kind}.wav" for kind in sorted(_UTTERANCES))


def fixture_dir() -> Path:
    return Path(__file__).resolve().parent / "data"


def list_fixtures() -> tuple:
    return tuple(sorted(p.name for p in fixture_dir().glob("*.wav")))


def fixture_path(name: str) -> Path:
    path = fixture_dir() / name
    if not path.is_file():
        raise FileError(f"no bundled fixture named {name!r}; have {list_fixtures()}")
    return path


def load_fixture(name: str) -> AudioBuffer:
    return load_wav(fixture_path(name))


def _gate(t: np.ndarray, t0: float, t1: float) -> np.ndarray:
    g = np.zeros_like(t)
    rise = (t >= t0) & (t < t0 + RAMP_S)
    g[rise] = 0.5 * (1.0 - np.cos(np.pi * (t[rise] - t0) / RAMP_S))
    g[(t >= t0 + RAMP_S) & (t <= t1 - RAMP_S)] = 1.0
    fall = (t > t1 - RAMP_S) & (t <= t1)
    g[fall] = 0.5 * (1.0 - np.cos(np.pi * (t1 - t[fall]) / RAMP_S))
    return g


def synthesize_utterance(kind: str, rate_hz: float = FIXTURE_RATE_HZ) -> AudioBuffer:
    """Render one of the bundled utterance plans at the given rate.

    The syllable gates share one phase-coherent chord, and the noise
    floor is seeded by the plan, so the output is bit-reproducible.
    """
    if kind not in _UTTERANCES:
        raise ValueError(f"unknown utterance kind {kind!r}; have {sorted(_UTTERANCES)}")
    seed, duration, syllables = _UTTERANCES[kind]
    n = int(round(duration * rate_hz))
    t = np.arange(n) / rate_hz
    gate = np.zeros(n)
    for t0, t1, level in syllables:
        gate += level * _gate(t, t0, t1)
    chord = np.zeros(n)
    for freq, amp, phase in _PARTIALS:
        chord += amp * np.sin(2.0 * np.pi * freq * t + phase)
    out = gate * chord
    out *= PEAK / np.max(np.abs(out))
    out = out + NOISE_FLOOR * np.random.default_rng(seed).standard_normal(n)
    return AudioBuffer(out, rate_hz)


def write_fixtures(out_dir=None) -> list:
    """Regenerate the bundled WAVs (used to create the shipped data)."""
    out_dir = Path(out_dir) if out_dir is not None else fixture_dir()
    out_dir.mkdir(parents=True, exist_ok=True)
    written = []
    for kind in sorted(_UTTERANCES):
        path = out_dir / f"speech_{kind}.wav"
        save_wav(synthesize_utterance(kind), path)
        written.append(path)
    return written

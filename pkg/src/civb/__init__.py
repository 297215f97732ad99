"""Cochlear-implant speech-coding simulation toolkit.

Pipeline: Kalman enhancement -> preemphasis -> DRNL filterbank -> SSB
downshift -> envelope detection -> biphasic pulses -> tone-vocoder
resynthesis, with correlation metrics and an experiment matrix comparing
the full chain against the DRNL-only baseline.
"""

from .drnl import (
    DrnlChannelParams,
    FilterbankLayout,
    analyze,
    broken_stick,
    drnl_channel,
    gammatone_filter,
    greenwood_frequency,
    greenwood_position,
    lowpass_filter,
    make_filterbank,
)
from .encode import (
    Electrodogram,
    EncoderConfig,
    analytic_signal,
    envelope_detect,
    pulse_encode,
    ssb_downshift,
)
from .enhance import (
    KalmanConfig,
    KalmanState,
    estimate_noise_variance,
    kalman_enhance,
    lpc_coefficients,
    preemphasize,
)
from .errors import (
    CivbError,
    ConfigError,
    FileError,
    FormatError,
    NumericError,
    StageError,
)
from .experiment import (
    CONDITIONS,
    METHODS,
    ExperimentReport,
    ImprovementRow,
    MetricsRow,
    PipelineConfig,
    emit_csv,
    emit_plot,
    encode_condition,
    render_config,
    run_condition,
    run_matrix,
)
from .metrics import align, aligned_correlation, improvement_percent, pearson_r
from .resynth import pulses_to_envelope, synthesize
from .signal_io import (
    AudioBuffer,
    NoiseSpec,
    load_noise,
    load_wav,
    mix_at_snr,
    resample,
    save_wav,
    synthesize_babble,
)

__version__ = "0.1.0"

__all__ = [
    "AudioBuffer",
    "CONDITIONS",
    "CivbError",
    "ConfigError",
    "DrnlChannelParams",
    "Electrodogram",
    "EncoderConfig",
    "ExperimentReport",
    "FileError",
    "FilterbankLayout",
    "FormatError",
    "ImprovementRow",
    "KalmanConfig",
    "KalmanState",
    "METHODS",
    "MetricsRow",
    "NoiseSpec",
    "NumericError",
    "PipelineConfig",
    "StageError",
    "align",
    "aligned_correlation",
    "analytic_signal",
    "analyze",
    "broken_stick",
    "drnl_channel",
    "emit_csv",
    "emit_plot",
    "encode_condition",
    "envelope_detect",
    "estimate_noise_variance",
    "gammatone_filter",
    "greenwood_frequency",
    "greenwood_position",
    "improvement_percent",
    "kalman_enhance",
    "load_noise",
    "load_wav",
    "lowpass_filter",
    "lpc_coefficients",
    "make_filterbank",
    "mix_at_snr",
    "pearson_r",
    "preemphasize",
    "pulse_encode",
    "pulses_to_envelope",
    "render_config",
    "resample",
    "run_condition",
    "run_matrix",
    "save_wav",
    "ssb_downshift",
    "synthesize",
    "synthesize_babble",
]

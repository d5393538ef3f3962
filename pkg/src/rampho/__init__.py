"""Masker synthesis, calibrated SNR mixing, and frame-wise phonetic
entropy analysis for energetic/informational masking experiments."""

__version__ = "0.1.0"

from .audio import AudioBuffer, load_wav, peak_normalize, resample, save_wav
from .entropy import (
    EntropyTrace,
    SweepResult,
    SweepRow,
    aggregate_trace,
    find_crossovers,
    frame_entropy,
    softmax,
)
from .errors import RamphoError
from .levels import ActiveLevelReport, active_speech_level, apply_gain_to_active_level
from .logits import (
    LogitsMatrix,
    ModelManifest,
    default_manifest,
    mock_logits,
    read_logits_file,
    write_logits_file,
)
from .maskers import (
    LtasProfile,
    ShieldParams,
    concentration_shield,
    envelope_decorrelation,
    measure_ltas,
    synthesize_ssn,
)
from .mixer import Mixture, SnrGrid, build_stimulus_grid, fit_masker_length, mix_at_snr

__all__ = [
    "ActiveLevelReport",
    "AudioBuffer",
    "EntropyTrace",
    "LogitsMatrix",
    "LtasProfile",
    "Mixture",
    "ModelManifest",
    "RamphoError",
    "ShieldParams",
    "SnrGrid",
    "SweepResult",
    "SweepRow",
    "active_speech_level",
    "aggregate_trace",
    "apply_gain_to_active_level",
    "build_stimulus_grid",
    "concentration_shield",
    "default_manifest",
    "envelope_decorrelation",
    "find_crossovers",
    "fit_masker_length",
    "frame_entropy",
    "load_wav",
    "measure_ltas",
    "mix_at_snr",
    "mock_logits",
    "peak_normalize",
    "read_logits_file",
    "resample",
    "save_wav",
    "softmax",
    "synthesize_ssn",
    "write_logits_file",
]

"""Input audio handling: decode, downmix, resample, normalize."""

from __future__ import annotations

from pathlib import Path

import numpy as np
from scipy.io import wavfile
from scipy.signal import resample_poly

from .errors import AudioError

MODEL_SAMPLE_RATE = 16_000

# integer PCM full-scale divisors by dtype
_PCM_SCALE = {
    np.dtype(np.int16): 32768.0,
    np.dtype(np.int32): 2147483648.0,
    np.dtype(np.uint8): 128.0,
}


def load_mono(path: str | Path) -> tuple[np.ndarray, int]:
    """Decode a WAV file to mono float64 in [-1, 1]. Multi-channel
    input is averaged down."""
    path = Path(path)
    if not path.is_file():
        raise AudioError(f"input audio not found: {path}")
    try:
        rate, data = wavfile.read(path)
    except (ValueError, OSError) as exc:
        raise AudioError(f"cannot decode {path}: {exc}") from exc
    if data.size == 0:
        raise AudioError(f"{path} contains no samples")

    if data.dtype in _PCM_SCALE:
        scale = _PCM_SCALE[data.dtype]
        samples = data.astype(np.float64)
        if data.dtype == np.dtype(np.uint8):
            samples -= 128.0
        samples /= scale
    elif np.issubdtype(data.dtype, np.floating):
        samples = data.astype(np.float64)
    else:
        raise AudioError(f"{path}: unsupported sample format {data.dtype}")

    if samples.ndim == 2:
        samples = samples.mean(axis=1)
    if not np.all(np.isfinite(samples)):
        raise AudioError(f"{path}: audio contains NaN or Inf")
    return samples, int(rate)


def to_model_rate(samples: np.ndarray, rate: int) -> np.ndarray:
    """Polyphase resample to the model's 16 kHz input rate."""
    if rate == MODEL_SAMPLE_RATE:
        return samples
    if rate <= 0:
        raise AudioError(f"invalid sample rate {rate}")
    g = np.gcd(rate, MODEL_SAMPLE_RATE)
    return resample_poly(samples, MODEL_SAMPLE_RATE // g, rate // g)


def peak_normalize(samples: np.ndarray) -> tuple[np.ndarray, bool]:
    """Scale to unit peak, matching the stimulus pipeline's export
    convention. Digital silence has no peak to normalize; it passes
    through unchanged and the caller records that."""
    peak = float(np.max(np.abs(samples))) if samples.size else 0.0
    if peak == 0.0:
        return samples, False
    return samples / peak, True

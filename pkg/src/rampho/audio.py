"""Mono audio buffers: WAV I/O, polyphase resampling, peak normalization.

All downstream DSP consumes :class:`AudioBuffer`. Full scale is 1.0, so a
full-scale square wave has mean square 1.0 and sits at 0 dBov; levels in
this codebase are dBov under that convention.
"""

from __future__ import annotations

import math
import struct
from dataclasses import dataclass, field
from functools import lru_cache
from pathlib import Path

import numpy as np
from scipy.io import wavfile
from scipy.signal import firwin, kaiserord, resample_poly

from .errors import EmptyAudioError, SilentInputError, UnsupportedFormatError

CANONICAL_RATE = 16_000


@dataclass(frozen=True, eq=False)
class AudioBuffer:
    """Mono waveform plus its sample rate.

    Samples are float64 with full scale at 1.0. Values may transiently
    exceed [-1, 1] (mixing headroom); they must always be finite.
    """

    samples: np.ndarray = field(repr=False)
    sample_rate: int

    def __post_init__(self):
        samples = np.asarray(self.samples, dtype=np.float64)
        if samples.ndim != 1:
            raise ValueError(f"samples must be 1-D, got shape {samples.shape}")
        if samples.size < 1:
            raise EmptyAudioError("buffer must contain at least one sample")
        if not np.all(np.isfinite(samples)):
            raise ValueError("samples contain NaN or Inf")
        if int(self.sample_rate) <= 0:
            raise ValueError(f"sample_rate must be positive, got {self.sample_rate}")
        object.__setattr__(self, "samples", samples)
        object.__setattr__(self, "sample_rate", int(self.sample_rate))

    def __len__(self) -> int:
        return self.samples.size

    @property
    def duration_s(self) -> float:
        return self.samples.size / self.sample_rate

    def rms(self) -> float:
        return float(np.sqrt(np.mean(np.square(self.samples))))

    def rms_db(self) -> float:
        """Overall mean-square level in dBov; -inf for digital silence."""
        ms = float(np.mean(np.square(self.samples)))
        if ms == 0.0:
            return -math.inf
        return 10.0 * math.log10(ms)

    def scaled(self, gain: float) -> "AudioBuffer":
        return AudioBuffer(self.samples * gain, self.sample_rate)


def load_wav(path: str | Path) -> AudioBuffer:
    """Read a PCM16 or float32 RIFF/WAVE file as a mono buffer.

    Stereo input is downmixed by averaging the two channels. Integer
    samples are scaled to [-1, 1] by dividing by 32768.
    """
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"no such audio file: {path}")
    try:
        rate, data = wavfile.read(path)
    except ValueError as exc:
        raise UnsupportedFormatError(f"{path}: {exc}") from exc
    if data.size == 0:
        raise EmptyAudioError(f"{path} contains no audio frames")
    if data.dtype == np.int16:
        samples = data.astype(np.float64) / 32768.0
    elif data.dtype == np.float32:
        samples = data.astype(np.float64)
    else:
        raise UnsupportedFormatError(
            f"{path}: unsupported sample format {data.dtype}; "
            "expected 16-bit PCM or 32-bit float"
        )
    if samples.ndim == 2:
        if samples.shape[1] > 2:
            raise UnsupportedFormatError(
                f"{path}: {samples.shape[1]} channels; only mono/stereo supported"
            )
        samples = samples.mean(axis=1)
    return AudioBuffer(samples, int(rate))


def save_wav(buffer: AudioBuffer, path: str | Path) -> None:
    """Write a 32-bit float mono WAV: canonical 44-byte header + data chunk."""
    payload = buffer.samples.astype(np.float32).tobytes()
    header = struct.pack(
        "<4sI4s4sIHHIIHH4sI",
        b"RIFF",
        36 + len(payload),
        b"WAVE",
        b"fmt ",
        16,
        3,  # WAVE_FORMAT_IEEE_FLOAT
        1,  # mono
        buffer.sample_rate,
        buffer.sample_rate * 4,
        4,
        32,
        b"data",
        len(payload),
    )
    Path(path).write_bytes(header + payload)


@lru_cache(maxsize=32)
def _resample_kernel(up: int, down: int) -> np.ndarray:
    """Windowed-sinc anti-alias/anti-image FIR for a rational rate change.

    Designed at the upsampled rate with unit passband gain
    (resample_poly applies the `up` gain itself). Passband reaches
    0.99 of the narrower Nyquist so near-Nyquist tones survive, with
    >= 80 dB stopband rejection just above it.
    """
    max_rate = max(up, down)
    nyq = 1.0 / max_rate  # narrower Nyquist, relative to upsampled Nyquist
    transition = 0.03 * nyq
    numtaps, beta = kaiserord(85.0, transition)
    numtaps = max(numtaps, 64 * up)
    numtaps += 1 - numtaps % 2  # type I (odd) keeps the design symmetric
    return firwin(numtaps, 1.005 * nyq, window=("kaiser", beta))


def resample(buffer: AudioBuffer, target_rate: int) -> AudioBuffer:
    """Polyphase resample to `target_rate`.

    Output length is round(n * target_rate / input_rate). Same-rate input
    is returned unchanged.
    """
    if target_rate <= 0:
        raise ValueError(f"target_rate must be positive, got {target_rate}")
    if target_rate == buffer.sample_rate:
        return buffer
    g = math.gcd(buffer.sample_rate, target_rate)
    up, down = target_rate // g, buffer.sample_rate // g
    kernel = _resample_kernel(up, down)
    # resample_poly scales the kernel by `up` in place; hand it a copy.
    out = resample_poly(buffer.samples, up, down, window=kernel.copy())
    n_out = round(len(buffer) * target_rate / buffer.sample_rate)
    if n_out < 1:
        n_out = 1
    if len(out) < n_out:
        out = np.pad(out, (0, n_out - len(out)))
    return AudioBuffer(out[:n_out], target_rate)


def peak_normalize(buffer: AudioBuffer, peak: float = 1.0) -> AudioBuffer:
    """Scale so max |sample| equals `peak` (0 < peak <= 1)."""
    if not 0.0 < peak <= 1.0:
        raise ValueError(f"peak must be in (0, 1], got {peak}")
    current = float(np.max(np.abs(buffer.samples)))
    if current == 0.0:
        raise SilentInputError("cannot peak-normalize an all-zero buffer")
    return buffer.scaled(peak / current)

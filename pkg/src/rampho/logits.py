"""Frame logits: self-describing binary interchange format plus a
deterministic mock provider.

The neural acoustic model lives in a separate exporter process; this
module defines the file boundary between the two and a synthetic stand-in
so everything downstream runs without a model runtime.

Wire format (all integers little-endian):
  bytes 0-3   magic "W2VL"
  bytes 4-5   version u16 = 1
  bytes 6-7   reserved, zero
  u32 vocab_size, u32 frame_count, f32 frame_hop_s, u32 blank_index
  u32 manifest_len, then manifest_len bytes UTF-8: model_id line,
      then one token per line
  payload: frame_count x vocab_size float32, row-major

The file does not carry source_audio_id; readers recover it from the
file stem.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .audio import AudioBuffer
from .errors import (
    BadMagicError,
    CorruptPayloadError,
    NonFiniteValueError,
    UnsupportedVersionError,
)

MAGIC = b"W2VL"
FORMAT_VERSION = 1
_HEADER = struct.Struct("<4sHHIIfI")
FRAME_HOP_S = 0.02

# 31 active tokens plus the blank, mirroring a character-level CTC head.
_DEFAULT_TOKENS = ("<blank>",) + tuple("ABCDEFGHIJKLMNOPQRSTUVWXYZ") + ("|", "'", "-", ".", ",")


@dataclass(frozen=True)
class ModelManifest:
    model_id: str
    vocab: tuple[str, ...]
    blank_index: int
    frame_hop_s: float = FRAME_HOP_S

    def __post_init__(self):
        vocab = tuple(self.vocab)
        if len(vocab) < 2:
            raise ValueError("vocabulary needs the blank plus at least one active token")
        if not 0 <= self.blank_index < len(vocab):
            raise ValueError(
                f"blank_index {self.blank_index} outside vocabulary of {len(vocab)}"
            )
        if self.frame_hop_s <= 0:
            raise ValueError(f"frame_hop_s must be positive, got {self.frame_hop_s}")
        for tok in vocab:
            if tok == "" or "\n" in tok or "\r" in tok:
                raise ValueError(f"token {tok!r} is empty or contains a line break")
        if "\n" in self.model_id or "\r" in self.model_id:
            raise ValueError("model_id must be a single line")
        object.__setattr__(self, "vocab", vocab)
        # the wire format stores the hop as float32; canonicalize so a
        # write/read round trip compares equal
        object.__setattr__(self, "frame_hop_s", float(np.float32(self.frame_hop_s)))

    @property
    def vocab_size(self) -> int:
        return len(self.vocab)

    @property
    def active_vocab_size(self) -> int:
        return len(self.vocab) - 1


def default_manifest() -> ModelManifest:
    """32-token mock vocabulary: blank at index 0, 31 active tokens."""
    return ModelManifest(model_id="mock-peaked-v1", vocab=_DEFAULT_TOKENS, blank_index=0)


@dataclass(frozen=True)
class LogitsMatrix:
    values: np.ndarray = field(repr=False)
    manifest: ModelManifest
    source_audio_id: str = ""

    def __post_init__(self):
        values = np.asarray(self.values, dtype=np.float32)
        if values.ndim != 2:
            raise ValueError(f"logits must be 2-D, got shape {values.shape}")
        if values.shape[0] < 1:
            raise ValueError("logits must contain at least one frame")
        if values.shape[1] != self.manifest.vocab_size:
            raise ValueError(
                f"row width {values.shape[1]} != vocab_size {self.manifest.vocab_size}"
            )
        if not np.all(np.isfinite(values)):
            raise NonFiniteValueError("logits contain NaN or Inf")
        object.__setattr__(self, "values", values)

    @property
    def frame_count(self) -> int:
        return int(self.values.shape[0])


def write_logits_file(matrix: LogitsMatrix, path: str | Path) -> None:
    m = matrix.manifest
    manifest_text = "\n".join([m.model_id, *m.vocab]).encode("utf-8")
    header = _HEADER.pack(
        MAGIC,
        FORMAT_VERSION,
        0,
        m.vocab_size,
        matrix.frame_count,
        m.frame_hop_s,
        m.blank_index,
    )
    payload = np.ascontiguousarray(matrix.values, dtype="<f4").tobytes()
    with open(path, "wb") as fh:
        fh.write(header)
        fh.write(struct.pack("<I", len(manifest_text)))
        fh.write(manifest_text)
        fh.write(payload)


def read_logits_file(path: str | Path) -> LogitsMatrix:
    path = Path(path)
    blob = path.read_bytes()
    if len(blob) < _HEADER.size + 4:
        raise CorruptPayloadError(f"{path}: file shorter than the fixed header")
    magic, version, _reserved, vocab_size, frame_count, frame_hop_s, blank_index = (
        _HEADER.unpack_from(blob, 0)
    )
    if magic != MAGIC:
        raise BadMagicError(f"{path}: magic {magic!r}, expected {MAGIC!r}")
    if version != FORMAT_VERSION:
        raise UnsupportedVersionError(f"{path}: version {version}, supported: 1")
    (manifest_len,) = struct.unpack_from("<I", blob, _HEADER.size)
    offset = _HEADER.size + 4
    if len(blob) < offset + manifest_len:
        raise CorruptPayloadError(f"{path}: manifest block truncated")
    try:
        manifest_text = blob[offset : offset + manifest_len].decode("utf-8")
    except UnicodeDecodeError as exc:
        raise CorruptPayloadError(f"{path}: manifest is not valid UTF-8") from exc
    lines = manifest_text.split("\n")
    if len(lines) != vocab_size + 1:
        raise CorruptPayloadError(
            f"{path}: manifest lists {len(lines) - 1} tokens, header says {vocab_size}"
        )
    try:
        manifest = ModelManifest(
            model_id=lines[0],
            vocab=tuple(lines[1:]),
            blank_index=blank_index,
            frame_hop_s=frame_hop_s,
        )
    except ValueError as exc:
        raise CorruptPayloadError(f"{path}: {exc}") from exc

    offset += manifest_len
    expected = frame_count * vocab_size * 4
    if len(blob) - offset != expected:
        raise CorruptPayloadError(
            f"{path}: payload is {len(blob) - offset} bytes, header implies {expected}"
        )
    values = np.frombuffer(blob, dtype="<f4", offset=offset).reshape(frame_count, vocab_size)
    if not np.all(np.isfinite(values)):
        raise NonFiniteValueError(f"{path}: payload contains NaN or Inf")
    return LogitsMatrix(values=values.copy(), manifest=manifest, source_audio_id=path.stem)


SILENCE_GATE_DBOV = -50.0
_SILENCE_BLANK_LOGIT = 12.0
_ACTIVE_BLANK_LOGIT = -5.0
_CENTROID_QUANTUM_HZ = 125.0
_HASH_MULTIPLIER = 2654435761  # Knuth multiplicative hash


def mock_logits(
    buffer: AudioBuffer,
    manifest: ModelManifest,
    rng_seed: int,
    peakiness: float,
) -> LogitsMatrix:
    """Deterministic synthetic frame logits, one row per 20 ms hop.

    Quiet frames (short-time RMS below -50 dBov) become blank-dominant.
    Each active frame puts a logit of `peakiness` on one token picked by
    hashing the frame's quantized spectral centroid, zeros elsewhere, so
    higher peakiness means lower blank-excluded entropy.
    """
    if peakiness < 0:
        raise ValueError(f"peakiness must be >= 0, got {peakiness}")
    hop = round(manifest.frame_hop_s * buffer.sample_rate)
    n_frames = len(buffer) // hop
    if n_frames < 1:
        raise ValueError(
            f"buffer of {len(buffer)} samples is shorter than one {hop}-sample frame"
        )
    vocab_size = manifest.vocab_size
    active_ids = [i for i in range(vocab_size) if i != manifest.blank_index]

    frames = buffer.samples[: n_frames * hop].reshape(n_frames, hop)
    rms_db = 10.0 * np.log10(np.maximum(np.mean(np.square(frames), axis=1), 1e-300))
    silent = rms_db < SILENCE_GATE_DBOV

    spectra = np.abs(np.fft.rfft(frames, axis=1))
    freqs = np.fft.rfftfreq(hop, 1.0 / buffer.sample_rate)
    mass = np.sum(spectra, axis=1)
    centroid = np.where(mass > 0, spectra @ freqs / np.maximum(mass, 1e-300), 0.0)
    cells = np.floor(centroid / _CENTROID_QUANTUM_HZ).astype(np.int64)
    chosen = (cells * _HASH_MULTIPLIER) % len(active_ids)

    rng = np.random.default_rng(rng_seed)
    noise = rng.uniform(-1.0, 1.0, size=(n_frames, vocab_size))

    values = np.zeros((n_frames, vocab_size), dtype=np.float64)
    values[silent] = noise[silent]
    values[silent, manifest.blank_index] = _SILENCE_BLANK_LOGIT
    active = ~silent
    values[active, manifest.blank_index] = _ACTIVE_BLANK_LOGIT
    active_rows = np.flatnonzero(active)
    token_cols = np.asarray(active_ids)[chosen[active_rows]]
    values[active_rows, token_cols] = peakiness

    return LogitsMatrix(
        values=values.astype(np.float32),
        manifest=manifest,
        source_audio_id="mock",
    )

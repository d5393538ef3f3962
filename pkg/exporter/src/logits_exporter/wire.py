"""Writer for the .w2vl logits interchange format, version 1.

Layout (little-endian):

    bytes 0-3   magic "W2VL"
    u16         format version = 1
    u16         reserved = 0
    u32         vocab_size
    u32         frame_count
    f32         frame_hop_s
    u32         blank_index
    u32         manifest_len
    bytes       manifest: UTF-8, model-id line then one token per line
    f32[...]    frame_count x vocab_size logits, row-major

This is an independent implementation of the published layout; the
analysis package that consumes these files ships its own reader.
"""

from __future__ import annotations

import struct
from pathlib import Path
from typing import Sequence

import numpy as np

MAGIC = b"W2VL"
FORMAT_VERSION = 1

_HEADER = struct.Struct("<4sHHIIfI")


def write_w2vl(
    path: str | Path,
    logits: np.ndarray,
    model_line: str,
    tokens: Sequence[str],
    blank_index: int,
    frame_hop_s: float,
) -> None:
    """Serialize one utterance's logits. Raises ValueError on malformed
    inputs and OSError on write failure; callers map those to their own
    error taxonomy."""
    values = np.asarray(logits, dtype=np.float32)
    if values.ndim != 2 or values.shape[0] < 1:
        raise ValueError(f"logits must be a non-empty 2-D array, got shape {values.shape}")
    if values.shape[1] != len(tokens):
        raise ValueError(f"row width {values.shape[1]} != token count {len(tokens)}")
    if not np.all(np.isfinite(values)):
        raise ValueError("logits contain NaN or Inf")
    if not 0 <= blank_index < len(tokens):
        raise ValueError(f"blank_index {blank_index} outside vocabulary of {len(tokens)}")
    if frame_hop_s <= 0:
        raise ValueError(f"frame_hop_s must be positive, got {frame_hop_s}")
    for tok in tokens:
        if tok == "" or "\n" in tok or "\r" in tok:
            raise ValueError(f"token {tok!r} is empty or contains a line break")
    if "\n" in model_line or "\r" in model_line:
        raise ValueError("model line must not contain line breaks")

    manifest = "\n".join([model_line, *tokens]).encode("utf-8")
    header = _HEADER.pack(
        MAGIC,
        FORMAT_VERSION,
        0,
        len(tokens),
        values.shape[0],
        frame_hop_s,
        blank_index,
    )
    with open(path, "wb") as fh:
        fh.write(header)
        fh.write(struct.pack("<I", len(manifest)))
        fh.write(manifest)
        fh.write(np.ascontiguousarray(values, dtype="<f4").tobytes())

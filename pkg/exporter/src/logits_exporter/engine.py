"""Inference engine seam.

The exporter talks to a checkpoint through the small ``InferenceEngine``
protocol so the audio/serialization pipeline can be exercised without a
model runtime. ``HuggingFaceEngine`` is the production implementation;
tests substitute a deterministic stub.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Protocol

import numpy as np

from .audio import MODEL_SAMPLE_RATE
from .errors import ModelUnavailableError

DEFAULT_MODEL_ID = "facebook/wav2vec2-base-960h"


@dataclass(frozen=True)
class EngineOutput:
    """One utterance's raw pre-softmax logits plus the vocabulary they
    are indexed by."""

    logits: np.ndarray  # (frames, vocab) float32
    tokens: tuple[str, ...]
    blank_index: int
    frame_hop_s: float


class InferenceEngine(Protocol):
    model_id: str

    def infer(self, samples: np.ndarray) -> EngineOutput:
        """Run one whole-utterance forward pass over 16 kHz mono float
        samples in [-1, 1]."""
        ...


class HuggingFaceEngine:
    """CTC inference via a transformers checkpoint.

    Loading is eager so a bad model id fails before any audio work.
    The checkpoint's own feature extraction (e.g. zero-mean/unit-var
    input scaling) is applied as during training; the logits returned
    are the raw pre-softmax head outputs.
    """

    def __init__(self, model_id: str = DEFAULT_MODEL_ID, device: str | None = None):
        self.model_id = model_id
        try:
            import torch
            from transformers import AutoModelForCTC, AutoProcessor
        except ImportError as exc:
            raise ModelUnavailableError(
                f"model runtime not installed ({exc}); install the 'model' extra"
            ) from exc
        try:
            self._processor = AutoProcessor.from_pretrained(model_id)
            self._model = AutoModelForCTC.from_pretrained(model_id)
        except Exception as exc:
            raise ModelUnavailableError(f"cannot load checkpoint {model_id!r}: {exc}") from exc
        self._torch = torch
        self._model.eval()
        if device is not None:
            try:
                self._model.to(device)
            except (RuntimeError, ValueError) as exc:
                raise ModelUnavailableError(f"cannot move model to {device!r}: {exc}") from exc
        self._device = device

        config = self._model.config
        vocab_size = int(config.vocab_size)
        tokenizer = self._processor.tokenizer
        self._tokens = tuple(tokenizer.convert_ids_to_tokens(i) for i in range(vocab_size))
        # the CTC blank is the pad token by transformers convention
        self._blank_index = int(config.pad_token_id)
        self._frame_hop_s = float(math.prod(config.conv_stride)) / MODEL_SAMPLE_RATE

    def infer(self, samples: np.ndarray) -> EngineOutput:
        torch = self._torch
        inputs = self._processor(
            samples.astype(np.float32),
            sampling_rate=MODEL_SAMPLE_RATE,
            return_tensors="pt",
        )
        input_values = inputs.input_values
        if self._device is not None:
            input_values = input_values.to(self._device)
        with torch.no_grad():
            logits = self._model(input_values).logits[0]
        return EngineOutput(
            logits=logits.cpu().numpy().astype(np.float32),
            tokens=self._tokens,
            blank_index=self._blank_index,
            frame_hop_s=self._frame_hop_s,
        )

"""Fixtures for the exporter suite: a deterministic stub engine and
WAV-writing helpers. The stub stands in for the checkpoint so the
audio, manifest, and serialization plumbing can be tested hermetically;
checkpoint-dependent behavior lives in the skip-gated real-model
module."""

from __future__ import annotations

import string

import numpy as np
import pytest
from scipy.io import wavfile

from logits_exporter.engine import EngineOutput

STUB_TOKENS = ("<pad>",) + tuple(string.ascii_uppercase) + ("|", "'", "-", ".", "?")
assert len(STUB_TOKENS) == 32


class StubEngine:
    """Deterministic fake checkpoint: 0.02 s hop at 16 kHz, blank-peaked
    rows on quiet frames, one energy-keyed token elsewhere. Records what
    it was fed so tests can assert on the preprocessing."""

    model_id = "stub-ctc-v1"
    hop_s = 0.02

    def __init__(self):
        self.received: list[np.ndarray] = []

    def infer(self, samples: np.ndarray) -> EngineOutput:
        samples = np.asarray(samples, dtype=np.float64)
        self.received.append(samples.copy())
        hop = int(round(self.hop_s * 16_000))
        if len(samples) < hop:
            samples = np.pad(samples, (0, hop - len(samples)))
        n = len(samples) // hop
        frames = samples[: n * hop].reshape(n, hop)
        rms = np.sqrt((frames**2).mean(axis=1))
        silent = rms < 1e-4

        logits = np.full((n, 32), -4.0, dtype=np.float32)
        logits[:, 0] = np.where(silent, 10.0, -5.0)
        tok = 1 + (np.round(rms * 1e5).astype(np.int64) % 31)
        active = np.flatnonzero(~silent)
        logits[active, tok[active]] = 8.0
        return EngineOutput(
            logits=logits,
            tokens=STUB_TOKENS,
            blank_index=0,
            frame_hop_s=self.hop_s,
        )


@pytest.fixture
def stub_engine():
    return StubEngine()


@pytest.fixture
def stub_tokens():
    return STUB_TOKENS


@pytest.fixture
def stub_factory():
    """Engine factory for CLI injection; exposes the engines it built."""
    built: list[StubEngine] = []

    def factory(model_id: str, device):
        engine = StubEngine()
        built.append(engine)
        return engine

    factory.built = built
    return factory


def _tone(duration_s: float, rate: int, freq: float = 440.0, amp: float = 0.25) -> np.ndarray:
    t = np.arange(round(duration_s * rate)) / rate
    return amp * np.sin(2.0 * np.pi * freq * t)


@pytest.fixture
def make_wav(tmp_path):
    """Write a WAV and return its path. encoding: 'pcm16' or 'float32'."""

    def write(name: str, samples: np.ndarray, rate: int = 16_000, encoding: str = "pcm16"):
        path = tmp_path / name
        if encoding == "pcm16":
            data = np.clip(np.round(samples * 32767.0), -32768, 32767).astype(np.int16)
        elif encoding == "float32":
            data = samples.astype(np.float32)
        else:
            raise ValueError(encoding)
        wavfile.write(path, rate, data)
        return path

    return write


@pytest.fixture
def four_second_wav(make_wav):
    return make_wav("tone4s.wav", _tone(4.0, 16_000))


@pytest.fixture
def tone():
    return _tone

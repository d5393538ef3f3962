"""Checkpoint-dependent behavior, gated on local availability.

These tests need the actual wav2vec2 weights. They probe the local
cache only (no network), so on machines without the checkpoint the
whole module skips rather than hanging on a download. Everything
model-independent is covered by the stub-engine suites.
"""

from __future__ import annotations

import numpy as np
import pytest
from rampho.logits import read_logits_file

from logits_exporter import ExporterArgs, export_logits
from logits_exporter.engine import DEFAULT_MODEL_ID, HuggingFaceEngine


def _checkpoint_cached() -> bool:
    try:
        from transformers import AutoProcessor
    except ImportError:
        return False
    try:
        AutoProcessor.from_pretrained(DEFAULT_MODEL_ID, local_files_only=True)
    except Exception:
        return False
    return True


pytestmark = pytest.mark.skipif(
    not _checkpoint_cached(),
    reason=f"{DEFAULT_MODEL_ID} is not in the local model cache",
)


@pytest.fixture(scope="module")
def engine():
    return HuggingFaceEngine(DEFAULT_MODEL_ID)


def test_four_second_utterance(four_second_wav, tmp_path, engine):
    report = export_logits(ExporterArgs(four_second_wav, tmp_path / "t.w2vl"), engine=engine)
    assert abs(report.frame_count - 200) <= 2
    assert report.vocab_size == 32
    mat = read_logits_file(tmp_path / "t.w2vl")
    assert mat.manifest.frame_hop_s == float(np.float32(0.02))
    assert len(mat.manifest.vocab) == 32
    assert mat.manifest.vocab.count(mat.manifest.vocab[mat.manifest.blank_index]) == 1


def test_silence_is_blank_dominated(make_wav, tmp_path, engine):
    path = make_wav("silence.wav", np.zeros(64_000), encoding="float32")
    export_logits(ExporterArgs(path, tmp_path / "s.w2vl"), engine=engine)
    mat = read_logits_file(tmp_path / "s.w2vl")
    blank_frames = np.mean(np.argmax(mat.values, axis=1) == mat.manifest.blank_index)
    assert blank_frames > 0.95


def test_repeat_export_is_bit_identical(four_second_wav, tmp_path, engine):
    a, b = tmp_path / "a.w2vl", tmp_path / "b.w2vl"
    export_logits(ExporterArgs(four_second_wav, a), engine=engine)
    export_logits(ExporterArgs(four_second_wav, b), engine=engine)
    assert a.read_bytes() == b.read_bytes()

"""Exporter pipeline tests against the stub engine.

Format conformance is checked through the analysis package's own
reader: that reader is the published consumer of these files, so it is
the interface the exporter must satisfy.
"""

from __future__ import annotations

import numpy as np
import pytest
from rampho.logits import read_logits_file

from logits_exporter import (
    AudioError,
    ExporterArgs,
    IoError,
    ModelUnavailableError,
    export_logits,
)


def test_four_second_utterance_frame_count(four_second_wav, tmp_path, stub_engine):
    out = tmp_path / "tone4s.w2vl"
    report = export_logits(ExporterArgs(four_second_wav, out), engine=stub_engine)
    assert abs(report.frame_count - 200) <= 2
    assert report.vocab_size == 32
    assert report.output_path == out
    assert out.is_file()


def test_primary_reader_accepts_output(four_second_wav, tmp_path, stub_engine, stub_tokens):
    out = tmp_path / "tone4s.w2vl"
    export_logits(ExporterArgs(four_second_wav, out), engine=stub_engine)
    mat = read_logits_file(out)
    assert mat.manifest.vocab == stub_tokens
    assert mat.manifest.blank_index == 0
    assert mat.manifest.frame_hop_s == float(np.float32(0.02))
    assert mat.values.shape == (mat.frame_count, 32)
    assert mat.values.dtype == np.float32
    assert mat.source_audio_id == "tone4s"


def test_blank_token_is_unique(four_second_wav, tmp_path, stub_engine):
    out = tmp_path / "t.w2vl"
    export_logits(ExporterArgs(four_second_wav, out), engine=stub_engine)
    manifest = read_logits_file(out).manifest
    blank = manifest.vocab[manifest.blank_index]
    assert manifest.vocab.count(blank) == 1


@pytest.mark.parametrize("rate", [8_000, 22_050, 44_100, 48_000])
def test_resampled_input_keeps_duration(rate, make_wav, tmp_path, stub_engine, tone):
    path = make_wav(f"tone_{rate}.wav", tone(4.0, rate), rate=rate)
    report = export_logits(ExporterArgs(path, tmp_path / "r.w2vl"), engine=stub_engine)
    assert abs(report.frame_count - 200) <= 2
    # resampling, not truncation: the engine saw ~4 s worth of samples
    assert abs(len(stub_engine.received[0]) - 64_000) <= 64


def test_peak_normalization_applied(make_wav, tmp_path, stub_engine, tone):
    path = make_wav("quiet.wav", tone(1.0, 16_000, amp=0.05), encoding="float32")
    report = export_logits(ExporterArgs(path, tmp_path / "q.w2vl"), engine=stub_engine)
    peak = np.max(np.abs(stub_engine.received[0]))
    assert peak == pytest.approx(1.0, rel=1e-9)
    assert report.normalized
    assert read_logits_file(tmp_path / "q.w2vl").manifest.model_id == "stub-ctc-v1 norm=peak"


def test_silence_passes_through_unnormalized(make_wav, tmp_path, stub_engine):
    path = make_wav("silence.wav", np.zeros(32_000), encoding="float32")
    report = export_logits(ExporterArgs(path, tmp_path / "s.w2vl"), engine=stub_engine)
    assert np.max(np.abs(stub_engine.received[0])) == 0.0
    assert not report.normalized
    mat = read_logits_file(tmp_path / "s.w2vl")
    assert mat.manifest.model_id == "stub-ctc-v1 norm=none"
    blank_frames = np.mean(np.argmax(mat.values, axis=1) == mat.manifest.blank_index)
    assert blank_frames > 0.95


def test_stereo_is_downmixed(make_wav, tmp_path, stub_engine, tone):
    mono = tone(2.0, 16_000)
    stereo = np.stack([mono, 0.5 * mono], axis=1)
    path = make_wav("stereo.wav", stereo, encoding="float32")
    report = export_logits(ExporterArgs(path, tmp_path / "st.w2vl"), engine=stub_engine)
    assert stub_engine.received[0].ndim == 1
    assert abs(report.frame_count - 100) <= 2


def test_repeat_export_is_bit_identical(four_second_wav, tmp_path, stub_factory):
    a, b = tmp_path / "a.w2vl", tmp_path / "b.w2vl"
    export_logits(ExporterArgs(four_second_wav, a), engine=stub_factory("m", None))
    export_logits(ExporterArgs(four_second_wav, b), engine=stub_factory("m", None))
    assert a.read_bytes() == b.read_bytes()


def test_missing_input_raises(tmp_path, stub_engine):
    with pytest.raises(AudioError, match="nothing_here"):
        export_logits(
            ExporterArgs(tmp_path / "nothing_here.wav", tmp_path / "x.w2vl"),
            engine=stub_engine,
        )


def test_undecodable_input_raises(tmp_path, stub_engine):
    bad = tmp_path / "bad.wav"
    bad.write_bytes(b"this is not a wav file at all")
    with pytest.raises(AudioError):
        export_logits(ExporterArgs(bad, tmp_path / "x.w2vl"), engine=stub_engine)


def test_non_finite_audio_raises(make_wav, tmp_path, stub_engine):
    samples = np.zeros(16_000, dtype=np.float64)
    samples[100] = np.nan
    path = make_wav("nan.wav", samples, encoding="float32")
    with pytest.raises(AudioError, match="NaN"):
        export_logits(ExporterArgs(path, tmp_path / "x.w2vl"), engine=stub_engine)


def test_output_directory_is_created(four_second_wav, tmp_path, stub_engine):
    out = tmp_path / "deep" / "nested" / "out.w2vl"
    export_logits(ExporterArgs(four_second_wav, out), engine=stub_engine)
    assert out.is_file()


def test_unwritable_output_raises_io_error(four_second_wav, tmp_path, stub_engine):
    blocker = tmp_path / "blocker"
    blocker.write_text("a file, not a directory")
    with pytest.raises(IoError):
        export_logits(
            ExporterArgs(four_second_wav, blocker / "out.w2vl"), engine=stub_engine
        )


def test_unfetchable_model_raises(four_second_wav, tmp_path, monkeypatch):
    # forbid hub access so the load failure is immediate and hermetic
    monkeypatch.setenv("HF_HUB_OFFLINE", "1")
    monkeypatch.setenv("TRANSFORMERS_OFFLINE", "1")
    pytest.importorskip("transformers")
    with pytest.raises(ModelUnavailableError, match="no-such-org/no-such-model"):
        export_logits(
            ExporterArgs(
                four_second_wav,
                tmp_path / "x.w2vl",
                model_id="no-such-org/no-such-model",
            )
        )

"""Orchestration: WAV in, .w2vl out."""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

from . import audio, wire
from .engine import DEFAULT_MODEL_ID, EngineOutput, InferenceEngine
from .errors import IoError


@dataclass(frozen=True)
class ExporterArgs:
    input_wav_path: str | Path
    output_logits_path: str | Path
    model_id: str = DEFAULT_MODEL_ID
    device: str | None = None


@dataclass(frozen=True)
class ExportReport:
    output_path: Path
    frame_count: int
    vocab_size: int
    normalized: bool


def export_logits(args: ExporterArgs, engine: InferenceEngine | None = None) -> ExportReport:
    """Decode the input WAV, resample to 16 kHz, peak-normalize, run one
    whole-utterance forward pass, and serialize the raw logits.

    ``engine`` defaults to a checkpoint loaded from ``args.model_id``;
    passing one skips model loading entirely. The manifest's model line
    records whether normalization was applied (silence cannot be
    normalized), so downstream analysis can tell how the file was made.
    """
    samples, rate = audio.load_mono(args.input_wav_path)
    samples = audio.to_model_rate(samples, rate)
    samples, normalized = audio.peak_normalize(samples)

    if engine is None:
        from .engine import HuggingFaceEngine

        engine = HuggingFaceEngine(args.model_id, args.device)
    out: EngineOutput = engine.infer(samples)

    out_path = Path(args.output_logits_path)
    model_line = f"{engine.model_id} norm={'peak' if normalized else 'none'}"
    try:
        out_path.parent.mkdir(parents=True, exist_ok=True)
        wire.write_w2vl(
            out_path,
            out.logits,
            model_line,
            out.tokens,
            out.blank_index,
            out.frame_hop_s,
        )
    except OSError as exc:
        raise IoError(f"cannot write {out_path}: {exc}") from exc
    return ExportReport(
        output_path=out_path,
        frame_count=int(out.logits.shape[0]),
        vocab_size=len(out.tokens),
        normalized=normalized,
    )

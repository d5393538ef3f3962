"""Command line entry point.

Exit codes: 0 success, 2 bad arguments, 3 missing/unreadable input or
unavailable model, 4 export failure.
"""

from __future__ import annotations

import argparse
import sys
from typing import Callable

from .engine import DEFAULT_MODEL_ID, InferenceEngine
from .errors import AudioError, ExporterError, ModelUnavailableError
from .exporter import ExporterArgs, export_logits

EngineFactory = Callable[[str, "str | None"], InferenceEngine]


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="export-logits",
        description="Run a CTC checkpoint over one WAV file and write its "
        "raw frame logits as a .w2vl file.",
    )
    parser.add_argument("--in", dest="input_path", required=True, metavar="FILE.wav")
    parser.add_argument("--out", dest="output_path", required=True, metavar="FILE.w2vl")
    parser.add_argument("--model", default=DEFAULT_MODEL_ID, help="checkpoint id or local path")
    parser.add_argument("--device", default=None, help="inference device hint, e.g. cpu or cuda")
    return parser


def main(argv: list[str] | None = None, engine_factory: EngineFactory | None = None) -> int:
    opts = _build_parser().parse_args(argv)
    args = ExporterArgs(
        input_wav_path=opts.input_path,
        output_logits_path=opts.output_path,
        model_id=opts.model,
        device=opts.device,
    )
    engine = engine_factory(opts.model, opts.device) if engine_factory is not None else None
    try:
        report = export_logits(args, engine=engine)
    except (AudioError, ModelUnavailableError) as exc:
        print(f"export-logits: {exc}", file=sys.stderr)
        return 3
    except ExporterError as exc:
        print(f"export-logits: {exc}", file=sys.stderr)
        return 4
    norm = "peak-normalized" if report.normalized else "not normalized (silence)"
    print(
        f"wrote {report.frame_count} frames x {report.vocab_size} vocab "
        f"to {report.output_path} ({norm})"
    )
    return 0


if __name__ == "__main__":
    raise SystemExit(main())

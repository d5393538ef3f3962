"""Experiment orchestration.

Two-phase flow: `synthesize` materializes the calibrated stimulus grid as
WAVs plus a JSON cell ledger; `analyze` turns each stimulus into frame
logits (deterministic mock, or files produced by an external exporter),
aggregates entropy, and writes the CSV, the figure, and the run manifest.
`run` is synthesize followed by analyze, always through the on-disk
artifacts so the single and two-phase flows are byte-identical.
"""

from __future__ import annotations

import csv
import datetime as _dt
import hashlib
import json
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from . import __version__
from .audio import AudioBuffer, CANONICAL_RATE, load_wav, resample, save_wav
from .config import ExperimentConfig
from .entropy import (
    SweepResult,
    SweepRow,
    aggregate_trace,
    compute_crossovers,
)
from .errors import CellError, ClippingWarning, MissingLogitsError, RamphoError
from .logits import default_manifest, mock_logits, read_logits_file
from .maskers import measure_ltas, save_ltas
from .mixer import build_stimulus_grid
from .plotting import emit_plot, fmt_snr

CSV_HEADER = (
    "condition,snr_db,utterance_id,mean_bits,median_bits,normalized_mean,"
    "included_frames,excluded_frames,target_active_level_db,masker_active_level_db"
)

# Mock-mode shape of the per-cell logit gap over (condition, SNR): gap =
# peakiness * (base + slope * snr). Chosen so smoke runs reproduce the
# qualitative sweep geometry (talker masker cheaper at low SNR, costlier
# at high SNR, with an in-range crossover); it is a synthetic profile for
# exercising the pipeline, not model output.
MOCK_GAP_PROFILE = {
    "ENG": (3.47, 0.1215),
    "CS": (2.70, 0.1775),
    "SSN": (2.90, 0.17),
}
_MOCK_GAP_DEFAULT = (3.0, 0.15)


@dataclass(frozen=True)
class RunPaths:
    output_dir: Path
    stimuli_dir: Path
    results_csv: Path
    figure_svg: Path
    manifest_txt: Path
    cells_json: Path
    ltas_txt: Path

    @classmethod
    def from_config(cls, config: ExperimentConfig) -> "RunPaths":
        out = config.output_dir
        return cls(
            output_dir=out,
            stimuli_dir=out / "stimuli",
            results_csv=out / "results.csv",
            figure_svg=out / "figure1.svg",
            manifest_txt=out / "run_manifest.txt",
            cells_json=out / "stimuli" / "cells.json",
            ltas_txt=out / "ltas_profile.txt",
        )


def _sha256(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


def _load_canonical(path: Path) -> AudioBuffer:
    return resample(load_wav(path), CANONICAL_RATE)


def _concat(buffers: list[AudioBuffer]) -> AudioBuffer:
    return AudioBuffer(
        np.concatenate([b.samples for b in buffers]), buffers[0].sample_rate
    )


def stimulus_rel_path(utterance_id: str, condition: str, snr_db: float, multi: bool) -> str:
    name = f"{condition}_{fmt_snr(snr_db)}dB.wav"
    return f"{utterance_id}/{name}" if multi else name


def _ltas_reference(
    config: ExperimentConfig, targets: list[AudioBuffer], masker: AudioBuffer
) -> AudioBuffer:
    mode = config.ssn_reference
    if mode == "target":
        return _concat(targets)
    if mode == "masker":
        return masker
    if mode == "both":
        return _concat(targets + [masker])
    return _load_canonical(Path(mode))


def synthesize(config: ExperimentConfig) -> dict:
    """Build and export every (utterance, condition, SNR) stimulus.

    Returns the cell ledger that is also written to stimuli/cells.json.
    """
    paths = RunPaths.from_config(config)
    paths.stimuli_dir.mkdir(parents=True, exist_ok=True)

    targets = [_load_canonical(p) for p in config.target_paths]
    utt_ids = [p.stem for p in config.target_paths]
    masker = _load_canonical(config.eng_masker_path)
    ltas = measure_ltas(_ltas_reference(config, targets, masker))
    save_ltas(ltas, paths.ltas_txt)

    multi = len(targets) > 1
    fit_seeds = [
        int(s.generate_state(1)[0])
        for s in np.random.SeedSequence(config.mix_seed).spawn(len(targets))
    ]
    cells = []
    for utt_id, target, fit_seed in zip(utt_ids, targets, fit_seeds):
        mixtures = build_stimulus_grid(
            target,
            masker,
            config.shield,
            ltas,
            config.grid,
            config.target_level_db,
            rng_seed=fit_seed,
            ssn_seed=config.ssn_seed,
        )
        for mix in mixtures:
            rel = stimulus_rel_path(utt_id, mix.condition_id, mix.snr_db, multi)
            wav_path = paths.stimuli_dir / rel
            wav_path.parent.mkdir(parents=True, exist_ok=True)
            audio = mix.audio
            peak = float(np.max(np.abs(audio.samples)))
            if peak > 1.0:
                if config.export_clipping == "hard_clip":
                    audio = AudioBuffer(np.clip(audio.samples, -1.0, 1.0), audio.sample_rate)
                else:
                    warnings.warn(
                        ClippingWarning(
                            f"{rel}: peak {peak:.3f} exceeds full scale; written unclipped"
                        ),
                        stacklevel=2,
                    )
            save_wav(audio, wav_path)
            cells.append(
                {
                    "utterance_id": utt_id,
                    "condition": mix.condition_id,
                    "snr_db": mix.snr_db,
                    "wav": rel,
                    "sha256": _sha256(wav_path),
                    "target_active_level_db": mix.target_active_level_db,
                    "masker_active_level_db": mix.masker_active_level_db,
                }
            )

    meta = {
        "version": 1,
        "sample_rate": CANONICAL_RATE,
        "multi_utterance": multi,
        "inputs": {
            "targets": {p.stem: _sha256(p) for p in config.target_paths},
            "eng_masker": _sha256(config.eng_masker_path),
        },
        "seeds": {
            "shield": config.shield.rng_seed,
            "ssn": config.ssn_seed,
            "mix": config.mix_seed,
        },
        "target_level_db": config.target_level_db,
        "cells": cells,
    }
    paths.cells_json.write_text(json.dumps(meta, indent=2, sort_keys=True) + "\n")
    return meta


def mock_cell_peakiness(peakiness: float, condition: str, snr_db: float) -> float:
    base, slope = MOCK_GAP_PROFILE.get(condition, _MOCK_GAP_DEFAULT)
    return peakiness * (base + slope * snr_db)


def _mock_cell_seed(base_seed: int, cell_index: int) -> int:
    return int(np.random.SeedSequence([base_seed, cell_index]).generate_state(1)[0])


def _analyze_cell(
    config: ExperimentConfig, paths: RunPaths, multi: bool, index: int, cell: dict
) -> SweepRow:
    condition, snr_db = cell["condition"], float(cell["snr_db"])
    utt_id = cell["utterance_id"]
    try:
        wav_path = paths.stimuli_dir / cell["wav"]
        if not wav_path.is_file():
            raise FileNotFoundError(
                f"stimulus {cell['wav']} missing; run `rampho synthesize` first"
            )
        if config.mock is not None:
            buffer = load_wav(wav_path)
            matrix = mock_logits(
                buffer,
                default_manifest(),
                rng_seed=_mock_cell_seed(config.mock.seed, index),
                peakiness=mock_cell_peakiness(config.mock.peakiness, condition, snr_db),
            )
        else:
            name = f"{condition}_{fmt_snr(snr_db)}dB.w2vl"
            rel = f"{utt_id}/{name}" if multi else name
            logits_path = config.logits_dir / rel
            if not logits_path.is_file():
                raise MissingLogitsError(
                    f"expected logits file {name} not found at {logits_path}"
                )
            matrix = read_logits_file(logits_path)
        trace = aggregate_trace(matrix, config.silence_exclusion_blank_prob)
    except FileNotFoundError:
        raise
    except MissingLogitsError:
        raise
    except (RamphoError, ValueError) as exc:
        raise CellError(condition, snr_db, exc) from exc
    return SweepRow(
        condition_id=condition,
        snr_db=snr_db,
        utterance_id=utt_id,
        mean_bits=trace.mean_bits,
        median_bits=trace.median_bits,
        normalized_mean=trace.normalized_mean,
        included_frames=trace.included_frames,
        excluded_frames=trace.excluded_frames,
        target_active_level_db=float(cell["target_active_level_db"]),
        masker_active_level_db=float(cell["masker_active_level_db"]),
    )


def analyze(config: ExperimentConfig, jobs: int = 1) -> SweepResult:
    """Turn synthesized stimuli into the CSV, figure, and manifest."""
    paths = RunPaths.from_config(config)
    if not paths.cells_json.is_file():
        raise FileNotFoundError(
            f"{paths.cells_json} not found; run `rampho synthesize` first"
        )
    meta = json.loads(paths.cells_json.read_text())
    multi = bool(meta.get("multi_utterance"))
    cells = meta["cells"]

    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            rows = list(
                pool.map(
                    lambda item: _analyze_cell(config, paths, multi, item[0], item[1]),
                    enumerate(cells),
                )
            )
    else:
        rows = [_analyze_cell(config, paths, multi, i, c) for i, c in enumerate(cells)]

    result = SweepResult(tuple(rows))
    result = replace(result, crossover_points=compute_crossovers(result))
    write_results_csv(result, paths.results_csv)
    emit_plot(result, paths.figure_svg)
    _write_manifest(config, paths, meta, result)
    return result


def run(config: ExperimentConfig, jobs: int = 1) -> SweepResult:
    synthesize(config)
    return analyze(config, jobs=jobs)


def write_results_csv(result: SweepResult, path: Path) -> None:
    lines = [CSV_HEADER]
    for r in result.rows:
        lines.append(
            f"{r.condition_id},{fmt_snr(r.snr_db)},{r.utterance_id},"
            f"{r.mean_bits:.9f},{r.median_bits:.9f},{r.normalized_mean:.9f},"
            f"{r.included_frames},{r.excluded_frames},"
            f"{r.target_active_level_db:.4f},{r.masker_active_level_db:.4f}"
        )
    Path(path).write_text("\n".join(lines) + "\n")


def load_results_csv(path: Path) -> SweepResult:
    path = Path(path)
    if not path.is_file():
        raise FileNotFoundError(f"{path} not found; run `rampho analyze` first")
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or ",".join(reader.fieldnames) != CSV_HEADER:
            raise RamphoError(f"{path}: unexpected CSV header")
        rows = tuple(
            SweepRow(
                condition_id=rec["condition"],
                snr_db=float(rec["snr_db"]),
                utterance_id=rec["utterance_id"],
                mean_bits=float(rec["mean_bits"]),
                median_bits=float(rec["median_bits"]),
                normalized_mean=float(rec["normalized_mean"]),
                included_frames=int(rec["included_frames"]),
                excluded_frames=int(rec["excluded_frames"]),
                target_active_level_db=float(rec["target_active_level_db"]),
                masker_active_level_db=float(rec["masker_active_level_db"]),
            )
            for rec in reader
        )
    result = SweepResult(rows)
    return replace(result, crossover_points=compute_crossovers(result))


def plot_from_csv(config: ExperimentConfig) -> SweepResult:
    paths = RunPaths.from_config(config)
    result = load_results_csv(paths.results_csv)
    emit_plot(result, paths.figure_svg)
    return result


def _write_manifest(
    config: ExperimentConfig, paths: RunPaths, meta: dict, result: SweepResult
) -> None:
    lines = [
        f"tool_version: {__version__}",
        f"generated_at: {_dt.datetime.now(_dt.timezone.utc).isoformat(timespec='seconds')}",
        "",
        "config:",
        *("  " + line for line in config.echo().rstrip("\n").split("\n")),
        "",
        "input_hashes:",
        *(
            f"  target {utt}: {digest}"
            for utt, digest in sorted(meta["inputs"]["targets"].items())
        ),
        f"  eng_masker: {meta['inputs']['eng_masker']}",
        "",
        "cells:",
    ]
    provider = "mock" if config.mock is not None else "logits_dir"
    for cell in meta["cells"]:
        lines.append(
            f"  {cell['utterance_id']} {cell['condition']} {fmt_snr(float(cell['snr_db']))}dB "
            f"wav={cell['wav']} sha256={cell['sha256']} provider={provider}"
        )
    lines += [
        "",
        "crossovers:",
        *(
            f"  {a}/{b}: " + (f"{snr:.3f} dB" if snr is not None else "none")
            for (a, b), snr in sorted(result.crossover_points.items())
        ),
    ]
    paths.manifest_txt.write_text("\n".join(lines) + "\n")

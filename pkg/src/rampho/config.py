"""Declarative experiment configuration.

YAML key/value tree, fail-closed: unknown keys are errors, as are
duplicate SNR points or configuring both logits providers at once.
Relative paths resolve against the config file's directory.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np
import yaml

from .errors import (
    BandOutOfRangeError,
    ConfigParseError,
    ConfigValidationError,
)
from .maskers import ShieldParams
from .mixer import DEFAULT_SNR_POINTS_DB, SnrGrid

SSN_REFERENCE_MODES = ("target", "masker", "both")
EXPORT_CLIPPING_MODES = ("warn", "hard_clip")

_TOP_KEYS = {
    "target_path",
    "eng_masker_path",
    "snr_points_db",
    "target_level_db",
    "shield",
    "ssn_reference",
    "ssn_seed",
    "mix_seed",
    "provider",
    "silence_exclusion_blank_prob",
    "output_dir",
    "export_clipping",
}
_SHIELD_KEYS = {"band_low", "band_high", "taper_half_width", "rng_seed"}
_PROVIDER_KEYS = {"mock", "logits_dir"}
_MOCK_KEYS = {"seed", "peakiness"}


@dataclass(frozen=True)
class MockProviderConfig:
    seed: int = 0
    peakiness: float = 1.0


@dataclass(frozen=True)
class ExperimentConfig:
    target_paths: tuple[Path, ...]
    eng_masker_path: Path
    grid: SnrGrid
    target_level_db: float
    shield: ShieldParams
    ssn_reference: str  # one of SSN_REFERENCE_MODES or an existing file path
    ssn_seed: int
    mix_seed: int
    mock: MockProviderConfig | None
    logits_dir: Path | None
    silence_exclusion_blank_prob: float
    output_dir: Path
    export_clipping: str

    def with_overrides(
        self, output_dir: str | None = None, seed: int | None = None
    ) -> "ExperimentConfig":
        """Apply CLI overrides; one --seed reseeds every random stream."""
        cfg = self
        if output_dir is not None:
            cfg = replace(cfg, output_dir=Path(output_dir))
        if seed is not None:
            shield_s, ssn_s, mix_s, mock_s = (
                int(s.generate_state(1)[0]) for s in np.random.SeedSequence(seed).spawn(4)
            )
            cfg = replace(
                cfg,
                shield=replace(cfg.shield, rng_seed=shield_s),
                ssn_seed=ssn_s,
                mix_seed=mix_s,
                mock=replace(cfg.mock, seed=mock_s) if cfg.mock else None,
            )
        return cfg

    def echo(self) -> str:
        """Fully resolved config as deterministic text for the run manifest."""
        lines = [
            "target_path:",
            *[f"  - {p}" for p in self.target_paths],
            f"eng_masker_path: {self.eng_masker_path}",
            f"snr_points_db: [{', '.join(f'{p:g}' for p in self.grid.snr_points_db)}]",
            f"target_level_db: {self.target_level_db:g}",
            "shield:",
            f"  band_low: {self.shield.band_low:g}",
            f"  band_high: {self.shield.band_high:g}",
            f"  taper_half_width: {self.shield.taper_half_width:g}",
            f"  rng_seed: {self.shield.rng_seed}",
            f"ssn_reference: {self.ssn_reference}",
            f"ssn_seed: {self.ssn_seed}",
            f"mix_seed: {self.mix_seed}",
        ]
        if self.mock is not None:
            lines += [
                "provider:",
                "  mock:",
                f"    seed: {self.mock.seed}",
                f"    peakiness: {self.mock.peakiness:g}",
            ]
        else:
            lines += ["provider:", f"  logits_dir: {self.logits_dir}"]
        lines += [
            f"silence_exclusion_blank_prob: {self.silence_exclusion_blank_prob:g}",
            f"output_dir: {self.output_dir}",
            f"export_clipping: {self.export_clipping}",
        ]
        return "\n".join(lines) + "\n"


def _fail(field: str, message: str) -> ConfigValidationError:
    return ConfigValidationError(f"{field}: {message}")


def _require_mapping(node, field: str) -> dict:
    if node is None:
        return {}
    if not isinstance(node, dict):
        raise _fail(field, f"expected a key/value mapping, got {type(node).__name__}")
    return node


def _check_keys(node: dict, allowed: set[str], field: str) -> None:
    unknown = sorted(set(node) - allowed)
    if unknown:
        raise _fail(field, f"unknown key(s) {', '.join(unknown)}")


def _number(node, field: str) -> float:
    if isinstance(node, bool) or not isinstance(node, (int, float)):
        raise _fail(field, f"expected a number, got {node!r}")
    return float(node)


def _integer(node, field: str) -> int:
    if isinstance(node, bool) or not isinstance(node, int):
        raise _fail(field, f"expected an integer, got {node!r}")
    return node


def _existing_file(node, field: str, base: Path) -> Path:
    if not isinstance(node, str) or not node:
        raise _fail(field, f"expected a file path, got {node!r}")
    path = (base / node).resolve() if not Path(node).is_absolute() else Path(node)
    if not path.is_file():
        raise FileNotFoundError(f"{field}: no such file: {path}")
    return path


def validate_config(raw: str, base_dir: str | Path = ".") -> ExperimentConfig:
    """Parse and validate config text; fill documented defaults."""
    base = Path(base_dir)
    try:
        tree = yaml.safe_load(raw)
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        where = f" at line {mark.line + 1}" if mark is not None else ""
        raise ConfigParseError(f"config is not valid YAML{where}: {exc}") from exc
    tree = _require_mapping(tree, "config")
    _check_keys(tree, _TOP_KEYS, "config")

    if "target_path" not in tree:
        raise _fail("target_path", "required")
    raw_targets = tree["target_path"]
    if isinstance(raw_targets, str):
        raw_targets = [raw_targets]
    if not isinstance(raw_targets, list) or not raw_targets:
        raise _fail("target_path", "expected a path or a non-empty list of paths")
    targets = tuple(
        _existing_file(p, f"target_path[{i}]", base) for i, p in enumerate(raw_targets)
    )
    stems = [p.stem for p in targets]
    if len(set(stems)) != len(stems):
        raise _fail("target_path", "utterance file stems must be unique")

    if "eng_masker_path" not in tree:
        raise _fail("eng_masker_path", "required")
    eng_path = _existing_file(tree["eng_masker_path"], "eng_masker_path", base)

    points = tree.get("snr_points_db", list(DEFAULT_SNR_POINTS_DB))
    if not isinstance(points, list) or not points:
        raise _fail("snr_points_db", "expected a non-empty list of dB values")
    values = [_number(p, f"snr_points_db[{i}]") for i, p in enumerate(points)]
    if len(set(values)) != len(values):
        raise _fail("snr_points_db", f"duplicate SNR point in {values}")
    try:
        grid = SnrGrid(tuple(sorted(values)))
    except ValueError as exc:
        raise _fail("snr_points_db", str(exc)) from exc

    target_level_db = _number(tree.get("target_level_db", -26.0), "target_level_db")

    shield_node = _require_mapping(tree.get("shield"), "shield")
    _check_keys(shield_node, _SHIELD_KEYS, "shield")
    try:
        shield = ShieldParams(
            band_low=_number(shield_node.get("band_low", 1000.0), "shield.band_low"),
            band_high=_number(shield_node.get("band_high", 4000.0), "shield.band_high"),
            taper_half_width=_number(
                shield_node.get("taper_half_width", 100.0), "shield.taper_half_width"
            ),
            rng_seed=_integer(shield_node.get("rng_seed", 0), "shield.rng_seed"),
        )
    except BandOutOfRangeError as exc:
        raise _fail("shield", str(exc)) from exc

    ssn_reference = tree.get("ssn_reference", "both")
    if not isinstance(ssn_reference, str) or not ssn_reference:
        raise _fail("ssn_reference", f"expected a mode or path, got {ssn_reference!r}")
    if ssn_reference not in SSN_REFERENCE_MODES:
        ssn_reference = str(_existing_file(ssn_reference, "ssn_reference", base))

    ssn_seed = _integer(tree.get("ssn_seed", 0), "ssn_seed")
    mix_seed = _integer(tree.get("mix_seed", 0), "mix_seed")

    provider_node = _require_mapping(tree.get("provider"), "provider")
    _check_keys(provider_node, _PROVIDER_KEYS, "provider")
    if "mock" in provider_node and "logits_dir" in provider_node:
        raise _fail("provider", "configure exactly one of mock or logits_dir, not both")
    mock: MockProviderConfig | None = None
    logits_dir: Path | None = None
    if "logits_dir" in provider_node:
        node = provider_node["logits_dir"]
        if not isinstance(node, str) or not node:
            raise _fail("provider.logits_dir", f"expected a directory path, got {node!r}")
        logits_dir = (base / node).resolve() if not Path(node).is_absolute() else Path(node)
    else:
        mock_node = _require_mapping(provider_node.get("mock"), "provider.mock")
        _check_keys(mock_node, _MOCK_KEYS, "provider.mock")
        peakiness = _number(mock_node.get("peakiness", 1.0), "provider.mock.peakiness")
        if peakiness < 0:
            raise _fail("provider.mock.peakiness", "must be >= 0")
        mock = MockProviderConfig(
            seed=_integer(mock_node.get("seed", 0), "provider.mock.seed"),
            peakiness=peakiness,
        )

    threshold = _number(
        tree.get("silence_exclusion_blank_prob", 0.999), "silence_exclusion_blank_prob"
    )
    if not 0.0 < threshold <= 1.0:
        raise _fail("silence_exclusion_blank_prob", f"must be in (0, 1], got {threshold}")

    out_node = tree.get("output_dir", "out")
    if not isinstance(out_node, str) or not out_node:
        raise _fail("output_dir", f"expected a directory path, got {out_node!r}")
    output_dir = (base / out_node).resolve() if not Path(out_node).is_absolute() else Path(out_node)

    clipping = tree.get("export_clipping", "warn")
    if clipping not in EXPORT_CLIPPING_MODES:
        raise _fail(
            "export_clipping", f"expected one of {EXPORT_CLIPPING_MODES}, got {clipping!r}"
        )

    return ExperimentConfig(
        target_paths=targets,
        eng_masker_path=eng_path,
        grid=grid,
        target_level_db=target_level_db,
        shield=shield,
        ssn_reference=ssn_reference,
        ssn_seed=ssn_seed,
        mix_seed=mix_seed,
        mock=mock,
        logits_dir=logits_dir,
        silence_exclusion_blank_prob=threshold,
        output_dir=output_dir,
        export_clipping=clipping,
    )


def load_config(path: str | Path) -> ExperimentConfig:
    path = Path(path)
    if not path.is_file():
        raise FileNotFoundError(f"no such config file: {path}")
    return validate_config(path.read_text(), base_dir=path.parent)

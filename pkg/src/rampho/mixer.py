"""Calibrated target+masker mixing across the SNR sweep.

SNR is the difference of P.56 active levels between the calibrated target
and the calibrated masker. Gains are applied as exact scalars computed
from one measurement per component, so even the 100 dB pristine cell
(masker far below any measurable level) carries the intended ratio.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .audio import AudioBuffer
from .errors import LengthMismatchError, TooShortError
from .levels import active_speech_level
from .maskers import LtasProfile, ShieldParams, concentration_shield, synthesize_ssn

CONDITIONS = ("ENG", "CS", "SSN")
DEFAULT_SNR_POINTS_DB = (0.0, 5.0, 10.0, 15.0, 20.0, 100.0)
CROSSFADE_S = 0.05
MIN_MASKER_S = 1.0


@dataclass(frozen=True)
class SnrGrid:
    snr_points_db: tuple[float, ...] = DEFAULT_SNR_POINTS_DB

    def __post_init__(self):
        pts = tuple(float(p) for p in self.snr_points_db)
        if len(pts) < 1:
            raise ValueError("SNR grid must contain at least one point")
        if not all(math.isfinite(p) for p in pts):
            raise ValueError("SNR points must be finite")
        if any(b <= a for a, b in zip(pts, pts[1:])):
            raise ValueError(f"SNR points must be strictly increasing, got {pts}")
        object.__setattr__(self, "snr_points_db", pts)


@dataclass(frozen=True)
class Mixture:
    audio: AudioBuffer = field(repr=False)
    condition_id: str
    snr_db: float
    target_active_level_db: float
    masker_active_level_db: float

    def __post_init__(self):
        if self.condition_id not in CONDITIONS:
            raise ValueError(f"unknown condition {self.condition_id!r}")


def fit_masker_length(masker: AudioBuffer, target_len: int, rng_seed: int) -> AudioBuffer:
    """Cut or loop the masker to exactly `target_len` samples.

    Longer maskers contribute a seeded random contiguous excerpt; shorter
    ones are looped with 50 ms equal-power crossfades at the seams.
    """
    if masker.duration_s < MIN_MASKER_S:
        raise TooShortError(
            f"masker must be >= {MIN_MASKER_S:.0f} s, got {masker.duration_s:.2f} s"
        )
    if target_len < 1:
        raise ValueError("target_len must be >= 1")
    n = len(masker)
    if n == target_len:
        return masker
    if n > target_len:
        rng = np.random.default_rng(rng_seed)
        start = int(rng.integers(0, n - target_len + 1))
        return AudioBuffer(masker.samples[start : start + target_len], masker.sample_rate)

    xf = round(CROSSFADE_S * masker.sample_rate)
    theta = np.linspace(0.0, np.pi / 2.0, xf, endpoint=False)
    fade_out, fade_in = np.cos(theta), np.sin(theta)
    out = masker.samples.copy()
    while out.size < target_len:
        blend = out[-xf:] * fade_out + masker.samples[:xf] * fade_in
        out = np.concatenate([out[:-xf], blend, masker.samples[xf:]])
    return AudioBuffer(out[:target_len], masker.sample_rate)


def calibrate_components(
    target: AudioBuffer,
    masker: AudioBuffer,
    snr_db: float,
    target_level_db: float,
) -> tuple[AudioBuffer, AudioBuffer]:
    """Gain both components for the requested SNR; no summing yet.

    Each component's active level is measured once and corrected by an
    exact scalar; the masker gain folds in the SNR offset so no
    measurement ever happens on a deeply attenuated signal.
    """
    if len(target) != len(masker) or target.sample_rate != masker.sample_rate:
        raise LengthMismatchError(
            f"target {len(target)} @ {target.sample_rate} Hz vs "
            f"masker {len(masker)} @ {masker.sample_rate} Hz"
        )
    t_level = active_speech_level(target).active_level_db
    m_level = active_speech_level(masker).active_level_db
    cal_target = target.scaled(10.0 ** ((target_level_db - t_level) / 20.0))
    cal_masker = masker.scaled(10.0 ** ((target_level_db - snr_db - m_level) / 20.0))
    return cal_target, cal_masker


def mix_at_snr(
    target: AudioBuffer,
    masker: AudioBuffer,
    snr_db: float,
    target_level_db: float,
    condition_id: str = "ENG",
) -> Mixture:
    """Sum of the calibrated components; nothing is limited or clipped."""
    cal_target, cal_masker = calibrate_components(target, masker, snr_db, target_level_db)
    return Mixture(
        audio=AudioBuffer(cal_target.samples + cal_masker.samples, target.sample_rate),
        condition_id=condition_id,
        snr_db=float(snr_db),
        target_active_level_db=float(target_level_db),
        masker_active_level_db=float(target_level_db - snr_db),
    )


def prepare_condition_maskers(
    target: AudioBuffer,
    eng_masker: AudioBuffer,
    shield_params: ShieldParams,
    ltas: LtasProfile,
    rng_seed: int,
    ssn_seed: int | None = None,
) -> dict[str, AudioBuffer]:
    """One length-fitted, uncalibrated masker per condition.

    ENG is the fitted competing-talker excerpt, CS is the shield applied
    to that same excerpt, SSN is synthesized at the target's length. The
    same excerpt serves every SNR point.
    """
    seq = np.random.SeedSequence(rng_seed)
    fit_seed, derived_ssn = (int(s.generate_state(1)[0]) for s in seq.spawn(2))
    eng = fit_masker_length(eng_masker, len(target), fit_seed)
    cs = concentration_shield(eng, shield_params)
    ssn = synthesize_ssn(
        ltas,
        len(target) / target.sample_rate,
        ssn_seed if ssn_seed is not None else derived_ssn,
        sample_rate=target.sample_rate,
    )
    if len(ssn) != len(target):  # round defends against float duration edge cases
        ssn = fit_masker_length(ssn, len(target), fit_seed)
    return {"ENG": eng, "CS": cs, "SSN": ssn}


def build_stimulus_grid(
    target: AudioBuffer,
    eng_masker: AudioBuffer,
    shield_params: ShieldParams,
    ltas: LtasProfile,
    grid: SnrGrid,
    target_level_db: float,
    rng_seed: int,
    ssn_seed: int | None = None,
) -> list[Mixture]:
    """All |grid| x 3 mixtures, condition-major then ascending SNR."""
    maskers = prepare_condition_maskers(
        target, eng_masker, shield_params, ltas, rng_seed, ssn_seed
    )
    t_level = active_speech_level(target).active_level_db
    t_gain = 10.0 ** ((target_level_db - t_level) / 20.0)
    cal_target = target.scaled(t_gain)

    mixtures = []
    for condition in CONDITIONS:
        m_level = active_speech_level(maskers[condition]).active_level_db
        for snr in grid.snr_points_db:
            m_gain = 10.0 ** ((target_level_db - snr - m_level) / 20.0)
            cal_masker = maskers[condition].scaled(m_gain)
            mixtures.append(
                Mixture(
                    audio=AudioBuffer(
                        cal_target.samples + cal_masker.samples, target.sample_rate
                    ),
                    condition_id=condition,
                    snr_db=float(snr),
                    target_active_level_db=float(target_level_db),
                    masker_active_level_db=float(target_level_db - snr),
                )
            )
    return mixtures

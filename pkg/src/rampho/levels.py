"""Active speech level measurement (ITU-T P.56 Method B) and calibration.

SNR throughout this package is defined on active speech levels, not raw
RMS, so silences in an utterance do not dilute its nominal level.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.signal import lfilter

from .audio import AudioBuffer
from .errors import ClippingWarning, NoActiveSpeechError, TooShortError

SMOOTHING_TIME_S = 0.03
HANGOVER_S = 0.2
MARGIN_DB = 15.9
N_THRESHOLDS = 16  # candidate thresholds 2^0 .. 2^-15 of full scale
MIN_DURATION_S = 0.25


@dataclass(frozen=True)
class ActiveLevelReport:
    """Outcome of one active-level measurement, all levels in dBov."""

    active_level_db: float
    overall_rms_db: float
    activity_factor: float
    threshold_db: float


def _envelope(samples: np.ndarray, sample_rate: int) -> np.ndarray:
    """Two-stage exponentially smoothed magnitude envelope."""
    g = math.exp(-1.0 / (sample_rate * SMOOTHING_TIME_S))
    b, a = [1.0 - g], [1.0, -g]
    p = lfilter(b, a, np.abs(samples))
    return lfilter(b, a, p)


def _active_count(above: np.ndarray, hangover: int) -> int:
    """Active samples for one threshold: envelope crossings plus bridged gaps.

    A below-threshold gap counts as active only when activity resumes
    within the hangover; dips inside speech are kept, leading/trailing
    silence is not.
    """
    idx = np.flatnonzero(above)
    if idx.size == 0:
        return 0
    gaps = np.diff(idx) - 1
    bridged = gaps[(gaps > 0) & (gaps <= hangover)]
    return int(idx.size + bridged.sum())


def active_speech_level(buffer: AudioBuffer) -> ActiveLevelReport:
    """Measure the active speech level per P.56 Method B.

    Envelope smoothing time constant 0.03 s, hangover 0.2 s, margin
    15.9 dB, thresholds at half-steps of full scale with log-linear
    interpolation at the margin crossing.
    """
    if buffer.duration_s < MIN_DURATION_S:
        raise TooShortError(
            f"need at least {MIN_DURATION_S} s of audio, got {buffer.duration_s:.3f} s"
        )
    x = buffer.samples
    sum_sq = float(np.sum(np.square(x)))
    n = x.size
    if sum_sq == 0.0:
        raise NoActiveSpeechError("buffer is digital silence")
    overall_db = 10.0 * math.log10(sum_sq / n)

    env = _envelope(x, buffer.sample_rate)
    hangover = round(HANGOVER_S * buffer.sample_rate)
    thresholds = 2.0 ** -np.arange(N_THRESHOLDS)
    counts = np.array([_active_count(env >= c, hangover) for c in thresholds])

    # Per-threshold candidate level: total energy over active-sample count.
    with np.errstate(divide="ignore"):
        level_db = 10.0 * np.log10(np.where(counts > 0, sum_sq / np.maximum(counts, 1), np.nan))
    thresh_db = 20.0 * np.log10(thresholds)
    delta = level_db - thresh_db  # increases as thresholds descend

    usable = np.flatnonzero(counts > 0)  # contiguous: lower thresholds cover supersets
    if usable.size == 0 or delta[usable[-1]] < MARGIN_DB:
        raise NoActiveSpeechError(
            "no candidate threshold reaches the margin; input is silent or near-silent"
        )
    # Walk thresholds upward from the lowest; the crossing is where the
    # margin stops being met. Anchoring at the bottom skips spurious
    # high-threshold bins the envelope grazes for a handful of samples,
    # whose tiny counts inflate the candidate level.
    j = int(usable[0])
    for k in usable[::-1]:
        if delta[k] < MARGIN_DB:
            j = int(k) + 1
            break
    if j == usable[0]:
        # margin met at every usable threshold; nothing to bracket
        asl_db, c_db = float(level_db[j]), float(thresh_db[j])
    else:
        # Bisect the bracket with re-measured counts before interpolating;
        # the half-step grid alone is too coarse to keep the level
        # gain-equivariant for gains that are not powers of two.
        lo_db, lo_lvl = float(thresh_db[j]), float(level_db[j])
        hi_db, hi_lvl = float(thresh_db[j - 1]), float(level_db[j - 1])
        for _ in range(20):
            mid_db = 0.5 * (lo_db + hi_db)
            a = _active_count(env >= 10.0 ** (mid_db / 20.0), hangover)
            mid_lvl = 10.0 * math.log10(sum_sq / a)
            if mid_lvl - mid_db >= MARGIN_DB:
                lo_db, lo_lvl = mid_db, mid_lvl
            else:
                hi_db, hi_lvl = mid_db, mid_lvl
        t = (MARGIN_DB - (hi_lvl - hi_db)) / ((lo_lvl - lo_db) - (hi_lvl - hi_db))
        asl_db = hi_lvl + t * (lo_lvl - hi_lvl)
        c_db = hi_db + t * (lo_db - hi_db)

    # Activity implied by the interpolated level; equals active_count/n at
    # the exact thresholds and keeps active >= overall by construction.
    activity = 10.0 ** ((overall_db - asl_db) / 10.0)
    return ActiveLevelReport(
        active_level_db=asl_db,
        overall_rms_db=overall_db,
        activity_factor=min(activity, 1.0),
        threshold_db=c_db,
    )


def apply_gain_to_active_level(buffer: AudioBuffer, target_db: float) -> AudioBuffer:
    """Scale so the re-measured active speech level equals `target_db`.

    Samples exceeding full scale after the gain are left intact; a
    ClippingWarning is emitted so callers can decide what to do.
    """
    report = active_speech_level(buffer)
    gain = 10.0 ** ((target_db - report.active_level_db) / 20.0)
    out = buffer.scaled(gain)
    peak = float(np.max(np.abs(out.samples)))
    if peak > 1.0:
        warnings.warn(
            ClippingWarning(
                f"gain to {target_db:.2f} dBov drives peak to {peak:.3f}; "
                "samples left unclipped"
            ),
            stacklevel=2,
        )
    return out

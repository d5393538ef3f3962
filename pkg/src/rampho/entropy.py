"""Frame-wise phonetic entropy and sweep aggregation.

Per frame, the softmaxed token distribution is stripped of the blank and
renormalized over the K active tokens:

    H[n] = -sum_{i != blank} q_i * log2(q_i + eps),  q_i = P(x_i) / (1 - P(blank))

with eps inside the logarithm only. Low H means the acoustic evidence
pins down a phonetic identity; high H means the frame is ambiguous.
Near-silent frames (P(blank) above an exclusion threshold) are dropped
from aggregates so "confident silence" cannot masquerade as confident
speech.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    AllFramesExcludedError,
    DegenerateFrameError,
    InsufficientDataError,
)
from .logits import LogitsMatrix

EPSILON = 1e-10
DEGENERATE_ACTIVE_MASS = 1e-6
DEFAULT_EXCLUSION_BLANK_PROB = 0.999
PRISTINE_SNR_DB = 100.0


def softmax(row: np.ndarray) -> np.ndarray:
    """Max-subtracted stable softmax in float64."""
    row = np.asarray(row, dtype=np.float64)
    if not np.all(np.isfinite(row)):
        raise ValueError("logits must be finite")
    shifted = row - np.max(row)
    exp = np.exp(shifted)
    return exp / np.sum(exp)


def frame_entropy(probs: np.ndarray, blank_index: int) -> float:
    """Blank-excluded renormalized Shannon entropy of one frame, in bits."""
    probs = np.asarray(probs, dtype=np.float64)
    active = np.delete(probs, blank_index)
    denom = float(np.sum(active))  # = 1 - P(blank) without cancellation
    if denom <= DEGENERATE_ACTIVE_MASS:
        raise DegenerateFrameError(
            f"active probability mass {denom:.3g} is too small to renormalize"
        )
    q = active / denom
    h = float(-np.sum(q * np.log2(q + EPSILON)))
    return max(h, 0.0)


@dataclass(frozen=True)
class EntropyTrace:
    """Per-frame entropies plus aggregates over the included frames.

    frame_entropy_bits carries NaN for frames too blank-dominated to
    renormalize; frame_blank_prob always covers every frame.
    """

    frame_entropy_bits: np.ndarray = field(repr=False)
    frame_blank_prob: np.ndarray = field(repr=False)
    mean_bits: float
    median_bits: float
    normalized_mean: float
    included_frames: int
    excluded_frames: int


def _lower_median(values: np.ndarray) -> float:
    """Median taking the lower of the two central values on even counts."""
    ordered = np.sort(values)
    return float(ordered[(ordered.size - 1) // 2])


def aggregate_trace(
    matrix: LogitsMatrix,
    silence_exclusion_blank_prob: float = DEFAULT_EXCLUSION_BLANK_PROB,
) -> EntropyTrace:
    """Entropy trace for a whole utterance.

    Frames whose blank probability exceeds the threshold are excluded
    from the aggregates (their H is still reported when computable).
    """
    if not 0.0 < silence_exclusion_blank_prob <= 1.0:
        raise ValueError(
            f"exclusion threshold must be in (0, 1], got {silence_exclusion_blank_prob}"
        )
    m = matrix.manifest
    logits = matrix.values.astype(np.float64)
    shifted = logits - logits.max(axis=1, keepdims=True)
    exp = np.exp(shifted)
    probs = exp / exp.sum(axis=1, keepdims=True)

    blank_prob = probs[:, m.blank_index].copy()
    active = np.delete(probs, m.blank_index, axis=1)
    denom = active.sum(axis=1)

    h = np.full(matrix.frame_count, np.nan)
    computable = denom > DEGENERATE_ACTIVE_MASS
    if np.any(computable):
        q = active[computable] / denom[computable, np.newaxis]
        h[computable] = np.maximum(-np.sum(q * np.log2(q + EPSILON), axis=1), 0.0)

    included = computable & (blank_prob <= silence_exclusion_blank_prob)
    n_included = int(np.count_nonzero(included))
    if n_included == 0:
        raise AllFramesExcludedError(
            f"all {matrix.frame_count} frames exceed blank probability "
            f"{silence_exclusion_blank_prob} or are degenerate"
        )
    kept = h[included]
    mean = float(np.mean(kept))
    return EntropyTrace(
        frame_entropy_bits=h,
        frame_blank_prob=blank_prob,
        mean_bits=mean,
        median_bits=_lower_median(kept),
        normalized_mean=mean / math.log2(m.active_vocab_size),
        included_frames=n_included,
        excluded_frames=matrix.frame_count - n_included,
    )


@dataclass(frozen=True)
class SweepRow:
    """One CSV row: aggregates for a (condition, SNR, utterance) cell."""

    condition_id: str
    snr_db: float
    utterance_id: str
    mean_bits: float
    median_bits: float
    normalized_mean: float
    included_frames: int
    excluded_frames: int
    target_active_level_db: float
    masker_active_level_db: float


@dataclass(frozen=True)
class SweepResult:
    rows: tuple[SweepRow, ...]
    crossover_points: dict[tuple[str, str], float | None] = field(default_factory=dict)

    def __post_init__(self):
        rows = tuple(self.rows)
        keys = [(r.condition_id, r.snr_db, r.utterance_id) for r in rows]
        if len(set(keys)) != len(keys):
            raise ValueError("duplicate (condition, snr, utterance) row")
        object.__setattr__(self, "rows", rows)

    def conditions(self) -> list[str]:
        seen = []
        for row in self.rows:
            if row.condition_id not in seen:
                seen.append(row.condition_id)
        return seen

    def curve(self, condition_id: str, include_pristine: bool = True) -> list[tuple[float, float]]:
        """(snr, normalized mean entropy) points, utterance-averaged, by SNR."""
        by_snr: dict[float, list[float]] = {}
        for row in self.rows:
            if row.condition_id != condition_id:
                continue
            if not include_pristine and row.snr_db >= PRISTINE_SNR_DB:
                continue
            by_snr.setdefault(row.snr_db, []).append(row.normalized_mean)
        return [(snr, float(np.mean(vals))) for snr, vals in sorted(by_snr.items())]


def find_crossovers(
    result: SweepResult, pair: tuple[str, str]
) -> float | None:
    """SNR where the pair's mean-entropy curves first cross, if they do.

    Curves are piecewise-linear over the common masked-regime grid (the
    100 dB pristine anchor is excluded). Touching without a strict sign
    change does not count.
    """
    a = dict(result.curve(pair[0], include_pristine=False))
    b = dict(result.curve(pair[1], include_pristine=False))
    common = sorted(set(a) & set(b))
    if len(common) < 2:
        raise InsufficientDataError(
            f"conditions {pair} share only {len(common)} masked-regime SNR points"
        )
    snrs = np.asarray(common)
    diff = np.asarray([a[s] - b[s] for s in common])

    nonzero = np.flatnonzero(diff)
    if nonzero.size == 0:
        return None
    prev = int(nonzero[0])
    for k in (int(i) for i in nonzero[1:]):
        if np.sign(diff[k]) != np.sign(diff[prev]):
            if k == prev + 1:
                t = diff[prev] / (diff[prev] - diff[k])
                return float(snrs[prev] + t * (snrs[k] - snrs[prev]))
            # zeros between: piecewise-linear difference reaches 0 at the
            # first flat grid point
            return float(snrs[prev + 1])
        prev = k
    return None


def compute_crossovers(result: SweepResult) -> dict[tuple[str, str], float | None]:
    """Crossover (or None) for every unordered condition pair in the result."""
    conditions = result.conditions()
    points: dict[tuple[str, str], float | None] = {}
    for i, first in enumerate(conditions):
        for second in conditions[i + 1 :]:
            try:
                points[(first, second)] = find_crossovers(result, (first, second))
            except InsufficientDataError:
                continue
    return points

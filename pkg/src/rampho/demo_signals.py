"""Deterministic formant-synthesized pseudo-speech.

Generates speech-like test material without shipping recordings: voiced
syllables (glottal pulse train through cascaded formant resonators),
fricative onsets, word-level pauses, and a falling long-term spectrum.
Statistically it behaves like speech for everything this package
measures (P.56 gating, 1/3-octave LTAS, syllabic 1-4 kHz envelope) while
being bit-reproducible from a seed.

Usage as a module:
    python -m rampho.demo_signals out.wav --duration 60 --seed 7
"""

from __future__ import annotations

import argparse

import numpy as np
from scipy.signal import butter, lfilter, sosfilt

from .audio import AudioBuffer, save_wav

# F1/F2/F3 in Hz for a handful of vowel qualities
_VOWELS = (
    (730.0, 1090.0, 2440.0),
    (270.0, 2290.0, 3010.0),
    (530.0, 1840.0, 2480.0),
    (570.0, 840.0, 2410.0),
    (300.0, 870.0, 2240.0),
    (660.0, 1720.0, 2410.0),
    (440.0, 1020.0, 2850.0),
    (490.0, 1350.0, 1690.0),
)
_F4_HZ = 3400.0
PEAK = 0.3


def _resonator(x: np.ndarray, freq: float, bandwidth: float, fs: int) -> np.ndarray:
    r = np.exp(-np.pi * bandwidth / fs)
    c = 2.0 * r * np.cos(2.0 * np.pi * freq / fs)
    gain = 1.0 - c + r * r  # unit response at DC keeps levels comparable
    return lfilter([gain], [1.0, -c, r * r], x)


def _edge_envelope(n: int, attack: int, release: int) -> np.ndarray:
    env = np.ones(n)
    attack = min(attack, n // 2)
    release = min(release, n - attack)
    if attack > 0:
        env[:attack] = 0.5 - 0.5 * np.cos(np.pi * np.arange(attack) / attack)
    if release > 0:
        env[n - release :] = 0.5 + 0.5 * np.cos(np.pi * np.arange(release) / release)
    return env


def _vowel(rng: np.random.Generator, fs: int) -> np.ndarray:
    n = round(rng.uniform(0.09, 0.22) * fs)
    base = rng.uniform(85.0, 170.0)
    drift = 1.0 + 0.02 * np.sin(2.0 * np.pi * rng.uniform(3.0, 6.0) * np.arange(n) / fs)
    f0 = base * np.linspace(1.08, 0.92, n) * drift  # declination + slow wobble
    phase = np.cumsum(f0 / fs)
    pulses = np.zeros(n)
    pulses[np.flatnonzero(np.diff(np.floor(phase)) > 0)] = 1.0
    # two one-pole low-passes approximate the glottal -12 dB/oct rolloff
    source = lfilter([0.04], [1.0, -0.96], pulses)
    source = lfilter([0.04], [1.0, -0.96], source)
    source += 3e-4 * rng.standard_normal(n)  # aspiration floor

    f1, f2, f3 = _VOWELS[int(rng.integers(len(_VOWELS)))]
    out = source
    for freq, bw in (
        (f1 * rng.uniform(0.93, 1.07), 60.0 + f1 / 12.0),
        (f2 * rng.uniform(0.93, 1.07), 80.0 + f2 / 12.0),
        (f3 * rng.uniform(0.96, 1.04), 120.0 + f3 / 12.0),
        (_F4_HZ, 260.0),
    ):
        out = _resonator(out, freq, bw, fs)
    out = np.diff(out, prepend=0.0)  # lip radiation, +6 dB/oct
    out *= _edge_envelope(n, round(0.015 * fs), round(0.04 * fs))
    rms = np.sqrt(np.mean(np.square(out)))
    return out * (rng.uniform(0.7, 1.0) / max(rms, 1e-12))


def _fricative(rng: np.random.Generator, fs: int) -> np.ndarray:
    n = round(rng.uniform(0.03, 0.07) * fs)
    sos = butter(2, [2000.0, 6500.0], btype="bandpass", fs=fs, output="sos")
    noise = sosfilt(sos, rng.standard_normal(n))
    noise *= _edge_envelope(n, round(0.008 * fs), round(0.012 * fs))
    rms = np.sqrt(np.mean(np.square(noise)))
    return noise * (rng.uniform(0.3, 0.5) / max(rms, 1e-12))


def generate_pseudo_speech(
    duration_s: float, rng_seed: int, sample_rate: int = 16_000
) -> AudioBuffer:
    """Seeded pseudo-speech of exactly round(duration_s * sample_rate) samples."""
    if duration_s <= 0:
        raise ValueError(f"duration must be positive, got {duration_s}")
    rng = np.random.default_rng(rng_seed)
    fs = sample_rate
    total = round(duration_s * fs)
    chunks: list[np.ndarray] = []
    produced = 0
    while produced < total:
        for _ in range(int(rng.integers(1, 5))):  # syllables in this word
            if rng.uniform() < 0.55:
                seg = _fricative(rng, fs)
                chunks.append(seg)
                produced += seg.size
            seg = _vowel(rng, fs)
            gap = np.zeros(round(rng.uniform(0.01, 0.03) * fs))
            chunks.extend([seg, gap])
            produced += seg.size + gap.size
        pause = np.zeros(round(rng.uniform(0.12, 0.35) * fs))
        chunks.append(pause)
        produced += pause.size
    out = np.concatenate(chunks)[:total]
    peak = np.max(np.abs(out))
    return AudioBuffer(out * (PEAK / max(peak, 1e-12)), fs)


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        description="Generate a deterministic pseudo-speech WAV for demos and tests."
    )
    parser.add_argument("output", help="output WAV path")
    parser.add_argument("--duration", type=float, default=60.0, help="seconds (default 60)")
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--sample-rate", type=int, default=16_000)
    args = parser.parse_args(argv)
    buffer = generate_pseudo_speech(args.duration, args.seed, args.sample_rate)
    save_wav(buffer, args.output)
    print(f"wrote {args.output}: {buffer.duration_s:.1f} s at {buffer.sample_rate} Hz")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())

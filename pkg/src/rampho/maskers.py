"""The three masker conditions: intelligible talker, phase-decorrelated
talker, and spectrum-matched steady noise.

ENG is the competing talker passed through untouched. CS runs the same
talker through the concentration shield: phases inside the speech-critical
band (1-4 kHz by default) are randomized behind raised-cosine tapers while
every bin magnitude, and therefore the RMS, is preserved. SSN is Gaussian
noise shaped to a measured long-term average spectrum.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy.signal import butter, fftconvolve, firwin2, sosfiltfilt, welch

from .audio import AudioBuffer
from .errors import BandOutOfRangeError, LengthMismatchError, TooShortError

THIRD_OCTAVE_CENTERS_HZ = (
    100.0, 125.0, 160.0, 200.0, 250.0, 315.0, 400.0, 500.0, 630.0, 800.0,
    1000.0, 1250.0, 1600.0, 2000.0, 2500.0, 3150.0, 4000.0, 5000.0, 6300.0,
)
_EDGE = 2.0 ** (1.0 / 6.0)  # band edges at fc / _EDGE and fc * _EDGE
LTAS_FFT_SIZE = 1024
LTAS_MIN_DURATION_S = 10.0
ENVELOPE_CUTOFF_HZ = 32.0


@dataclass(frozen=True)
class ShieldParams:
    band_low: float = 1000.0
    band_high: float = 4000.0
    taper_half_width: float = 100.0
    rng_seed: int = 0

    def __post_init__(self):
        lo, hi, t = self.band_low, self.band_high, self.taper_half_width
        if t < 0:
            raise BandOutOfRangeError(f"taper half-width must be >= 0, got {t}")
        if not 0 < lo - t:
            raise BandOutOfRangeError(f"lower taper reaches {lo - t} Hz; must stay above 0")
        if not lo + t < hi - t:
            raise BandOutOfRangeError(
                f"tapers overlap: band [{lo}, {hi}] Hz is too narrow for +/-{t} Hz ramps"
            )


@dataclass(frozen=True)
class LtasProfile:
    """1/3-octave long-term average spectrum, bands summing to 0 dB."""

    band_centers: tuple[float, ...]
    band_levels_db: tuple[float, ...]
    fft_size: int
    source_duration_s: float

    def __post_init__(self):
        centers = tuple(float(c) for c in self.band_centers)
        levels = tuple(float(v) for v in self.band_levels_db)
        if len(centers) != len(levels):
            raise ValueError("band_centers and band_levels_db lengths differ")
        if any(b <= a for a, b in zip(centers, centers[1:])):
            raise ValueError("band_centers must be strictly increasing")
        if not all(math.isfinite(v) for v in levels):
            raise ValueError("band levels must be finite")
        object.__setattr__(self, "band_centers", centers)
        object.__setattr__(self, "band_levels_db", levels)

    def to_text(self) -> str:
        lines = [
            f"# fft_size: {self.fft_size}",
            f"# source_duration_s: {self.source_duration_s:.6f}",
            "# band_center_hz level_db",
        ]
        lines += [
            f"{c:.1f} {v:.6f}" for c, v in zip(self.band_centers, self.band_levels_db)
        ]
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "LtasProfile":
        fft_size, duration = LTAS_FFT_SIZE, 0.0
        centers, levels = [], []
        for raw in text.splitlines():
            line = raw.strip()
            if not line:
                continue
            if line.startswith("#"):
                body = line.lstrip("#").strip()
                if body.startswith("fft_size:"):
                    fft_size = int(body.split(":", 1)[1])
                elif body.startswith("source_duration_s:"):
                    duration = float(body.split(":", 1)[1])
                continue
            c, v = line.split()
            centers.append(float(c))
            levels.append(float(v))
        return cls(tuple(centers), tuple(levels), fft_size, duration)


def save_ltas(profile: LtasProfile, path: str | Path) -> None:
    Path(path).write_text(profile.to_text())


def load_ltas(path: str | Path) -> LtasProfile:
    return LtasProfile.from_text(Path(path).read_text())


def _raised_cosine_weights(freqs: np.ndarray, params: ShieldParams) -> np.ndarray:
    """Phase-perturbation weight: 0 out of band, 1 in band, half-cosine ramps."""
    lo, hi, t = params.band_low, params.band_high, params.taper_half_width
    w = np.zeros_like(freqs)
    w[(freqs >= lo + t) & (freqs <= hi - t)] = 1.0
    if t > 0:
        up = (freqs > lo - t) & (freqs < lo + t)
        w[up] = 0.5 * (1.0 - np.cos(np.pi * (freqs[up] - (lo - t)) / (2.0 * t)))
        down = (freqs > hi - t) & (freqs < hi + t)
        w[down] = 0.5 * (1.0 + np.cos(np.pi * (freqs[down] - (hi - t)) / (2.0 * t)))
    return w


def concentration_shield(buffer: AudioBuffer, params: ShieldParams) -> AudioBuffer:
    """Randomize phases inside the shield band; keep all magnitudes.

    One full-length real FFT; each positive-frequency bin gets its phase
    advanced by w(f) * theta(f), theta i.i.d. uniform [0, 2pi) under the
    params seed. DC and Nyquist stay untouched, so the output is real and
    the RMS is conserved (Parseval).
    """
    nyquist = buffer.sample_rate / 2.0
    if params.band_high + params.taper_half_width >= nyquist:
        raise BandOutOfRangeError(
            f"upper taper reaches {params.band_high + params.taper_half_width} Hz, "
            f"at or above Nyquist ({nyquist} Hz)"
        )
    n = len(buffer)
    spectrum = np.fft.rfft(buffer.samples)
    freqs = np.fft.rfftfreq(n, 1.0 / buffer.sample_rate)
    rng = np.random.default_rng(params.rng_seed)
    theta = rng.uniform(0.0, 2.0 * np.pi, size=freqs.size)
    weights = _raised_cosine_weights(freqs, params)
    weights[0] = 0.0
    if n % 2 == 0:
        weights[-1] = 0.0  # Nyquist bin must stay real
    spectrum *= np.exp(1j * weights * theta)
    out = np.fft.irfft(spectrum, n)
    return AudioBuffer(out, buffer.sample_rate)


def _envelope_32hz(samples: np.ndarray, sample_rate: int) -> np.ndarray:
    """Amplitude envelope: rectify then zero-phase low-pass at 32 Hz."""
    sos = butter(4, ENVELOPE_CUTOFF_HZ, btype="lowpass", fs=sample_rate, output="sos")
    return sosfiltfilt(sos, np.abs(samples))


def envelope_decorrelation(
    original: AudioBuffer,
    shielded: AudioBuffer,
    band_low: float = 1000.0,
    band_high: float = 4000.0,
) -> float:
    """Pearson correlation of in-band amplitude envelopes.

    Proxy for how much of the linguistic payload the shield destroyed:
    near 1 for identical signals, near 0 after full phase decorrelation.
    """
    if len(original) != len(shielded) or original.sample_rate != shielded.sample_rate:
        raise LengthMismatchError(
            f"buffers differ: {len(original)} @ {original.sample_rate} Hz vs "
            f"{len(shielded)} @ {shielded.sample_rate} Hz"
        )
    sos = butter(
        4, [band_low, band_high], btype="bandpass", fs=original.sample_rate, output="sos"
    )
    env_a = _envelope_32hz(sosfiltfilt(sos, original.samples), original.sample_rate)
    env_b = _envelope_32hz(sosfiltfilt(sos, shielded.samples), shielded.sample_rate)
    return float(np.corrcoef(env_a, env_b)[0, 1])


def envelope_steadiness(buffer: AudioBuffer) -> float:
    """Ratio of 32 Hz envelope standard deviation to its mean.

    Low for steady noise, high for speech; used to check that SSN really
    is steady-state relative to the talker masker.
    """
    env = _envelope_32hz(buffer.samples, buffer.sample_rate)
    mean = float(np.mean(env))
    if mean == 0.0:
        return 0.0
    return float(np.std(env) / mean)


def _band_powers(freqs: np.ndarray, psd: np.ndarray) -> np.ndarray:
    """Integrate a PSD into the nominal 1/3-octave bands.

    Bins are treated as cells of width df centered on their frequency;
    partial overlap with a band contributes fractionally, which matters
    for the narrow low bands that span only a couple of bins.
    """
    df = freqs[1] - freqs[0]
    lo_cell = freqs - df / 2.0
    hi_cell = freqs + df / 2.0
    powers = np.empty(len(THIRD_OCTAVE_CENTERS_HZ))
    for i, fc in enumerate(THIRD_OCTAVE_CENTERS_HZ):
        lo, hi = fc / _EDGE, fc * _EDGE
        overlap = np.clip(np.minimum(hi_cell, hi) - np.maximum(lo_cell, lo), 0.0, df)
        powers[i] = float(np.sum(psd * overlap))
    return powers


def measure_ltas(reference: AudioBuffer) -> LtasProfile:
    """Welch-averaged long-term spectrum in 1/3-octave bands, 100 Hz-6.3 kHz.

    1024-sample Hann segments with 50% overlap; band levels are normalized
    so their powers sum to 0 dB.
    """
    if reference.duration_s < LTAS_MIN_DURATION_S:
        raise TooShortError(
            f"spectrum reference must be >= {LTAS_MIN_DURATION_S:.0f} s, "
            f"got {reference.duration_s:.2f} s"
        )
    top_edge = THIRD_OCTAVE_CENTERS_HZ[-1] * _EDGE
    if reference.sample_rate / 2.0 <= top_edge:
        raise BandOutOfRangeError(
            f"sample rate {reference.sample_rate} Hz cannot represent the "
            f"{THIRD_OCTAVE_CENTERS_HZ[-1]:.0f} Hz band (edge {top_edge:.0f} Hz)"
        )
    freqs, psd = welch(
        reference.samples,
        fs=reference.sample_rate,
        window="hann",
        nperseg=LTAS_FFT_SIZE,
        noverlap=LTAS_FFT_SIZE // 2,
    )
    powers = _band_powers(freqs, psd)
    total = float(np.sum(powers))
    if total <= 0.0:
        raise TooShortError("reference has no measurable in-band power")
    levels = 10.0 * np.log10(np.maximum(powers, 1e-300) / total)
    return LtasProfile(
        band_centers=THIRD_OCTAVE_CENTERS_HZ,
        band_levels_db=tuple(float(v) for v in levels),
        fft_size=LTAS_FFT_SIZE,
        source_duration_s=reference.duration_s,
    )


SSN_FIR_TAPS = 1023
SSN_NOMINAL_RMS = 10.0 ** (-26.0 / 20.0)


def _ssn_fir(profile: LtasProfile, sample_rate: int) -> np.ndarray:
    """Linear-phase FIR whose squared response follows the profile's PSD.

    Band levels interpolate dB-linearly across frequency; dividing by the
    local 1/3-octave bandwidth converts band power to spectral density so
    the synthesized noise integrates back to the stated band levels. The
    density is held flat beyond the first and last band centers.
    """
    centers = np.asarray(profile.band_centers)
    levels = np.asarray(profile.band_levels_db)
    bandwidth_db = 10.0 * np.log10(centers * (_EDGE - 1.0 / _EDGE))
    psd_at_centers = levels - bandwidth_db

    grid = np.linspace(0.0, sample_rate / 2.0, 2048)
    psd_db = np.interp(grid, centers, psd_at_centers)  # clamps outside = flat density
    amplitude = 10.0 ** (psd_db / 20.0)
    return firwin2(SSN_FIR_TAPS, grid, amplitude, fs=sample_rate)


def synthesize_ssn(
    profile: LtasProfile,
    duration_s: float,
    rng_seed: int,
    sample_rate: int = 16_000,
) -> AudioBuffer:
    """Gaussian noise shaped to the profile; deterministic under the seed.

    Output RMS is set to a nominal -26 dBov so there is calibration
    headroom either way.
    """
    if duration_s <= 0:
        raise ValueError(f"duration must be positive, got {duration_s}")
    n = round(duration_s * sample_rate)
    fir = _ssn_fir(profile, sample_rate)
    rng = np.random.default_rng(rng_seed)
    white = rng.standard_normal(n + SSN_FIR_TAPS - 1)
    shaped = fftconvolve(white, fir, mode="valid")
    rms = float(np.sqrt(np.mean(np.square(shaped))))
    return AudioBuffer(shaped * (SSN_NOMINAL_RMS / rms), sample_rate)

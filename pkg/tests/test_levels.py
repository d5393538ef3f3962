import numpy as np
import pytest

from rampho.audio import AudioBuffer
from rampho.errors import ClippingWarning, NoActiveSpeechError, TooShortError
from rampho.levels import active_speech_level, apply_gain_to_active_level

FS = 16000

# analytic oracle: a sine of amplitude 1 has RMS 1/sqrt(2) = -3.0103 dBov
SINE_RMS_DB = 10 * np.log10(0.5)


def test_full_scale_sine(sine):
    report = active_speech_level(sine)
    assert abs(report.active_level_db - SINE_RMS_DB) < 0.2
    assert report.activity_factor >= 0.98
    assert 0.0 < report.activity_factor <= 1.0


def test_half_sine_half_silence(half_sine_half_silence):
    # overall RMS is -6.02 dBov; gating must recover the active half's -3.01
    report = active_speech_level(half_sine_half_silence)
    assert abs(report.active_level_db - SINE_RMS_DB) < 0.3
    assert abs(report.activity_factor - 0.5) < 0.05
    assert abs(report.overall_rms_db - 2 * SINE_RMS_DB) < 0.01


def test_active_never_below_overall(speech):
    report = active_speech_level(speech)
    assert report.active_level_db >= report.overall_rms_db - 1e-6


def test_all_zero_raises():
    with pytest.raises(NoActiveSpeechError):
        active_speech_level(AudioBuffer(np.zeros(FS), FS))


def test_near_silent_raises():
    quiet = AudioBuffer(np.full(FS, 1e-7), FS)
    with pytest.raises(NoActiveSpeechError):
        active_speech_level(quiet)


def test_too_short():
    with pytest.raises(TooShortError):
        active_speech_level(AudioBuffer(np.ones(FS // 8), FS))


@pytest.mark.parametrize("gain_db", [-20.0, -6.0, 6.0])
def test_gain_shift_property(speech, gain_db):
    base = active_speech_level(speech)
    scaled = active_speech_level(speech.scaled(10 ** (gain_db / 20)))
    assert abs((scaled.active_level_db - base.active_level_db) - gain_db) < 0.05
    assert abs(scaled.activity_factor - base.activity_factor) < 0.02


def test_appending_silence_keeps_active_level(speech):
    base = active_speech_level(speech)
    padded = AudioBuffer(np.concatenate([speech.samples, np.zeros(5 * FS)]), FS)
    report = active_speech_level(padded)
    assert abs(report.active_level_db - base.active_level_db) < 0.2
    assert report.overall_rms_db < base.overall_rms_db


def test_apply_gain_round_trip(sine):
    out = apply_gain_to_active_level(sine, -26.0)
    assert abs(active_speech_level(out).active_level_db - (-26.0)) < 0.1


def test_apply_gain_is_exact_scalar(speech):
    measured = active_speech_level(speech).active_level_db
    out = apply_gain_to_active_level(speech, -20.0)
    expected = speech.samples * 10 ** ((-20.0 - measured) / 20)
    np.testing.assert_array_equal(out.samples, expected)


def test_apply_gain_warns_on_clipping(sine):
    with pytest.warns(ClippingWarning):
        loud = apply_gain_to_active_level(sine, 3.0)
    assert np.max(np.abs(loud.samples)) > 1.0  # samples are not clipped


def test_apply_gain_propagates_no_active_speech():
    with pytest.raises(NoActiveSpeechError):
        apply_gain_to_active_level(AudioBuffer(np.zeros(FS), FS), -26.0)

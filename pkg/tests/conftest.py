import numpy as np
import pytest

from rampho.audio import AudioBuffer
from rampho.demo_signals import generate_pseudo_speech

FS = 16000


@pytest.fixture(scope="session")
def speech():
    """30 s of deterministic pseudo-speech used as the target."""
    return generate_pseudo_speech(30.0, rng_seed=7)


@pytest.fixture(scope="session")
def talker():
    """A second pseudo-talker used as the competing masker."""
    return generate_pseudo_speech(34.0, rng_seed=2)


@pytest.fixture(scope="session")
def sine():
    t = np.arange(5 * FS) / FS
    return AudioBuffer(np.sin(2 * np.pi * 1000.0 * t), FS)


@pytest.fixture(scope="session")
def half_sine_half_silence():
    t = np.arange(5 * FS) / FS
    x = np.sin(2 * np.pi * 1000.0 * t)
    x[len(x) // 2 :] = 0.0
    return AudioBuffer(x, FS)

"""Exception and warning types shared across the toolkit."""


class RamphoError(Exception):
    """Base class for all toolkit-specific errors."""


# --- audio ---

class UnsupportedFormatError(RamphoError):
    """WAV file uses a codec, bit depth, or channel count we do not read."""


class EmptyAudioError(RamphoError):
    """Audio file contains zero frames."""


class SilentInputError(RamphoError):
    """Operation requires a nonzero signal but received digital silence."""


# --- levels ---

class NoActiveSpeechError(RamphoError):
    """No activity threshold satisfies the active-level margin condition."""


class TooShortError(RamphoError):
    """Input is shorter than the minimum duration the operation needs."""


# --- masker synthesis ---

class BandOutOfRangeError(RamphoError):
    """Shield band edges (including tapers) fall outside (0, Nyquist)."""


class LengthMismatchError(RamphoError):
    """Two buffers that must be sample-aligned have different lengths."""


# --- logits file format ---

class BadMagicError(RamphoError):
    """File does not start with the logits-format magic bytes."""


class UnsupportedVersionError(RamphoError):
    """Logits file declares a format version this reader does not know."""


class CorruptPayloadError(RamphoError):
    """Logits file payload length disagrees with its header."""


class NonFiniteValueError(RamphoError):
    """A matrix that must be finite contains NaN or Inf."""


# --- entropy ---

class DegenerateFrameError(RamphoError):
    """Frame is blank-saturated: 1 - P(blank) is below the floor, so the
    renormalized distribution is numerically meaningless."""


class AllFramesExcludedError(RamphoError):
    """Every frame of an utterance was excluded from aggregation."""


class InsufficientDataError(RamphoError):
    """Crossover analysis needs at least two common SNR points."""


# --- harness ---

class ConfigParseError(RamphoError):
    """Config text is not well-formed."""


class ConfigValidationError(RamphoError):
    """Config parsed but violates a constraint; message names the field."""


class MissingLogitsError(RamphoError):
    """Expected logits file for a (condition, SNR) cell does not exist."""


class CellError(RamphoError):
    """Wraps a failure inside one (condition, SNR) cell of the sweep."""

    def __init__(self, condition: str, snr_db: float, cause: BaseException):
        self.condition = condition
        self.snr_db = snr_db
        self.cause = cause
        super().__init__(f"cell ({condition}, {snr_db:g} dB): {cause}")


class ClippingWarning(UserWarning):
    """Gain stage produced samples beyond full scale (not clipped)."""

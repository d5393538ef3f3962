"""Error types raised by the exporter pipeline."""


class ExporterError(Exception):
    """Base class for all exporter failures."""


class ModelUnavailableError(ExporterError):
    """The requested checkpoint could not be loaded (missing runtime,
    unknown model id, or no way to fetch the weights)."""


class AudioError(ExporterError):
    """The input audio is missing, unreadable, or not decodable."""


class IoError(ExporterError):
    """The output file could not be written."""

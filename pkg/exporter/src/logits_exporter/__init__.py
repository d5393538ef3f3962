"""Export raw CTC frame logits from speech checkpoints as .w2vl files."""

from .engine import DEFAULT_MODEL_ID, EngineOutput, HuggingFaceEngine, InferenceEngine
from .errors import AudioError, ExporterError, IoError, ModelUnavailableError
from .exporter import ExporterArgs, ExportReport, export_logits
from .wire import write_w2vl

__version__ = "0.1.0"

__all__ = [
    "DEFAULT_MODEL_ID",
    "EngineOutput",
    "HuggingFaceEngine",
    "InferenceEngine",
    "AudioError",
    "ExporterError",
    "IoError",
    "ModelUnavailableError",
    "ExporterArgs",
    "ExportReport",
    "export_logits",
    "write_w2vl",
    "__version__",
]

"""Error types and CLI exit codes for the lab."""

from enum import IntEnum


class ExitCode(IntEnum):
    """Process exit codes returned by the CLI."""

    SUCCESS = 0
    CONFIG = 2
    ESTIMATION = 3
    IO = 4


class LabError(Exception):
    """Base class for every error raised by the lab."""

    exit_code: ExitCode = ExitCode.ESTIMATION


class ConfigurationError(LabError):
    """Invalid plan, config file value or operation precondition."""

    exit_code = ExitCode.CONFIG


class SpectralFitError(ConfigurationError):
    """Signal band does not fit inside the target Nyquist band."""


class DetectionError(LabError):
    """No training frame found above the detection threshold."""


class EstimationError(LabError):
    """Estimator could not produce a result (degenerate input)."""


class LowConfidenceError(EstimationError):
    """Tone power in the Godard window is too close to the noise floor."""

    def __init__(self, tone_hz: float, tone_snr_db: float, threshold_db: float):
        self.tone_hz = tone_hz
        self.tone_snr_db = tone_snr_db
        self.threshold_db = threshold_db
        super().__init__(
            f"Tone at {tone_hz / 1e9:.3f} GHz has SNR {tone_snr_db:.1f} dB (threshold {threshold_db:.1f} dB)"
        )


class CaptureFormatError(LabError):
    """Capture file is truncated or carries a wrong magic/version."""

    exit_code = ExitCode.IO


class SchemaError(LabError):
    """CSV file does not match the frozen column schema."""

    exit_code = ExitCode.IO

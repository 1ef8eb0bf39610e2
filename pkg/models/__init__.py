"""Data models module."""

from models.compensation import CompensationSpec
from models.error import (
    CaptureFormatError,
    ConfigurationError,
    DetectionError,
    EstimationError,
    ExitCode,
    LabError,
    LowConfidenceError,
    SchemaError,
    SpectralFitError,
)
from models.estimate import (
    EstimateReport,
    GodardConfig,
    PolarizationEstimate,
    PowerRatio,
    SlotTrace,
    TimingEstimate,
    Tributary,
)
from models.experiment import (
    BerRow,
    EstimatorOptions,
    ExperimentConfig,
    FrameLocation,
    SweepAxis,
    SweepAxisName,
    SweepRow,
)
from models.impairment import ImpairmentSet, IqImpairment
from models.link import ChannelConfig, SubcarrierPlan
from models.payload import BerResult, QamFrame
from models.signal import DualPolFrame, RngStream, SampleTrace, Spectrum
from models.tfit import Polarization, SlotId, TfitPlan

__all__ = [
    "BerResult",
    "BerRow",
    "CaptureFormatError",
    "ChannelConfig",
    "CompensationSpec",
    "ConfigurationError",
    "DetectionError",
    "DualPolFrame",
    "EstimateReport",
    "EstimationError",
    "EstimatorOptions",
    "ExitCode",
    "ExperimentConfig",
    "FrameLocation",
    "GodardConfig",
    "ImpairmentSet",
    "IqImpairment",
    "LabError",
    "LowConfidenceError",
    "Polarization",
    "PolarizationEstimate",
    "PowerRatio",
    "QamFrame",
    "RngStream",
    "SampleTrace",
    "SchemaError",
    "SpectralFitError",
    "SlotId",
    "SlotTrace",
    "Spectrum",
    "SubcarrierPlan",
    "SweepAxis",
    "SweepAxisName",
    "SweepRow",
    "TfitPlan",
    "TimingEstimate",
    "Tributary",
]

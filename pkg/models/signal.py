"""Signal carrier models: sample traces, spectra, dual-polarization frames, RNG streams."""

from typing import Any

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator


def _frozen_complex(values: Any) -> np.ndarray:
    array = np.array(values, dtype=np.complex128).reshape(-1)
    array.setflags(write=False)
    return array


class SampleTrace(BaseModel):
    """Complex-valued sample sequence with its sample rate.

    Samples are stored as a read-only complex128 array so a trace can be shared
    between threads without copying.
    """

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    samples: np.ndarray = Field(..., description="Complex samples (dimensionless amplitude)")
    sample_rate_hz: float = Field(..., gt=0, description="Sample rate in Hz")

    @field_validator("samples", mode="before")
    @classmethod
    def validate_samples(cls, value: Any) -> np.ndarray:
        array = _frozen_complex(value)
        if array.size < 1:
            raise ValueError("trace must hold at least one sample")
        if not np.all(np.isfinite(array)):
            raise ValueError("trace samples must be finite")
        return array

    def __len__(self) -> int:
        return int(self.samples.size)

    @property
    def duration_s(self) -> float:
        """Trace duration in seconds."""
        return len(self) / self.sample_rate_hz

    def time_axis(self) -> np.ndarray:
        """Sample instants in seconds, starting at zero."""
        return np.arange(len(self)) / self.sample_rate_hz

    def power(self) -> float:
        """Mean power |x|^2."""
        return float(np.mean(np.abs(self.samples) ** 2))

    def with_samples(self, samples: Any) -> "SampleTrace":
        """New trace with the same sample rate."""
        return SampleTrace(samples=samples, sample_rate_hz=self.sample_rate_hz)

    def window(self, start: int, length: int) -> "SampleTrace":
        """Contiguous sub-trace [start, start + length)."""
        if start < 0 or start + length > len(self):
            raise ValueError(f"window [{start}, {start + length}) outside trace of length {len(self)}")
        return self.with_samples(self.samples[start : start + length])


class Spectrum(BaseModel):
    """Unnormalized DFT of an N-sample trace.

    Bin k maps to frequency k * bin_spacing_hz modulo the sample rate, so bins
    above N/2 are negative frequencies.
    """

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    bins: np.ndarray
    bin_spacing_hz: float = Field(..., gt=0)

    @field_validator("bins", mode="before")
    @classmethod
    def validate_bins(cls, value: Any) -> np.ndarray:
        return _frozen_complex(value)

    def __len__(self) -> int:
        return int(self.bins.size)

    @property
    def sample_rate_hz(self) -> float:
        return self.bin_spacing_hz * len(self)


class DualPolFrame(BaseModel):
    """Paired X/Y polarization traces of equal length and rate."""

    model_config = ConfigDict(frozen=True)

    x: SampleTrace
    y: SampleTrace

    @model_validator(mode="after")
    def validate_pair(self) -> "DualPolFrame":
        if len(self.x) != len(self.y):
            raise ValueError(f"X/Y length mismatch: {len(self.x)} != {len(self.y)}")
        if self.x.sample_rate_hz != self.y.sample_rate_hz:
            raise ValueError("X/Y sample rate mismatch")
        return self

    def __len__(self) -> int:
        return len(self.x)

    @property
    def sample_rate_hz(self) -> float:
        return self.x.sample_rate_hz

    def map(self, func) -> "DualPolFrame":
        """Apply a trace -> trace function to both polarizations."""
        return DualPolFrame(x=func(self.x), y=func(self.y))


class RngStream(BaseModel):
    """Seed plus stream id; identical pairs yield identical draws everywhere.

    Backed by numpy's PCG64 seeded through ``SeedSequence`` with the stream id
    as spawn key, which is platform independent.
    """

    model_config = ConfigDict(frozen=True)

    seed: int = Field(..., ge=0, lt=2**64)
    stream_id: int = Field(default=0, ge=0)

    def generator(self) -> np.random.Generator:
        sequence = np.random.SeedSequence(entropy=self.seed, spawn_key=(self.stream_id,))
        return np.random.Generator(np.random.PCG64(sequence))

    def child(self, index: int) -> "RngStream":
        """Derived stream for a sub-task (trial, polarization, stage)."""
        sequence = np.random.SeedSequence(entropy=self.seed, spawn_key=(self.stream_id, index))
        return RngStream(seed=int(sequence.generate_state(2, np.uint64)[0]), stream_id=index)

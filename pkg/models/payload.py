"""16QAM payload frames and BER results."""

from typing import Any

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator


class QamFrame(BaseModel):
    """Gray-mapped 16QAM symbols of one subcarrier and their source bits."""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    symbols: np.ndarray
    bits: np.ndarray
    sc_index: int = Field(..., ge=1)

    @field_validator("symbols", mode="before")
    @classmethod
    def validate_symbols(cls, value: Any) -> np.ndarray:
        array = np.array(value, dtype=np.complex128).reshape(-1)
        array.setflags(write=False)
        return array

    @field_validator("bits", mode="before")
    @classmethod
    def validate_bits(cls, value: Any) -> np.ndarray:
        array = np.array(value, dtype=np.uint8).reshape(-1)
        if np.any(array > 1):
            raise ValueError("bits must be 0 or 1")
        array.setflags(write=False)
        return array

    @model_validator(mode="after")
    def validate_lengths(self) -> "QamFrame":
        if self.bits.size != 4 * self.symbols.size:
            raise ValueError(f"expected {4 * self.symbols.size} bits, got {self.bits.size}")
        return self

    def __len__(self) -> int:
        return int(self.symbols.size)


class BerResult(BaseModel):
    """Bit error count of one subcarrier."""

    model_config = ConfigDict(frozen=True)

    sc_index: int = Field(..., ge=1)
    bit_errors: int = Field(..., ge=0)
    bits_total: int = Field(..., gt=0)
    snr_db: float = Field(default=0.0, description="Data-aided SNR after the matched filter")

    @model_validator(mode="after")
    def validate_counts(self) -> "BerResult":
        if self.bit_errors > self.bits_total:
            raise ValueError("bit_errors exceeds bits_total")
        return self

    @property
    def ber(self) -> float:
        return self.bit_errors / self.bits_total

"""Training-frame (time-and-frequency interleaving tones) models."""

import math
from enum import Enum
from typing import Any

from pydantic import BaseModel, ConfigDict, Field, model_validator


class Polarization(str, Enum):
    """Optical polarization tributary."""

    X = "x"
    Y = "y"


class SlotId(str, Enum):
    """Time slot of one training block.

    t1/t2 carry the X polarization, t3/t4 the Y polarization. In t1/t3 the
    f2 tone sits on the I tributary and the f1 tone on Q; t2/t4 interchange them.
    """

    T1 = "t1"
    T2 = "t2"
    T3 = "t3"
    T4 = "t4"

    @property
    def polarization(self) -> Polarization:
        return Polarization.X if self in (SlotId.T1, SlotId.T2) else Polarization.Y

    @property
    def interleaved(self) -> bool:
        """True when the f1 tone is on the I tributary (t2, t4)."""
        return self in (SlotId.T2, SlotId.T4)

    @property
    def index(self) -> int:
        return list(SlotId).index(self)


class TfitPlan(BaseModel):
    """Full parameterization of the training frame.

    Tone frequencies default to a quarter and a half of the baud rate.
    """

    model_config = ConfigDict(frozen=True)

    baud_rate_hz: float = Field(default=8e9, gt=0, description="Per-subcarrier baud rate fs")
    tone_f1_hz: float | None = Field(default=None, description="Lower tone, default fs/4")
    tone_f2_hz: float | None = Field(default=None, description="Upper tone, default fs/2")
    sc_center_hz: float = Field(default=13.2e9, description="Centre of the upper subcarrier of the pair")
    slot_len_symbols: int = Field(default=2048, gt=0)
    n_blocks: int = Field(default=3, ge=1)
    tone_amplitude: float = Field(default=1 / math.sqrt(2), gt=0)
    tone_phase_rad: float = Field(default=math.pi / 4, description="Carrier phase of the baseband clock tones")
    samples_per_symbol_gen: int = Field(default=8, ge=2)

    @model_validator(mode="before")
    @classmethod
    def fill_tone_defaults(cls, data: Any) -> Any:
        if isinstance(data, dict):
            data = dict(data)
            baud = float(data.get("baud_rate_hz", 8e9))
            if data.get("tone_f1_hz") is None:
                data["tone_f1_hz"] = baud / 4
            if data.get("tone_f2_hz") is None:
                data["tone_f2_hz"] = baud / 2
        return data

    @model_validator(mode="after")
    def validate_tones(self) -> "TfitPlan":
        f1, f2, fs = self.f1, self.f2, self.baud_rate_hz
        if not 0 < f1 < f2 <= fs:
            raise ValueError(f"tones must satisfy 0 < f1 < f2 <= fs, got f1={f1}, f2={f2}, fs={fs}")
        for tone in (f1, f2):
            periods = self.slot_len_symbols * tone / fs
            if abs(periods - round(periods)) > 1e-9:
                raise ValueError(f"slot of {self.slot_len_symbols} symbols holds {periods} periods of {tone} Hz")
        return self

    @property
    def f1(self) -> float:
        return float(self.tone_f1_hz)

    @property
    def f2(self) -> float:
        return float(self.tone_f2_hz)

    @property
    def sample_rate_gen_hz(self) -> float:
        return self.baud_rate_hz * self.samples_per_symbol_gen

    def slot_len_samples(self, samples_per_symbol: int | None = None) -> int:
        sps = samples_per_symbol or self.samples_per_symbol_gen
        return self.slot_len_symbols * sps

    def frame_len_samples(self, samples_per_symbol: int | None = None) -> int:
        return 4 * self.n_blocks * self.slot_len_samples(samples_per_symbol)

    @property
    def slot_duration_s(self) -> float:
        return self.slot_len_symbols / self.baud_rate_hz

    @property
    def active_power(self) -> float:
        """Mean power of the active polarization during a slot (fc != 0)."""
        return 2 * self.tone_amplitude**2

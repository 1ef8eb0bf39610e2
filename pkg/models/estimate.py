"""Estimator configuration, intermediates and the per-capture report."""

import math
from enum import Enum
from pathlib import Path

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, computed_field, model_validator

from models.signal import SampleTrace
from models.tfit import Polarization, SlotId, TfitPlan

# fraction of the unambiguous range beyond which a timing is flagged
WRAP_GUARD = 0.5


class Tributary(str, Enum):
    """Which part of a slot trace a Godard estimate was taken on.

    Rx timings are Q relative to I; Tx timings come from the complex trace.
    """

    Q = "Q"
    COMPLEX = "complex"


class GodardConfig(BaseModel):
    """Settings of the spectral Godard timing detector.

    ``n_avg_bins`` is the number of bins taken on each side of a tone.
    """

    model_config = ConfigDict(frozen=True)

    fft_len: int = Field(default=4096, description="FFT size N, one slot at 2 samples/symbol")
    n_avg_bins: int = Field(default=32, ge=1)
    tone_f1_hz: float = Field(default=2e9, gt=0)
    tone_f2_hz: float = Field(default=4e9, gt=0)
    min_tone_snr_db: float = Field(default=6.0, description="Low-confidence threshold on tone SNR")
    taper: bool = Field(default=True, description="Apply a Hann window before the FFT")

    @model_validator(mode="after")
    def validate_sizes(self) -> "GodardConfig":
        n = self.fft_len
        if n < 16 or n & (n - 1):
            raise ValueError(f"fft_len must be a power of two >= 16, got {n}")
        if not 1 <= self.n_avg_bins <= n // 16:
            raise ValueError(f"n_avg_bins must lie in [1, {n // 16}], got {self.n_avg_bins}")
        return self

    @classmethod
    def from_plan(cls, plan: TfitPlan, samples_per_symbol: int = 2, **overrides) -> "GodardConfig":
        data = {
            "fft_len": plan.slot_len_samples(samples_per_symbol),
            "tone_f1_hz": plan.f1,
            "tone_f2_hz": plan.f2,
        }
        data.update(overrides)
        return cls(**data)

    @property
    def search_span_bins(self) -> int:
        """Half-width of the coarse peak search around a nominal tone bin."""
        return self.fft_len // 32


class TimingEstimate(BaseModel):
    """Timing phase (or timing difference) of one tone."""

    model_config = ConfigDict(frozen=True)

    tau_s: float
    tone_hz: float
    slot: SlotId | None = None
    tributary: Tributary = Tributary.COMPLEX
    block: int | None = None
    tone_snr_db: float | None = None

    @property
    def tau_ps(self) -> float:
        return self.tau_s * 1e12

    @property
    def unambiguous_range_s(self) -> float:
        """Half-width of the timing range before the Godard phase wraps, 1/(4f)."""
        return 1 / (4 * self.tone_hz)

    @property
    def near_wrap(self) -> bool:
        return abs(self.tau_s) >= WRAP_GUARD * self.unambiguous_range_s


class PowerRatio(BaseModel):
    """Power ratio g^2 measured on one tone."""

    model_config = ConfigDict(frozen=True)

    ratio: float = Field(..., gt=0)
    tone_hz: float
    slot: SlotId | None = None
    block: int | None = None

    @property
    def db(self) -> float:
        return 10 * math.log10(self.ratio)


def mean_tau(estimates: list[TimingEstimate]) -> float:
    return float(np.mean([e.tau_s for e in estimates]))


def mean_db(ratios: list[PowerRatio]) -> float:
    return float(np.mean([r.db for r in ratios]))


class PolarizationEstimate(BaseModel):
    """Rx and Tx estimates for one polarization with their intermediates."""

    model_config = ConfigDict(frozen=True)

    polarization: Polarization
    rx_timings: list[TimingEstimate] = Field(default_factory=list)
    rx_ratios: list[PowerRatio] = Field(default_factory=list)
    tx_timings: list[TimingEstimate] = Field(default_factory=list)
    tx_ratios: list[PowerRatio] = Field(default_factory=list)
    quad_error_rx_rad: float = 0.0

    @property
    def tau_rx_s(self) -> float:
        return mean_tau(self.rx_timings)

    @property
    def imbalance_rx_db(self) -> float:
        return mean_db(self.rx_ratios)

    @property
    def tau_tx_s(self) -> float:
        return mean_tau(self.tx_timings)

    @property
    def imbalance_tx_db(self) -> float:
        return mean_db(self.tx_ratios)

    def tx_slot_tau_s(self, slot: SlotId) -> float:
        """Mean per-slot Tx skew (slot-interleaving split diagnostics)."""
        return mean_tau([e for e in self.tx_timings if e.slot == slot])

    @property
    def min_tone_snr_db(self) -> float:
        values = [e.tone_snr_db for e in self.rx_timings + self.tx_timings if e.tone_snr_db is not None]
        return min(values) if values else math.inf

    @property
    def out_of_range(self) -> bool:
        """True when any Rx or Tx timing sits near its phase-wrap limit."""
        return any(e.near_wrap for e in self.rx_timings + self.tx_timings)


class EstimateReport(BaseModel):
    """All estimator outputs for one leaf capture.

    This is also the uplink report a leaf hands back to the hub.
    """

    model_config = ConfigDict(frozen=True)

    sc_index: int = Field(default=1, ge=1)
    n_blocks_used: int = Field(..., ge=1)
    x: PolarizationEstimate
    y: PolarizationEstimate

    def for_pol(self, pol: Polarization) -> PolarizationEstimate:
        return self.x if pol == Polarization.X else self.y

    @computed_field
    @property
    def out_of_range(self) -> bool:
        return self.x.out_of_range or self.y.out_of_range

    def finals(self) -> dict[str, float]:
        """Averaged final values in ps / dB, keyed like CSV columns."""
        values: dict[str, float] = {}
        for pol in Polarization:
            est = self.for_pol(pol)
            values[f"tau_rx_{pol.value}_ps"] = est.tau_rx_s * 1e12
            values[f"imb_rx_{pol.value}_db"] = est.imbalance_rx_db
            values[f"tau_tx_{pol.value}_ps"] = est.tau_tx_s * 1e12
            values[f"imb_tx_{pol.value}_db"] = est.imbalance_tx_db
        return values

    def write_json(self, path: Path) -> Path:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(self.model_dump_json(indent=2), encoding="utf-8")
        return path

    @classmethod
    def read_json(cls, path: Path) -> "EstimateReport":
        return cls.model_validate_json(path.read_text(encoding="utf-8"))


class SlotTrace(BaseModel):
    """Received samples of one slot of one block (2 samples/symbol)."""

    model_config = ConfigDict(frozen=True)

    slot: SlotId
    block: int = Field(default=0, ge=0)
    trace: SampleTrace

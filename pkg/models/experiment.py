"""Experiment configuration, sweep grids and result rows."""

import itertools
import math
from enum import Enum
from pathlib import Path

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from models.estimate import EstimateReport
from models.impairment import ImpairmentSet, IqImpairment
from models.link import ChannelConfig, SubcarrierPlan
from models.payload import BerResult
from models.tfit import Polarization, TfitPlan


class SweepAxisName(str, Enum):
    """Quantities a sweep can vary. Impairment axes apply to both polarizations."""

    RX_SKEW_PS = "rx_skew_ps"
    RX_IMBALANCE_DB = "rx_imbalance_db"
    RX_QUAD_DEG = "rx_quad_deg"
    TX_SKEW_PS = "tx_skew_ps"
    TX_IMBALANCE_DB = "tx_imbalance_db"
    TX_QUAD_DEG = "tx_quad_deg"
    OSNR_DB = "osnr_db"


class SweepAxis(BaseModel):
    """Inclusive start..stop grid with a fixed step."""

    model_config = ConfigDict(frozen=True)

    name: SweepAxisName
    start: float
    stop: float
    step: float = 0.0

    @model_validator(mode="after")
    def validate_range(self) -> "SweepAxis":
        span = self.stop - self.start
        if span == 0:
            return self
        if self.step == 0 or math.copysign(1, span) != math.copysign(1, self.step):
            raise ValueError(f"step {self.step} inconsistent with range {self.start}..{self.stop}")
        return self

    def values(self) -> list[float]:
        if self.stop == self.start:
            return [self.start]
        count = int(math.floor((self.stop - self.start) / self.step + 1e-9)) + 1
        return [round(self.start + i * self.step, 9) for i in range(count)]


class EstimatorOptions(BaseModel):
    """Estimator knobs exposed in the config file under ``estimator.*``."""

    model_config = ConfigDict(frozen=True)

    n_avg_bins: int = Field(default=32, ge=1)
    min_tone_snr_db: float = 6.0
    taper: bool = True
    gsop: bool = True


class ExperimentConfig(BaseModel):
    """Everything one sweep needs. Axes form a cartesian grid over ``impairments``."""

    model_config = ConfigDict(frozen=True)

    name: str = "experiment"
    tfit: TfitPlan = Field(default_factory=TfitPlan)
    subcarriers: SubcarrierPlan = Field(default_factory=SubcarrierPlan)
    channel: ChannelConfig = Field(default_factory=ChannelConfig)
    impairments: ImpairmentSet = Field(default_factory=ImpairmentSet)
    axes: list[SweepAxis] = Field(default_factory=list)
    trials_per_point: int = Field(default=10, ge=1)
    seed: int = Field(default=20240607, ge=0, lt=2**64)
    sc_index: int = Field(default=1, ge=1)
    estimator: EstimatorOptions = Field(default_factory=EstimatorOptions)
    guard_symbols: int = Field(default=256, ge=0)
    payload_symbols: int = Field(default=100_000, ge=1)
    ber_subcarriers: tuple[int, ...] = (1, 2)
    output_dir: Path = Path("reports")

    @model_validator(mode="after")
    def validate_experiment(self) -> "ExperimentConfig":
        names = [axis.name for axis in self.axes]
        if len(names) != len(set(names)):
            raise ValueError(f"duplicate sweep axes: {names}")
        for index in (self.sc_index, *self.ber_subcarriers):
            if not 1 <= index <= self.subcarriers.n_sc:
                raise ValueError(f"subcarrier index {index} outside 1..{self.subcarriers.n_sc}")
        if self.tfit.baud_rate_hz != self.subcarriers.per_sc_baud_hz:
            raise ValueError("training frame and subcarrier plan disagree on the baud rate")
        return self

    def grid(self) -> list[dict[str, float]]:
        """Sweep points in deterministic (row-major) order."""
        if not self.axes:
            return [{}]
        keys = [axis.name.value for axis in self.axes]
        return [dict(zip(keys, combo, strict=True)) for combo in itertools.product(*(a.values() for a in self.axes))]

    def point_impairments(self, point: dict[str, float]) -> ImpairmentSet:
        """Base impairments with the point's axis values substituted."""
        updates = {}
        for side in ("tx", "rx"):
            for pol in Polarization:
                base = getattr(self.impairments, f"{side}_{pol.value}")
                updates[f"{side}_{pol.value}"] = IqImpairment.from_db(
                    skew_ps=point.get(f"{side}_skew_ps", base.skew_ps),
                    imbalance_db=point.get(f"{side}_imbalance_db", base.imbalance_db),
                    quad_error_deg=point.get(f"{side}_quad_deg", math.degrees(base.quad_error_rad)),
                )
        return ImpairmentSet(**updates)

    def point_channel(self, point: dict[str, float]) -> ChannelConfig:
        if SweepAxisName.OSNR_DB.value in point:
            return self.channel.model_copy(update={"osnr_db": point[SweepAxisName.OSNR_DB.value]})
        return self.channel

    @property
    def csv_dir(self) -> Path:
        return self.output_dir / "csv"

    @property
    def plot_dir(self) -> Path:
        return self.output_dir / "plots"

    @property
    def report_dir(self) -> Path:
        """Estimate reports (JSON) of the estimate command."""
        return self.output_dir / "estimates"


class FrameLocation(BaseModel):
    """Detected training frame position in a 2 samples/symbol capture."""

    model_config = ConfigDict(frozen=True)

    start: int = Field(..., ge=0)
    slot_len: int = Field(..., gt=0)
    n_blocks: int = Field(..., ge=1)
    metric: float = 0.0

    def slot_start(self, block: int, slot_index: int) -> int:
        return self.start + (4 * block + slot_index) * self.slot_len


ESTIMATE_KEYS = tuple(
    f"{name}_{pol.value}_{unit}"
    for pol in Polarization
    for name, unit in (("tau_rx", "ps"), ("imb_rx", "db"), ("tau_tx", "ps"), ("imb_tx", "db"))
)


def preset_values(impairments: ImpairmentSet) -> dict[str, float]:
    """Injected impairments keyed like ``EstimateReport.finals``."""
    values: dict[str, float] = {}
    for pol in Polarization:
        rx, tx = impairments.rx(pol), impairments.tx(pol)
        values[f"tau_rx_{pol.value}_ps"] = rx.skew_ps
        values[f"imb_rx_{pol.value}_db"] = rx.imbalance_db
        values[f"tau_tx_{pol.value}_ps"] = tx.skew_ps
        values[f"imb_tx_{pol.value}_db"] = tx.imbalance_db
    return values


class SweepRow(BaseModel):
    """One trial of one estimation sweep point."""

    model_config = ConfigDict(frozen=True)

    point: int
    trial: int
    seed: int
    axes: dict[str, float] = Field(default_factory=dict)
    preset: dict[str, float]
    estimate: dict[str, float] = Field(default_factory=dict)
    min_tone_snr_db: float | None = None
    out_of_range: bool = False
    error: str | None = None

    @classmethod
    def from_report(
        cls, point: int, trial: int, seed: int, axes: dict[str, float], preset: dict[str, float], report: EstimateReport
    ) -> "SweepRow":
        snr = min(report.x.min_tone_snr_db, report.y.min_tone_snr_db)
        return cls(
            point=point,
            trial=trial,
            seed=seed,
            axes=axes,
            preset=preset,
            estimate=report.finals(),
            min_tone_snr_db=None if math.isinf(snr) else snr,
            out_of_range=report.out_of_range,
        )

    @property
    def errors(self) -> dict[str, float]:
        """estimate - preset for every estimated quantity."""
        return {key: self.estimate[key] - self.preset[key] for key in self.estimate}

    def max_abs_error(self, prefix: str) -> float:
        values = [abs(v) for k, v in self.errors.items() if k.startswith(prefix)]
        return float(np.max(values)) if values else math.nan


class BerRow(BaseModel):
    """BER of one subcarrier at one sweep point, with or without compensation."""

    model_config = ConfigDict(frozen=True)

    point: int
    trial: int
    seed: int
    axes: dict[str, float] = Field(default_factory=dict)
    sc_index: int
    compensated: bool
    result: BerResult | None = None
    error: str | None = None

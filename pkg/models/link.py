"""Subcarrier multiplexing plan and optical channel configuration."""

import math

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator
from scipy import constants

from models.error import ConfigurationError
from models.signal import RngStream

OSNR_REFERENCE_BANDWIDTH_HZ = 12.5e9
CARRIER_WAVELENGTH_M = 1550.12e-9
SPEED_OF_LIGHT_M_S = constants.c


class SubcarrierPlan(BaseModel):
    """DSCM subcarrier grid. Subcarriers are numbered from 1 (SC-1 ... SC-n)."""

    model_config = ConfigDict(frozen=True)

    n_sc: int = Field(default=4, ge=1)
    per_sc_baud_hz: float = Field(default=8e9, gt=0)
    centers_hz: tuple[float, ...] = Field(default=(13.2e9, 4.4e9, -4.4e9, -13.2e9))
    rrc_rolloff: float = Field(default=0.1, ge=0, lt=1)

    @model_validator(mode="after")
    def validate_grid(self) -> "SubcarrierPlan":
        if len(self.centers_hz) != self.n_sc:
            raise ValueError(f"expected {self.n_sc} centers, got {len(self.centers_hz)}")
        ordered = sorted(self.centers_hz)
        mirrored = sorted(-c for c in self.centers_hz)
        if not all(math.isclose(a, b, abs_tol=1.0) for a, b in zip(ordered, mirrored, strict=True)):
            raise ValueError("subcarrier centers must come in symmetric +/- pairs")
        for low, high in zip(ordered, ordered[1:], strict=False):
            if high - low < self.band_hz * (1 - 1e-9):
                raise ValueError(f"subcarriers at {low} Hz and {high} Hz overlap (band {self.band_hz} Hz)")
        return self

    @property
    def band_hz(self) -> float:
        """Occupied bandwidth of one subcarrier, baud * (1 + rolloff)."""
        return self.per_sc_baud_hz * (1 + self.rrc_rolloff)

    @property
    def occupied_bandwidth_hz(self) -> float:
        return self.n_sc * self.band_hz

    @property
    def max_abs_frequency_hz(self) -> float:
        return max(abs(c) for c in self.centers_hz) + self.band_hz / 2

    def center_hz(self, sc_index: int) -> float:
        if not 1 <= sc_index <= self.n_sc:
            raise ConfigurationError(f"subcarrier index {sc_index} outside 1..{self.n_sc}")
        return self.centers_hz[sc_index - 1]

    def mirror_index(self, sc_index: int) -> int:
        """Index of the symmetric twin (SC-1 <-> SC-4 with the default grid)."""
        center = self.center_hz(sc_index)
        for index, other in enumerate(self.centers_hz, start=1):
            if math.isclose(other, -center, abs_tol=1.0):
                return index
        raise ConfigurationError(f"subcarrier {sc_index} has no mirror")


class ChannelConfig(BaseModel):
    """Laser, noise and fiber settings of the optical channel.

    ``osnr_db`` may be ``inf`` to disable noise loading.
    """

    model_config = ConfigDict(frozen=True)

    freq_offset_hz: float = Field(default=100e6, description="Tx/LO laser frequency offset")
    linewidth_hz: float = Field(default=100e3, ge=0, description="Combined laser linewidth")
    carrier_phase_rad: float = Field(default=0.0, description="Tx/LO laser phase at the start of the capture")
    osnr_db: float = Field(default=17.0, description="OSNR in a 12.5 GHz reference bandwidth")
    fiber_km: float = Field(default=0.0, ge=0)
    dispersion_ps_nm_km: float = Field(default=16.8)
    enable_cd: bool = Field(default=False)
    device_cubic_ps3: float = Field(default=0.0, description="Cubic phase coefficient of the transceiver response")
    seed: RngStream = Field(default_factory=lambda: RngStream(seed=20240607))

    @field_validator("osnr_db")
    @classmethod
    def validate_osnr(cls, value: float) -> float:
        if math.isnan(value) or value == -math.inf:
            raise ValueError(f"OSNR must be a number or +inf, got {value}")
        return value

    @property
    def noiseless(self) -> bool:
        return math.isinf(self.osnr_db)

    @property
    def laser_free(self) -> bool:
        """No frequency offset, phase noise or carrier phase."""
        return self.freq_offset_hz == 0 and self.linewidth_hz == 0 and self.carrier_phase_rad == 0

    @property
    def dispersion_s_per_m2(self) -> float:
        """Dispersion D in SI units (s/m^2)."""
        return self.dispersion_ps_nm_km * 1e-6

    @property
    def accumulated_dispersion_s_per_m(self) -> float:
        """D * L in s/m, zero when CD is disabled."""
        if not self.enable_cd:
            return 0.0
        return self.dispersion_s_per_m2 * self.fiber_km * 1e3

    def ideal(self) -> "ChannelConfig":
        """Same channel without offset, phase noise, noise or fiber."""
        return self.model_copy(
            update={
                "freq_offset_hz": 0.0,
                "linewidth_hz": 0.0,
                "carrier_phase_rad": 0.0,
                "osnr_db": math.inf,
                "enable_cd": False,
            }
        )

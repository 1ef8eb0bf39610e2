"""IQ impairment models for transmitter and receiver tributaries."""

import math

from pydantic import BaseModel, ConfigDict, Field, field_validator

from models.tfit import Polarization


class IqImpairment(BaseModel):
    """One side's, one polarization's IQ skew, gain and quadrature error.

    Positive ``skew_s`` means the Q tributary is advanced, i.e. Q is taken at
    ``t + skew_s``. ``gain`` is the amplitude ratio applied to Q.
    """

    model_config = ConfigDict(frozen=True)

    skew_s: float = Field(default=0.0, description="IQ skew in seconds")
    gain: float = Field(default=1.0, gt=0, description="Q/I amplitude ratio")
    quad_error_rad: float = Field(default=0.0, description="Phase quadrature error in radians")

    @field_validator("quad_error_rad")
    @classmethod
    def validate_quad_error(cls, value: float) -> float:
        if not abs(value) < math.pi / 2:
            raise ValueError(f"quadrature error must satisfy |theta| < pi/2, got {value}")
        return value

    @classmethod
    def from_db(cls, skew_ps: float = 0.0, imbalance_db: float = 0.0, quad_error_deg: float = 0.0) -> "IqImpairment":
        """Build from the units used on sweep axes (ps, dB, degrees)."""
        return cls(
            skew_s=skew_ps * 1e-12,
            gain=10 ** (imbalance_db / 20),
            quad_error_rad=math.radians(quad_error_deg),
        )

    @property
    def imbalance_db(self) -> float:
        """Power imbalance 20*log10(g)."""
        return 20 * math.log10(self.gain)

    @property
    def skew_ps(self) -> float:
        return self.skew_s * 1e12

    @property
    def is_identity(self) -> bool:
        return self.skew_s == 0 and self.gain == 1 and self.quad_error_rad == 0


class ImpairmentSet(BaseModel):
    """Tx and Rx impairments for both polarizations."""

    model_config = ConfigDict(frozen=True)

    tx_x: IqImpairment = Field(default_factory=IqImpairment)
    tx_y: IqImpairment = Field(default_factory=IqImpairment)
    rx_x: IqImpairment = Field(default_factory=IqImpairment)
    rx_y: IqImpairment = Field(default_factory=IqImpairment)

    def tx(self, pol: Polarization) -> IqImpairment:
        return self.tx_x if pol == Polarization.X else self.tx_y

    def rx(self, pol: Polarization) -> IqImpairment:
        return self.rx_x if pol == Polarization.X else self.rx_y

    @classmethod
    def uniform(cls, tx: IqImpairment | None = None, rx: IqImpairment | None = None) -> "ImpairmentSet":
        """Same Tx and Rx impairment on both polarizations."""
        tx = tx or IqImpairment()
        rx = rx or IqImpairment()
        return cls(tx_x=tx, tx_y=tx, rx_x=rx, rx_y=rx)

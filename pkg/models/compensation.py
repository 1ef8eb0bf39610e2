"""Compensation settings derived from estimates."""

import math

from pydantic import BaseModel, ConfigDict, Field


class CompensationSpec(BaseModel):
    """Skew and gain to remove from the Q tributary.

    ``gain_correction`` is the estimated g; compensation multiplies Q by 1/g.
    """

    model_config = ConfigDict(frozen=True)

    tau_s: float = Field(default=0.0, description="Estimated skew to undo")
    gain_correction: float = Field(default=1.0, gt=0, description="Estimated Q/I amplitude ratio g")
    apply_gsop_first: bool = Field(default=False)

    @classmethod
    def from_db(cls, tau_ps: float, imbalance_db: float, apply_gsop_first: bool = False) -> "CompensationSpec":
        return cls(
            tau_s=tau_ps * 1e-12,
            gain_correction=10 ** (imbalance_db / 20),
            apply_gsop_first=apply_gsop_first,
        )

    @property
    def imbalance_db(self) -> float:
        return 20 * math.log10(self.gain_correction)

    @property
    def is_identity(self) -> bool:
        return self.tau_s == 0 and self.gain_correction == 1 and not self.apply_gsop_first

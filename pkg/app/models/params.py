"""
Physical Parameters
Surface tension and mobility contrast of the two fluids
"""
import math

from pydantic import BaseModel, ConfigDict, Field

from app.config import settings


class PhysicalParams(BaseModel):
    """
    Surface tension and mobilities in the (K_eff, A) parameterization.

    K_eff = 2 K1 K2 / (K1 + K2) and A = (K2 - K1) / (K2 + K1).
    A = -1 is the one-phase limit (K1 -> infinity, K_eff = 2 K2).
    """

    model_config = ConfigDict(frozen=True)

    tau: float = Field(default_factory=lambda: settings.DEFAULT_TAU, gt=0)
    k_eff: float = Field(default_factory=lambda: settings.DEFAULT_K_EFF, gt=0)
    atwood: float = Field(default_factory=lambda: settings.DEFAULT_ATWOOD, ge=-1, le=1)

    @classmethod
    def from_mobilities(cls, tau: float, k1: float, k2: float) -> "PhysicalParams":
        if k1 <= 0 or k2 <= 0:
            raise ValueError("Mobilities must be positive")
        return cls(tau=tau, k_eff=2 * k1 * k2 / (k1 + k2), atwood=(k2 - k1) / (k2 + k1))

    @classmethod
    def one_phase(cls, tau: float = 1.0, k2: float = 1.0) -> "PhysicalParams":
        return cls(tau=tau, k_eff=2 * k2, atwood=-1.0)

    @property
    def is_one_phase(self) -> bool:
        return self.atwood == -1.0

    @property
    def k1(self) -> float:
        if self.is_one_phase:
            return math.inf
        return self.k_eff / (1 + self.atwood)

    @property
    def k2(self) -> float:
        if self.atwood == 1.0:
            return math.inf
        return self.k_eff / (1 - self.atwood)

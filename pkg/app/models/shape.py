"""
Shape Models
Cosine-mode interface representation and its sampled geometry
"""
from typing import List, Mapping

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator


class FourierShape(BaseModel):
    """Interface radius r(alpha) = sum_k coeffs[k] * cos(k alpha)"""

    model_config = ConfigDict(frozen=True)

    coeffs: List[float] = Field(..., min_length=2)

    @field_validator("coeffs")
    @classmethod
    def finite_coeffs(cls, value: List[float]) -> List[float]:
        if not np.all(np.isfinite(value)):
            raise ValueError("Fourier coefficients must be finite")
        return value

    @classmethod
    def from_array(cls, coeffs) -> "FourierShape":
        return cls(coeffs=[float(c) for c in np.asarray(coeffs, dtype=float)])

    @classmethod
    def from_modes(cls, n1: int, modes: Mapping[int, float]) -> "FourierShape":
        """Build a shape from a sparse mode -> amplitude map; mode 0 defaults to 1"""
        coeffs = np.zeros(n1)
        coeffs[0] = 1.0
        for mode, amplitude in modes.items():
            if not 0 <= int(mode) < n1:
                raise ValueError(f"Mode {mode} outside 0..{n1 - 1}")
            coeffs[int(mode)] = amplitude
        return cls.from_array(coeffs)

    @property
    def n1(self) -> int:
        return len(self.coeffs)

    @property
    def array(self) -> np.ndarray:
        return np.asarray(self.coeffs, dtype=float)


class SampledInterface(BaseModel):
    """Nodal geometry of a FourierShape at n2 equispaced polar angles"""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    n2: int
    alpha: np.ndarray
    x: np.ndarray
    y: np.ndarray
    tangent: np.ndarray  # shape (2, n2)
    normal: np.ndarray  # shape (2, n2), outward
    s_alpha: np.ndarray
    kappa: np.ndarray

    @property
    def delta_alpha(self) -> float:
        return 2.0 * np.pi / self.n2

    @property
    def radius(self) -> np.ndarray:
        return np.hypot(self.x, self.y)

    @property
    def weights(self) -> np.ndarray:
        """Trapezoidal arclength weights s_alpha * delta_alpha"""
        return self.s_alpha * self.delta_alpha

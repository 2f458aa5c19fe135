"""
Validation Report Model
One row per oracle check
"""
import math
from typing import Optional

from pydantic import BaseModel, Field


class ValidationReport(BaseModel):
    """Measured error of a closed-form or brute-force check; error is None when not finite"""
    check: str
    error: Optional[float] = Field(default=None, ge=0, allow_inf_nan=False)
    tolerance: float
    passed: bool
    n2: int

    @classmethod
    def build(cls, check: str, error: float, tolerance: float, n2: int) -> "ValidationReport":
        error = abs(float(error))
        if not math.isfinite(error):
            return cls(check=check, error=None, tolerance=tolerance, passed=False, n2=n2)
        return cls(check=check, error=error, tolerance=tolerance, passed=error <= tolerance, n2=n2)

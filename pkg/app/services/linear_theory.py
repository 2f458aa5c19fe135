"""
Linear Theory Service
Closed-form linear stability of a slightly perturbed circular interface
"""
from typing import List, Optional, Tuple

import numpy as np
from pydantic import BaseModel, Field
from scipy.optimize import curve_fit

from app.exceptions import DomainError
from app.models.params import PhysicalParams

# exponent of the best fit through nonlinear self-similar flux constants, k >= 4
FITTED_EXPONENT = 1.939


class LinearMode(BaseModel):
    """Azimuthal mode k on a circle of radius R fed by injection flux J"""
    k: int = Field(..., ge=1)
    J: float
    R: float = Field(..., gt=0)
    delta_k: float = 0.0


def linear_flux_constant(k: int) -> float:
    """C = k (k^2 - 1) / (k - 2)"""
    if k <= 2:
        raise DomainError(f"linear flux constant needs k >= 3, got {k}")
    return k * (k ** 2 - 1) / (k - 2)


def fitted_flux_constant(k: int) -> float:
    """C = k (k^1.939 - 1) / (k - 2)"""
    if k <= 3:
        raise DomainError(f"fitted flux constant needs k >= 4, got {k}")
    return k * (k ** FITTED_EXPONENT - 1) / (k - 2)


def two_phase_flux_constant(k: int, params: PhysicalParams) -> float:
    """
    tau K_eff k (k^2 - 1) / (2 (-A k - 2)); reduces to linear_flux_constant
    for tau = 1, K_eff = 2 and A = -1.
    """
    if k <= 1:
        raise DomainError(f"two-phase flux constant needs k >= 2, got {k}")
    denominator = -params.atwood * k - 2.0
    if denominator == 0.0:
        raise DomainError(f"mode {k} is the pole of the flux constant at A={params.atwood}")
    return params.tau * params.k_eff * k * (k ** 2 - 1) / (2.0 * denominator)


def shape_factor_growth_rate(mode: LinearMode, C: float) -> float:
    """d(delta_k/R)/dt divided by delta_k/R: (k - 2)(J - C/R) / R^2"""
    return (mode.k - 2) * (mode.J - C / mode.R) / mode.R ** 2


def critical_flux(k: int, R: float, C: float) -> float:
    """Injection flux J = C/R at which the shape factor of mode k is time independent"""
    if k == 2:
        raise DomainError("mode 2 is neutral for every flux")
    if R <= 0:
        raise DomainError(f"radius must be positive, got {R}")
    return C / R


def scale_evolution(r0: float, C: float, t: float) -> float:
    """R(t) = (r0^3 + 3 C t)^(1/3), the solution of dR/dt R^2 = C"""
    if r0 <= 0:
        raise DomainError(f"initial radius must be positive, got {r0}")
    radicand = r0 ** 3 + 3.0 * C * t
    if radicand <= 0:
        raise DomainError(f"r0^3 + 3Ct = {radicand} is not positive")
    return radicand ** (1.0 / 3.0)


def linear_table(k_min: int, k_max: int) -> List[Tuple[int, float, Optional[float]]]:
    """Rows (k, linear C, fitted C); the fit is undefined below k = 4"""
    if k_min <= 2:
        raise DomainError(f"linear table needs k_min >= 3, got {k_min}")
    if k_max < k_min:
        raise DomainError("k_max must not be below k_min")

    rows = []
    for k in range(k_min, k_max + 1):
        fitted = fitted_flux_constant(k) if k > 3 else None
        rows.append((k, linear_flux_constant(k), fitted))
    return rows


def deviation_slope(shape_factors, flux_constants, k: int, baseline: Optional[float] = None) -> float:
    """
    Slope k' of (C - C_lin) against (delta/R)^2 by least squares through the origin.

    baseline replaces the one-phase C_lin of mode k when given.
    """
    x = np.asarray(shape_factors, dtype=float) ** 2
    y = np.asarray(flux_constants, dtype=float) - (linear_flux_constant(k) if baseline is None else baseline)
    if not np.any(x):
        raise DomainError("at least one nonzero shape factor is needed")
    return float(np.dot(x, y) / np.dot(x, x))


def fit_flux_exponent(folds, flux_constants) -> float:
    """
    Exponent p of C = k (k^p - 1) / (k - 2) fitted to nonlinear flux constants.

    Needs at least one fold k >= 3; p = 2 reproduces linear theory.
    """
    k = np.asarray(folds, dtype=float)
    c = np.asarray(flux_constants, dtype=float)
    if k.size == 0 or k.size != c.size or np.any(k < 3):
        raise DomainError("fold curve fit needs matching flux constants of folds k >= 3")

    def model(k, p):
        return k * (k ** p - 1.0) / (k - 2.0)

    (p,), _ = curve_fit(model, k, c, p0=[2.0])
    return float(p)

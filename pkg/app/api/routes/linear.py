"""
Linear Theory Routes
Closed-form flux constants and growth rates
"""
from typing import List, Optional

from fastapi import APIRouter, HTTPException, Path, Query
from pydantic import BaseModel

from app.config import settings
from app.exceptions import DomainError
from app.models.params import PhysicalParams
from app.services.linear_theory import (
    LinearMode,
    critical_flux,
    fitted_flux_constant,
    linear_flux_constant,
    linear_table,
    shape_factor_growth_rate,
    two_phase_flux_constant,
)

router = APIRouter()


class FluxConstantResponse(BaseModel):
    k: int
    linear: float
    fitted: Optional[float] = None
    two_phase: Optional[float] = None


@router.get("/flux-constant/{k}", response_model=FluxConstantResponse)
async def get_flux_constant(
    k: int,
    tau: float = Query(settings.DEFAULT_TAU, gt=0),
    k_eff: float = Query(settings.DEFAULT_K_EFF, gt=0),
    atwood: float = Query(settings.DEFAULT_ATWOOD, ge=-1, le=1),
):
    """Linear, fitted and two-phase flux constants of mode k"""
    try:
        linear = linear_flux_constant(k)
    except DomainError as e:
        raise HTTPException(status_code=400, detail=str(e))

    params = PhysicalParams(tau=tau, k_eff=k_eff, atwood=atwood)
    try:
        two_phase = two_phase_flux_constant(k, params)
    except DomainError:
        two_phase = None

    return FluxConstantResponse(
        k=k,
        linear=linear,
        fitted=fitted_flux_constant(k) if k > 3 else None,
        two_phase=two_phase,
    )


@router.get("/table", response_model=List[FluxConstantResponse])
async def get_linear_table(k_min: int = 3, k_max: int = 12):
    """Linear and fitted flux constants for k_min..k_max"""
    try:
        rows = linear_table(k_min, k_max)
    except DomainError as e:
        raise HTTPException(status_code=400, detail=str(e))
    return [FluxConstantResponse(k=k, linear=linear, fitted=fitted) for k, linear, fitted in rows]


class GrowthResponse(BaseModel):
    k: int
    J: float
    R: float
    C: float
    rate: float
    critical_flux: Optional[float] = None


@router.get("/growth/{k}", response_model=GrowthResponse)
async def get_growth(
    k: int = Path(..., ge=1),
    J: float = Query(...),
    R: float = Query(1.0, gt=0),
    C: Optional[float] = None,
):
    """Linear growth rate of the shape factor of mode k and the flux J = C/R that freezes it"""
    if C is None:
        try:
            C = linear_flux_constant(k)
        except DomainError as e:
            raise HTTPException(status_code=400, detail=str(e))

    try:
        critical = critical_flux(k, R, C)
    except DomainError:
        critical = None

    rate = shape_factor_growth_rate(LinearMode(k=k, J=J, R=R), C)
    return GrowthResponse(k=k, J=J, R=R, C=C, rate=rate, critical_flux=critical)

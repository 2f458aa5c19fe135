"""
Validation Routes
Closed-form oracle checks of the quadrature
"""
from typing import List

from fastapi import APIRouter, HTTPException, Query

from app.exceptions import ConfigurationError
from app.models.validation import ValidationReport
from app.services.oracle import circle_identity_suite, layer_eigenrelation_check

router = APIRouter()


@router.get("/circle", response_model=List[ValidationReport])
async def validate_circle(n2: int = Query(256, ge=16, le=4096)):
    """Circle identities at n2 nodes"""
    try:
        return circle_identity_suite(n2)
    except ConfigurationError as e:
        raise HTTPException(status_code=400, detail=str(e))


@router.get("/eigenrelations", response_model=List[ValidationReport])
async def validate_eigenrelations(
    kmax: int = Query(8, ge=1),
    n2: int = Query(256, ge=16, le=4096),
):
    """Single-layer and hypersingular eigenrelations on the unit circle"""
    try:
        return layer_eigenrelation_check(kmax, n2)
    except ConfigurationError as e:
        raise HTTPException(status_code=400, detail=str(e))

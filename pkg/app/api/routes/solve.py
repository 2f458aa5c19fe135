"""
Solve Routes
Synchronous self-similar solves
"""
import asyncio

from fastapi import APIRouter, HTTPException

from app.exceptions import InvalidShapeError, SelfSimilarError
from app.models.run import RunConfig
from app.models.solver import SolveResult
from app.services.solver import solve_self_similar

router = APIRouter()


@router.post("/", response_model=SolveResult)
async def solve(config: RunConfig):
    """Solve at the config's C0 and seed modes; the experiment section is ignored"""
    loop = asyncio.get_running_loop()
    try:
        solver_config = config.solver_config()
        return await loop.run_in_executor(None, solve_self_similar, solver_config, config.physical_params())
    except InvalidShapeError as e:
        raise HTTPException(status_code=422, detail=str(e))
    except (SelfSimilarError, ValueError) as e:
        raise HTTPException(status_code=400, detail=str(e))

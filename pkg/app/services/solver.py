"""
Solver Service
Finite-difference Newton iteration for M + C0 G = 0 with backtracking and eigenpair normalization
"""
import logging
from typing import Callable, List, NamedTuple, Optional, Tuple

import numpy as np
import scipy.linalg

from app.exceptions import (
    DegenerateEigenvectorError,
    InvalidShapeError,
    LineSearchError,
    SingularJacobianError,
)
from app.models.params import PhysicalParams
from app.models.shape import FourierShape
from app.models.solver import (
    LinearSystem,
    LineSearchConfig,
    SolveResult,
    SolverConfig,
    SolveStatus,
)
from app.services.geometry import (
    dominant_fold,
    fourier_projection_matrix,
    rescale,
    sample_interface,
    shape_factor,
)
from app.services.operators import flux_constant, op_m, residual

logger = logging.getLogger(__name__)


class LineSearchStep(NamedTuple):
    shape: FourierShape
    step: float
    residual: np.ndarray


def fd_jacobian(
    shape: FourierShape,
    c0: float,
    params: PhysicalParams,
    n2: int,
    h: float,
    f0: Optional[np.ndarray] = None,
) -> np.ndarray:
    """
    Forward-difference Jacobian of the nodal residual, one column per coefficient.

    Column j uses the step h * max(1, |delta_j|).
    """
    coeffs = shape.array
    if f0 is None:
        f0 = residual(shape, c0, params, n2)
    steps = h * np.maximum(1.0, np.abs(coeffs))

    jacobian = np.empty((f0.size, coeffs.size))
    for j, step in enumerate(steps):
        perturbed = coeffs.copy()
        perturbed[j] += step
        try:
            fj = residual(FourierShape.from_array(perturbed), c0, params, n2)
        except InvalidShapeError as e:
            raise InvalidShapeError(f"Jacobian column {j}: {e}", column=j) from e
        jacobian[:, j] = (fj - f0) / step
    return jacobian


def newton_step(
    jacobian: np.ndarray,
    f: np.ndarray,
    rcond: Optional[float] = None,
    allow_rank_deficient: bool = False,
    family_gap: Optional[float] = None,
) -> Tuple[np.ndarray, float]:
    """
    Least-squares update minimizing ||J d + f||_2, solved through the SVD of J.

    Singular values below rcond * sigma_max are discarded (minimum-norm step) and
    raise SingularJacobianError unless allow_rank_deficient. With family_gap, the
    smallest retained singular value is discarded too when it lies below
    family_gap times the next one; that direction is the tangent of the curve of
    solutions through the iterate.

    Returns the update and the residual norm ||J d + f||_2.
    """
    jacobian = np.asarray(jacobian, dtype=float)
    f = np.asarray(f, dtype=float)
    if not np.all(np.isfinite(jacobian)):
        raise SingularJacobianError("Jacobian has non-finite entries")

    u, sigma, vt = scipy.linalg.svd(jacobian, full_matrices=False)
    if rcond is None:
        rcond = np.finfo(float).eps * max(jacobian.shape)
    rank = int(np.count_nonzero(sigma > rcond * sigma[0]))
    if rank < jacobian.shape[1] and not allow_rank_deficient:
        raise SingularJacobianError(
            f"Jacobian has numerical rank {rank} < {jacobian.shape[1]} unknowns"
        )

    kept = rank
    if family_gap is not None and kept >= 2 and sigma[kept - 1] < family_gap * sigma[kept - 2]:
        logger.debug("dropping singular value %.3e (next %.3e)", sigma[kept - 1], sigma[kept - 2])
        kept -= 1

    delta = vt[:kept].T @ ((u[:, :kept].T @ -f) / sigma[:kept])
    return delta, float(np.linalg.norm(jacobian @ delta + f))


def backtrack(
    x: np.ndarray,
    delta: np.ndarray,
    objective: Callable[[np.ndarray], np.ndarray],
    config: LineSearchConfig,
    current: Optional[float] = None,
    norm: Callable[[np.ndarray], float] = np.linalg.norm,
) -> Tuple[np.ndarray, float, np.ndarray]:
    """
    Try x + lambda * delta for lambda = 1, shrink, shrink^2, ... and accept the first
    trial whose residual norm drops below (1 - sufficient_decrease * lambda) * current.

    Trials where the objective raises InvalidShapeError are rejected.
    """
    x = np.asarray(x, dtype=float)
    delta = np.asarray(delta, dtype=float)
    if current is None:
        current = float(norm(objective(x)))

    step = 1.0
    for _ in range(config.max_backtracks):
        trial = x + step * delta
        try:
            value = objective(trial)
        except InvalidShapeError as e:
            logger.debug("step %.3g rejected: %s", step, e)
        else:
            trial_norm = float(norm(value))
            if np.isfinite(trial_norm) and trial_norm < (1.0 - config.sufficient_decrease * step) * current:
                return trial, step, value
            logger.debug("step %.3g rejected: ||f|| %.3e >= %.3e", step, trial_norm, current)
        step *= config.shrink

    raise LineSearchError(f"No decrease of ||f|| = {current:.3e} after {config.max_backtracks} backtracks")


def line_search(
    shape: FourierShape,
    delta: np.ndarray,
    c0: float,
    params: PhysicalParams,
    n2: int,
    config: LineSearchConfig,
    f_norm: Optional[float] = None,
    projection: Optional[np.ndarray] = None,
) -> LineSearchStep:
    """Backtracking on the coefficient update; a zero update returns the input with step 1"""
    def objective(coeffs: np.ndarray) -> np.ndarray:
        return residual(FourierShape.from_array(coeffs), c0, params, n2)

    def system_norm(f: np.ndarray) -> float:
        return float(np.linalg.norm(f if projection is None else projection @ f))

    if not np.any(delta):
        return LineSearchStep(shape=shape, step=1.0, residual=objective(shape.array))

    coeffs, step, f = backtrack(shape.array, delta, objective, config, f_norm, norm=system_norm)
    return LineSearchStep(shape=FourierShape.from_array(coeffs), step=step, residual=f)


def _update(
    shape: FourierShape,
    f: np.ndarray,
    jacobian: np.ndarray,
    config: SolverConfig,
    params: PhysicalParams,
    projection: Optional[np.ndarray],
) -> LineSearchStep:
    if projection is None:
        system_matrix, system_rhs = jacobian, f
    else:
        system_matrix, system_rhs = projection @ jacobian, projection @ f

    step_args = dict(rcond=config.lstsq_rcond, family_gap=config.family_gap)
    try:
        delta, _ = newton_step(system_matrix, system_rhs, **step_args)
    except SingularJacobianError as e:
        # expected on an exact circle, where every radius solves the system
        logger.debug("%s; taking the minimum-norm step", e)
        delta, _ = newton_step(system_matrix, system_rhs, allow_rank_deficient=True, **step_args)

    if not np.any(delta):
        raise LineSearchError("Newton update vanished before convergence")

    return line_search(
        shape,
        delta,
        config.c0,
        params,
        config.n2,
        config.line_search,
        f_norm=_system_norm(f, projection),
        projection=projection,
    )


def _system_norm(f: np.ndarray, projection: Optional[np.ndarray]) -> float:
    return float(np.linalg.norm(f if projection is None else projection @ f))


def residual_scale(shape: FourierShape, params: PhysicalParams, n2: int) -> float:
    """max(1, max|M|): the size against which the Newton tolerances are measured"""
    return max(1.0, float(np.max(np.abs(op_m(sample_interface(shape, n2), params)))))


def solve_self_similar(config: SolverConfig, params: PhysicalParams) -> SolveResult:
    """
    Newton iteration at fixed C0, then normalization to delta_0 = 1.

    Converges when max|f| <= newton_tol * max(1, max|M|). An iterate with
    max|f| <= floor_tol * max(1, max|M|) also counts as converged once the
    iteration stalls there (line search fails, or ||f||_2 drops by less than
    floor_ratio); the result is then flagged floor_limited.

    Raises SingularJacobianError or InvalidShapeError when the iteration cannot proceed.
    """
    projection = None
    if config.system == LinearSystem.FOURIER:
        projection = fourier_projection_matrix(config.n1, config.n2)

    shape = config.initial_shape()
    f = residual(shape, config.c0, params, config.n2)
    history: List[float] = []
    norms: List[float] = []
    jacobian: Optional[np.ndarray] = None
    status = SolveStatus.MAX_ITERS
    iterations = 0
    stalled = False
    floor_limited = False

    logger.info(
        "Solving with C0=%g, n1=%d, n2=%d, seed modes %s",
        config.c0, config.n1, config.n2, config.initial_modes,
    )

    while True:
        f_max = float(np.max(np.abs(f)))
        history.append(f_max)
        norms.append(_system_norm(f, projection))
        scale = residual_scale(shape, params, config.n2)
        tolerance = config.newton_tol * scale
        floor = max(config.floor_tol, config.newton_tol) * scale

        if f_max <= tolerance:
            status = SolveStatus.CONVERGED
            break
        if stalled and f_max <= floor:
            status, floor_limited = SolveStatus.CONVERGED, True
            break
        if iterations >= config.max_iters:
            break

        fresh = jacobian is None or iterations % config.jacobian_refresh == 0
        if fresh:
            jacobian = fd_jacobian(shape, config.c0, params, config.n2, config.fd_step, f0=f)

        try:
            try:
                accepted = _update(shape, f, jacobian, config, params, projection)
            except LineSearchError:
                if fresh:
                    raise
                logger.debug("Line search failed with a stale Jacobian, rebuilding")
                jacobian = fd_jacobian(shape, config.c0, params, config.n2, config.fd_step, f0=f)
                accepted = _update(shape, f, jacobian, config, params, projection)
        except LineSearchError as e:
            if f_max <= floor:
                status, floor_limited = SolveStatus.CONVERGED, True
                break
            logger.warning("Line search failed at iteration %d: %s", iterations, e)
            status = SolveStatus.LINE_SEARCH_FAILURE
            break

        shape, f = accepted.shape, accepted.residual
        iterations += 1
        stalled = _system_norm(f, projection) > config.floor_ratio * norms[-1]
        logger.info(
            "iter %3d  max|f| = %.3e  step = %.3g",
            iterations, float(np.max(np.abs(f))), accepted.step,
        )

    if floor_limited:
        logger.info("Residual stalled at max|f| = %.3e above the target %.3e", f_max, tolerance)
    return _finalize(
        shape, status, config, params, iterations, history,
        norms=norms, tolerance=tolerance, floor_limited=floor_limited,
    )


def _finalize(
    shape: FourierShape,
    status: SolveStatus,
    config: SolverConfig,
    params: PhysicalParams,
    iterations: int,
    history: List[float],
    norms: List[float],
    tolerance: float,
    floor_limited: bool,
) -> SolveResult:
    result = dict(
        status=status,
        c0=config.c0,
        iterations=iterations,
        residual_history=history,
        residual_norms=norms,
        final_residual=history[-1],
        tolerance=tolerance,
        floor_limited=floor_limited,
    )

    if status != SolveStatus.CONVERGED:
        logger.warning("Solve stopped with status %s after %d iterations", status.value, iterations)
        si = sample_interface(shape, config.n2)
        return SolveResult(
            shape=shape,
            shape_factor=shape_factor(si),
            dominant_fold=dominant_fold(shape, config.circle_threshold),
            **result,
        )

    # (beta x, C / beta^3) is an eigenpair whenever (x, C) is
    beta = 1.0 / shape.coeffs[0]
    normalized = rescale(shape, beta)
    si = sample_interface(normalized, config.n2)
    factor = shape_factor(si)
    result.update(shape=normalized, scale=beta, shape_factor=factor)

    if factor < config.circle_threshold:
        logger.info("Converged to a circle (delta/R = %.3e)", factor)
        result["status"] = SolveStatus.TRIVIAL_CIRCLE
        return SolveResult(dominant_fold=0, **result)

    try:
        estimate = flux_constant(si, params)
    except DegenerateEigenvectorError as e:
        logger.info("Converged to a circle: %s", e)
        result["status"] = SolveStatus.TRIVIAL_CIRCLE
        return SolveResult(dominant_fold=0, **result)

    c_scaled = config.c0 / beta ** 3
    agreement = max(10.0 * estimate.spread, 1e-8) * abs(estimate.c)
    consistent = abs(c_scaled - estimate.c) <= agreement
    if not consistent:
        logger.warning(
            "Normalized flux constant %.10g disagrees with C0/beta^3 = %.10g (spread %.3e)",
            estimate.c, c_scaled, estimate.spread,
        )

    logger.info(
        "Converged in %d iterations: C = %.10g, delta/R = %.8f, fold %d",
        iterations, estimate.c, factor, dominant_fold(normalized, config.circle_threshold),
    )
    return SolveResult(
        c_converged=estimate.c,
        c_scaled=c_scaled,
        c_spread=estimate.spread,
        normalization_consistent=consistent,
        dominant_fold=dominant_fold(normalized, config.circle_threshold),
        **result,
    )

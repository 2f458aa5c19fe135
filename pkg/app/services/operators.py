"""
Operators Service
The nonlinear integral operators M and G, the residual M + C G, and C itself
"""
from typing import NamedTuple

import numpy as np
import numpy.typing as npt

from app.exceptions import DegenerateEigenvectorError, InvalidShapeError
from app.models.params import PhysicalParams
from app.models.shape import FourierShape, SampledInterface
from app.services.geometry import effective_radius, enclosed_area, sample_interface
from app.services.quadrature import adjoint_dlp_matrix, hypersingular_field

# values aligned with SampledInterface nodes
NodalField = npt.NDArray[np.float64]

# relative size of |G| below which the pointwise ratio -M/G is not sampled
RATIO_FLOOR = 1e-3
# rms(G) * K_eff / R_eff below this means G vanishes (a circle)
DEGENERATE_FLOOR = 1e-10


class FluxEstimate(NamedTuple):
    c: float
    spread: float


def op_m(si: SampledInterface, params: PhysicalParams) -> NodalField:
    """M[x](alpha_i): hypersingular integral of the capillary pressure tau * kappa"""
    return hypersingular_field(params.tau * si.kappa, si)


def op_g(si: SampledInterface, params: PhysicalParams) -> NodalField:
    """
    G[x](alpha_i) in the (K_eff, A) form:

        (1/K_eff) [ w_i + 2A int w' dG/dn(x_i) ds' + 2A (A~/pi) H[ln|x'|]_i ]

    with w = (1 - A~/(pi |x|^2)) x.n and A~ the enclosed area.
    """
    rho2 = si.x ** 2 + si.y ** 2
    if np.any(rho2 == 0.0):
        raise InvalidShapeError("Interface passes through the origin")

    area_over_pi = enclosed_area(si) / np.pi
    w = (1.0 - area_over_pi / rho2) * (si.x * si.normal[0] + si.y * si.normal[1])

    field = w.copy()
    if params.atwood != 0.0:
        two_a = 2.0 * params.atwood
        field += two_a * (adjoint_dlp_matrix(si) @ (w * si.weights))
        field += two_a * area_over_pi * hypersingular_field(0.5 * np.log(rho2), si)
    return field / params.k_eff


def residual(shape: FourierShape, c0: float, params: PhysicalParams, n2: int) -> NodalField:
    """f(alpha_i) = M + C0 G at the nodes of the sampled shape"""
    si = sample_interface(shape, n2)
    return op_m(si, params) + c0 * op_g(si, params)


def flux_constant(si: SampledInterface, params: PhysicalParams) -> FluxEstimate:
    """
    Least-squares C = -<M, G> / <G, G> with the arclength inner product.

    spread is the weighted standard deviation of the pointwise ratio -M/G
    (nodes where |G| is not small), relative to |C|.
    """
    m_field = op_m(si, params)
    g_field = op_g(si, params)
    weights = si.weights

    gg = float(np.sum(weights * g_field ** 2))
    rms_g = np.sqrt(gg / np.sum(weights))
    r_eff = effective_radius(enclosed_area(si))
    if rms_g * params.k_eff / r_eff < DEGENERATE_FLOOR:
        raise DegenerateEigenvectorError("G vanishes on this shape; C is arbitrary for circles")

    c = -float(np.sum(weights * m_field * g_field)) / gg

    sampled = np.abs(g_field) > RATIO_FLOOR * np.max(np.abs(g_field))
    ratio = -m_field[sampled] / g_field[sampled]
    w = weights[sampled]
    mean = np.sum(w * ratio) / np.sum(w)
    spread = float(np.sqrt(np.sum(w * (ratio - mean) ** 2) / np.sum(w)) / abs(c)) if c != 0 else np.inf
    return FluxEstimate(c=c, spread=spread)


def linearized_flux_constant(
    k: int,
    params: PhysicalParams,
    eps: float = 1e-4,
    n2: int = 256,
) -> float:
    """Flux constant of the operators on r = 1 + eps cos(k alpha), for a small eps"""
    if k < 1:
        raise ValueError(f"mode must be at least 1, got {k}")
    shape = FourierShape.from_modes(k + 1, {k: eps})
    return flux_constant(sample_interface(shape, max(n2, 2 * (k + 1))), params).c

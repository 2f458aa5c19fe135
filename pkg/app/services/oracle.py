"""
Oracle Service
Closed-form identities and a brute-force reference for the layer potentials and operators
"""
import math
from typing import List, Optional, Sequence, Tuple

import numpy as np

from app.exceptions import ConfigurationError
from app.models.params import PhysicalParams
from app.models.shape import FourierShape
from app.models.validation import ValidationReport
from app.services.geometry import sample_interface
from app.services.operators import op_g, op_m
from app.services.quadrature import gauss_integral, hypersingular_field, single_layer_field

CIRCLE_RADII = (0.5, 1.0, 2.0)
CIRCLE_TOLERANCE = 1e-10
EIGENRELATION_TOLERANCE = 1e-8
SCALING_TOLERANCE = 1e-10
EQUIVALENCE_TOLERANCE = 1e-6
# a shape well outside the linear regime, delta/R about 0.15
NONLINEAR_MODES = {2: 0.05, 3: 0.08, 4: -0.04}


def circle(radius: float, n1: int = 2) -> FourierShape:
    return FourierShape.from_modes(n1, {0: radius})


def random_shape(
    seed: int = 0,
    modes: Sequence[int] = (2, 3),
    amplitude: float = 0.015,
) -> FourierShape:
    """Unit circle plus uniform random amplitudes in [-amplitude, amplitude] on the given modes"""
    rng = np.random.default_rng(seed)
    values = rng.uniform(-amplitude, amplitude, size=len(modes))
    return FourierShape.from_modes(max(modes) + 1, dict(zip(modes, values)))


def nonlinear_shape() -> FourierShape:
    return FourierShape.from_modes(max(NONLINEAR_MODES) + 1, NONLINEAR_MODES)


def circle_identity_suite(n2: int) -> List[ValidationReport]:
    """kappa = 1/R, S[1] = R ln R, Gauss integral 1/2, M = 0 and G = 0 on circles"""
    if n2 % 2 != 0 or n2 < 16:
        raise ConfigurationError(f"circle suite needs an even n2 >= 16, got {n2}")

    params = PhysicalParams()
    reports = []
    for radius in CIRCLE_RADII:
        si = sample_interface(circle(radius), n2)
        checks = {
            "curvature": np.max(np.abs(si.kappa - 1.0 / radius)),
            "single_layer": np.max(np.abs(single_layer_field(np.ones(n2), si) - radius * math.log(radius))),
            "gauss_integral": np.max(np.abs(np.abs(gauss_integral(si)) - 0.5)),
            "m_vanishes": np.max(np.abs(op_m(si, params))),
            "g_vanishes": np.max(np.abs(op_g(si, params))),
        }
        for name, error in checks.items():
            reports.append(ValidationReport.build(f"circle_R{radius:g}_{name}", error, CIRCLE_TOLERANCE, n2))
    return reports


def layer_eigenrelation_check(kmax: int, n2: int) -> List[ValidationReport]:
    """S[cos k t] = -cos(k t)/(2k) and H[cos k t] = (k/2) cos(k t) on the unit circle"""
    if kmax < 1 or 4 * kmax >= n2:
        raise ConfigurationError(f"eigenrelations need 1 <= kmax < n2/4, got kmax={kmax}, n2={n2}")

    si = sample_interface(circle(1.0), n2)
    reports = []
    for k in range(1, kmax + 1):
        density = np.cos(k * si.alpha)
        single = single_layer_field(density, si) + density / (2.0 * k)
        hyper = hypersingular_field(density, si) - 0.5 * k * density
        reports.append(ValidationReport.build(f"single_layer_k{k}", np.max(np.abs(single)), EIGENRELATION_TOLERANCE, n2))
        reports.append(ValidationReport.build(f"hypersingular_k{k}", np.max(np.abs(hyper)), EIGENRELATION_TOLERANCE, n2))
    return reports


def _relative(field: np.ndarray, reference: np.ndarray) -> float:
    # relative to max(|reference|, 1), so vanishing fields compare absolutely
    return float(np.max(np.abs(field - reference)) / max(float(np.max(np.abs(reference))), 1.0))


def scaling_identity_check(
    shape: FourierShape,
    beta: float,
    params: PhysicalParams,
    n2: int,
) -> List[ValidationReport]:
    """M[beta x] beta^2 = M[x] and G[beta x] / beta = G[x]"""
    if beta <= 0:
        raise ConfigurationError(f"beta must be positive, got {beta}")

    si = sample_interface(shape, n2)
    scaled = sample_interface(FourierShape.from_array(beta * shape.array), n2)
    m_error = _relative(op_m(scaled, params) * beta ** 2, op_m(si, params))
    g_error = _relative(op_g(scaled, params) / beta, op_g(si, params))
    return [
        ValidationReport.build(f"scaling_M_beta{beta:g}", m_error, SCALING_TOLERANCE, n2),
        ValidationReport.build(f"scaling_G_beta{beta:g}", g_error, SCALING_TOLERANCE, n2),
    ]


def brute_force_operators(
    shape: FourierShape,
    params: PhysicalParams,
    n2: int,
) -> Tuple[List[float], List[float]]:
    """
    M and G from term-by-term derivatives of the cosine series and plain loops.

    Nothing here goes through the FFT or the vectorized kernels.
    """
    coeffs = list(shape.coeffs)
    d_alpha = 2.0 * math.pi / n2
    alphas = [i * d_alpha for i in range(n2)]

    r, r1, r2, r3 = [], [], [], []
    for a in alphas:
        terms = [(k, c * math.cos(k * a), c * math.sin(k * a)) for k, c in enumerate(coeffs)]
        r.append(sum(cos_term for _, cos_term, _ in terms))
        r1.append(-sum(k * sin_term for k, _, sin_term in terms))
        r2.append(-sum(k ** 2 * cos_term for k, cos_term, _ in terms))
        r3.append(sum(k ** 3 * sin_term for k, _, sin_term in terms))

    x, y, nx, ny, s, kappa, dkappa, dlog_r = ([] for _ in range(8))
    for i, a in enumerate(alphas):
        x.append(r[i] * math.cos(a))
        y.append(r[i] * math.sin(a))
        xa = r1[i] * math.cos(a) - r[i] * math.sin(a)
        ya = r1[i] * math.sin(a) + r[i] * math.cos(a)
        q = r[i] ** 2 + r1[i] ** 2
        p = r[i] ** 2 + 2.0 * r1[i] ** 2 - r[i] * r2[i]
        dq = 2.0 * r[i] * r1[i] + 2.0 * r1[i] * r2[i]
        dp = 2.0 * r[i] * r1[i] + 3.0 * r1[i] * r2[i] - r[i] * r3[i]
        s.append(math.sqrt(q))
        nx.append(ya / s[i])
        ny.append(-xa / s[i])
        kappa.append(p / q ** 1.5)
        dkappa.append(dp / q ** 1.5 - 1.5 * p * dq / q ** 2.5)
        dlog_r.append(r1[i] / r[i])

    area_over_pi = coeffs[0] ** 2 + 0.5 * sum(c ** 2 for c in coeffs[1:])

    def hyper(derivative: List[float], i: int) -> float:
        total = 0.0
        for j in range(n2):
            if (j - i) % 2 == 1:
                dx, dy = x[i] - x[j], y[i] - y[j]
                total += derivative[j] * (dy * nx[i] - dx * ny[i]) / (dx * dx + dy * dy)
        return total * d_alpha / math.pi

    # x.n = r^2 / s_alpha
    w = [(1.0 - area_over_pi / r[j] ** 2) * r[j] ** 2 / s[j] for j in range(n2)]

    m_values, g_values = [], []
    for i in range(n2):
        m_values.append(params.tau * hyper(dkappa, i))

        adjoint = kappa[i] / (4.0 * math.pi) * w[i] * s[i] * d_alpha
        for j in range(n2):
            if j != i:
                dx, dy = x[i] - x[j], y[i] - y[j]
                adjoint += (nx[i] * dx + ny[i] * dy) / (2.0 * math.pi * (dx * dx + dy * dy)) * w[j] * s[j] * d_alpha

        total = w[i] + 2.0 * params.atwood * adjoint + 2.0 * params.atwood * area_over_pi * hyper(dlog_r, i)
        g_values.append(total / params.k_eff)

    return m_values, g_values


def oracle_equivalence_check(
    shape: FourierShape,
    params: PhysicalParams,
    n2: int = 32,
    reference_n2: int = 512,
    label: str = "oracle",
) -> List[ValidationReport]:
    """Operators at n2 nodes against the brute-force reference at reference_n2 nodes"""
    if reference_n2 % n2 != 0:
        raise ConfigurationError(f"reference_n2 ({reference_n2}) must be a multiple of n2 ({n2})")

    si = sample_interface(shape, n2)
    m_ref, g_ref = brute_force_operators(shape, params, reference_n2)
    stride = reference_n2 // n2
    m_ref = np.asarray(m_ref)[::stride]
    g_ref = np.asarray(g_ref)[::stride]

    def relative(field: np.ndarray, reference: np.ndarray) -> float:
        return float(np.max(np.abs(field - reference)) / np.max(np.abs(reference)))

    return [
        ValidationReport.build(f"{label}_M", relative(op_m(si, params), m_ref), EQUIVALENCE_TOLERANCE, n2),
        ValidationReport.build(f"{label}_G", relative(op_g(si, params), g_ref), EQUIVALENCE_TOLERANCE, n2),
    ]


def run_all(
    n2: int = 256,
    kmax: int = 8,
    params: Optional[PhysicalParams] = None,
) -> List[ValidationReport]:
    """Every suite, as run by the validate experiment"""
    params = params or PhysicalParams()
    reports = circle_identity_suite(n2)
    reports += layer_eigenrelation_check(kmax, n2)
    five_mode = random_shape(seed=5, modes=(2, 3, 4, 5, 6), amplitude=0.02)
    for beta in (0.5, 1.7):
        reports += scaling_identity_check(five_mode, beta, params, n2)
    reports += oracle_equivalence_check(random_shape(seed=0), params)
    reports += oracle_equivalence_check(nonlinear_shape(), params, n2=128, label="oracle_nonlinear")
    return reports

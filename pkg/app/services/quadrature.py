"""
Quadrature Service
Laplace kernels on the interface and singular boundary integrals
"""
from typing import Optional, Sequence

import numpy as np

from app.exceptions import ConfigurationError, SingularEvaluationError
from app.models.shape import SampledInterface
from app.services.geometry import spectral_derivative

TWO_PI = 2.0 * np.pi

SPECTRAL = "spectral"
ALTERNATING = "alternating"


def green(x: Sequence[float], xp: Sequence[float]) -> float:
    """Free-space Green's function G(x - x') = ln|x - x'| / (2 pi)"""
    distance = float(np.hypot(x[0] - xp[0], x[1] - xp[1]))
    if distance == 0.0:
        raise SingularEvaluationError("Green's function evaluated at coincident points")
    return np.log(distance) / TWO_PI


def _targets(si: SampledInterface, targets: Optional[Sequence[int]]) -> np.ndarray:
    if targets is None:
        return np.arange(si.n2)
    return np.atleast_1d(np.asarray(targets, dtype=int))


def _separation(si: SampledInterface):
    dx = si.x[:, None] - si.x[None, :]
    dy = si.y[:, None] - si.y[None, :]
    r2 = dx ** 2 + dy ** 2
    np.fill_diagonal(r2, 1.0)
    return dx, dy, r2


def adjoint_dlp_matrix(si: SampledInterface) -> np.ndarray:
    """K[i, j] = dG(x_i - x_j)/dn(x_i); diagonal is the smooth limit kappa_i / (4 pi)"""
    dx, dy, r2 = _separation(si)
    kernel = (si.normal[0][:, None] * dx + si.normal[1][:, None] * dy) / (TWO_PI * r2)
    np.fill_diagonal(kernel, si.kappa / (2.0 * TWO_PI))
    return kernel


def adjoint_dlp_kernel(si: SampledInterface, i: int, j: int) -> float:
    if i == j:
        return float(si.kappa[i] / (2.0 * TWO_PI))
    dx = si.x[i] - si.x[j]
    dy = si.y[i] - si.y[j]
    return float((si.normal[0, i] * dx + si.normal[1, i] * dy) / (TWO_PI * (dx ** 2 + dy ** 2)))


def double_layer_matrix(si: SampledInterface) -> np.ndarray:
    """K[i, j] = dG(x_i - x_j)/dn(x_j); diagonal kappa_j / (4 pi)"""
    dx, dy, r2 = _separation(si)
    kernel = -(si.normal[0][None, :] * dx + si.normal[1][None, :] * dy) / (TWO_PI * r2)
    np.fill_diagonal(kernel, si.kappa / (2.0 * TWO_PI))
    return kernel


def gauss_integral(si: SampledInterface) -> np.ndarray:
    """Double layer of unit density at every node; 1/2 on a smooth closed curve"""
    return double_layer_matrix(si) @ si.weights


def alt_trapezoid(values: Sequence[float], i: int, delta_alpha: float) -> float:
    """Alternate-point rule: 2 * delta_alpha * sum of values at nodes j with j - i odd"""
    values = np.asarray(values, dtype=float)
    n = values.shape[-1]
    if n % 2 != 0:
        raise ConfigurationError(f"Alternate-point rule needs an even node count, got {n}")
    odd = (np.arange(n) - i) % 2 == 1
    return 2.0 * delta_alpha * float(np.sum(values[odd]))


def _odd_partners(n2: int, targets: np.ndarray) -> np.ndarray:
    """Node indices j with j - i odd, one row per target i"""
    if n2 % 2 != 0:
        raise ConfigurationError(f"Alternate-point rule needs an even node count, got {n2}")
    offsets = np.arange(1, n2, 2)
    return (targets[:, None] + offsets[None, :]) % n2


def hypersingular_field(
    density: Sequence[float],
    si: SampledInterface,
    targets: Optional[Sequence[int]] = None,
) -> np.ndarray:
    """
    Integral of density * d2G/dn dn' reduced to a tangential derivative:

        (1/2pi) int dphi/ds(x') (x - x')^perp . n(x) / |x - x'|^2 ds(x'),  x^perp = (y, -x)

    dphi/ds * ds = dphi/dalpha * dalpha, so s_alpha cancels. The Cauchy-type
    kernel is summed with the alternate-point rule.
    """
    t = _targets(si, targets)
    dphi = spectral_derivative(np.asarray(density, dtype=float), 1)
    partners = _odd_partners(si.n2, t)

    dx = si.x[t][:, None] - si.x[partners]
    dy = si.y[t][:, None] - si.y[partners]
    kernel = (dy * si.normal[0][t][:, None] - dx * si.normal[1][t][:, None]) / (dx ** 2 + dy ** 2)

    return (2.0 * si.delta_alpha / TWO_PI) * np.sum(kernel * dphi[partners], axis=1)


def hypersingular(density: Sequence[float], si: SampledInterface, i: int) -> float:
    """hypersingular_field at one node, written as alt_trapezoid over the reduced integrand"""
    dphi = spectral_derivative(np.asarray(density, dtype=float), 1)
    dx = si.x[i] - si.x
    dy = si.y[i] - si.y
    r2 = dx ** 2 + dy ** 2
    r2[i] = 1.0  # j = i is an even offset, never sampled
    integrand = dphi * (dy * si.normal[0][i] - dx * si.normal[1][i]) / r2
    return alt_trapezoid(integrand, i, si.delta_alpha) / TWO_PI


def _log_weights(n2: int) -> np.ndarray:
    """Fourier multipliers of g -> int g(a') ln|2 sin((a - a')/2)| da'"""
    modes = np.abs(np.fft.fftfreq(n2, d=1.0 / n2))
    weights = np.zeros(n2)
    weights[1:] = -np.pi / modes[1:]
    return weights


def single_layer_field(
    density: Sequence[float],
    si: SampledInterface,
    method: str = SPECTRAL,
) -> np.ndarray:
    """Single-layer potential int density(x') G(x_i - x') ds(x') at every node"""
    g = np.asarray(density, dtype=float) * si.s_alpha

    if method == ALTERNATING:
        t = np.arange(si.n2)
        partners = _odd_partners(si.n2, t)
        dist = np.hypot(si.x[t][:, None] - si.x[partners], si.y[t][:, None] - si.y[partners])
        return (2.0 * si.delta_alpha / TWO_PI) * np.sum(np.log(dist) * g[partners], axis=1)

    if method != SPECTRAL:
        raise ConfigurationError(f"Unknown single-layer method '{method}'")

    # ln|x - x'| = ln|2 sin((a - a')/2)| + smooth remainder
    log_part = np.real(np.fft.ifft(_log_weights(si.n2) * np.fft.fft(g)))

    dx, dy, r2 = _separation(si)
    chord = np.abs(2.0 * np.sin(0.5 * (si.alpha[:, None] - si.alpha[None, :])))
    np.fill_diagonal(chord, 1.0)
    remainder = 0.5 * np.log(r2) - np.log(chord)
    np.fill_diagonal(remainder, np.log(si.s_alpha))
    smooth_part = si.delta_alpha * (remainder @ g)

    return (log_part + smooth_part) / TWO_PI


def single_layer(
    density: Sequence[float],
    si: SampledInterface,
    i: int,
    method: str = SPECTRAL,
) -> float:
    return float(single_layer_field(density, si, method)[i])

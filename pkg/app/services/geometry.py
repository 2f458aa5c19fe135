"""
Geometry Service
Cosine-series interface, spectral differentiation and shape diagnostics
"""
from typing import List, Tuple

import numpy as np

from app.exceptions import ConfigurationError, InvalidShapeError
from app.models.shape import FourierShape, SampledInterface


def radius_eval(shape: FourierShape, alpha):
    """r(alpha) = sum_k delta_k cos(k alpha); scalar or array alpha"""
    alpha = np.asarray(alpha, dtype=float)
    modes = np.arange(shape.n1)
    values = np.cos(np.multiply.outer(alpha, modes)) @ shape.array
    return float(values) if values.ndim == 0 else values


def spectral_derivative(values: np.ndarray, order: int = 1) -> np.ndarray:
    """Derivative of periodic nodal values on [0, 2pi) via the FFT"""
    values = np.asarray(values, dtype=float)
    n = values.shape[-1]
    ik = 1j * np.fft.fftfreq(n, d=1.0 / n)
    if n % 2 == 0 and order % 2 == 1:
        # the Nyquist mode has no odd derivative on a real grid
        ik[n // 2] = 0.0
    return np.real(np.fft.ifft(ik ** order * np.fft.fft(values)))


def node_angles(n2: int) -> np.ndarray:
    return 2.0 * np.pi * np.arange(n2) / n2


def sample_interface(shape: FourierShape, n2: int) -> SampledInterface:
    """Positions, unit tangent/outward normal, s_alpha and curvature at n2 nodes"""
    if n2 % 2 != 0:
        raise ConfigurationError(f"n2 must be even, got {n2}")
    if n2 < 2 * shape.n1:
        raise ConfigurationError(f"n2 ({n2}) must be at least 2*n1 ({2 * shape.n1})")

    alpha = node_angles(n2)
    r = radius_eval(shape, alpha)
    bad = np.flatnonzero(r <= 0.0)
    if bad.size:
        raise InvalidShapeError(
            f"Nonpositive radius at {bad.size} node(s), first at alpha={alpha[bad[0]]:.6g}"
        )

    r_a = spectral_derivative(r, 1)
    r_aa = spectral_derivative(r, 2)
    cos_a, sin_a = np.cos(alpha), np.sin(alpha)

    x, y = r * cos_a, r * sin_a
    x_a = r_a * cos_a - r * sin_a
    y_a = r_a * sin_a + r * cos_a
    x_aa = (r_aa - r) * cos_a - 2.0 * r_a * sin_a
    y_aa = (r_aa - r) * sin_a + 2.0 * r_a * cos_a

    s_alpha = np.hypot(x_a, y_a)
    kappa = (x_a * y_aa - y_a * x_aa) / s_alpha ** 3
    tangent = np.vstack([x_a, y_a]) / s_alpha
    # counterclockwise curve: outward normal is the tangent rotated by -pi/2
    normal = np.vstack([tangent[1], -tangent[0]])

    return SampledInterface(
        n2=n2,
        alpha=alpha,
        x=x,
        y=y,
        tangent=tangent,
        normal=normal,
        s_alpha=s_alpha,
        kappa=kappa,
    )


def enclosed_area(si: SampledInterface) -> float:
    x_a = si.tangent[0] * si.s_alpha
    y_a = si.tangent[1] * si.s_alpha
    return 0.5 * si.delta_alpha * float(np.sum(si.x * y_a - si.y * x_a))


def arclength(si: SampledInterface) -> float:
    return float(np.sum(si.weights))


def effective_radius(area: float) -> float:
    """Radius of the circle with the same enclosed area"""
    if area <= 0:
        raise InvalidShapeError(f"Enclosed area must be positive, got {area}")
    return float(np.sqrt(area / np.pi))


def shape_factor(si: SampledInterface) -> float:
    """delta/R = max_i | |x_i| / R_eff - 1 |"""
    r_eff = effective_radius(enclosed_area(si))
    return float(np.max(np.abs(si.radius / r_eff - 1.0)))


def spectrum(shape: FourierShape) -> List[Tuple[int, float]]:
    return [(k, abs(c)) for k, c in enumerate(shape.coeffs)]


def dominant_fold(shape: FourierShape, threshold: float = 1e-8) -> int:
    """Mode k >= 1 with the largest |delta_k|, or 0 for a circle"""
    if threshold <= 0:
        raise ValueError("threshold must be positive")
    magnitudes = np.abs(shape.array[1:])
    if magnitudes.size == 0 or magnitudes.max() < threshold:
        return 0
    return int(np.argmax(magnitudes)) + 1


def rescale(shape: FourierShape, beta: float) -> FourierShape:
    if beta <= 0:
        raise ValueError(f"beta must be positive, got {beta}")
    return FourierShape.from_array(beta * shape.array)


def fourier_coefficients(values: np.ndarray, n1: int) -> np.ndarray:
    """Cosine coefficients c_k of an even nodal field, k < n1"""
    values = np.asarray(values, dtype=float)
    n2 = values.shape[-1]
    if n1 > n2 // 2:
        raise ConfigurationError("n1 cosine modes need n2 >= 2*n1 nodes")
    coeffs = np.real(np.fft.rfft(values))[:n1] * (2.0 / n2)
    coeffs[0] *= 0.5
    return coeffs


def fourier_projection_matrix(n1: int, n2: int) -> np.ndarray:
    """Rows map nodal values to the first n1 cosine coefficients (same as fourier_coefficients)"""
    alpha = node_angles(n2)
    projection = np.cos(np.outer(np.arange(n1), alpha)) * (2.0 / n2)
    projection[0] *= 0.5
    return projection

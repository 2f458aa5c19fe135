import numpy as np
import pytest
from hypothesis import given, strategies as st

from app.exceptions import DegenerateEigenvectorError
from app.models.params import PhysicalParams
from app.models.shape import FourierShape
from app.services.geometry import sample_interface
from app.services.linear_theory import two_phase_flux_constant
from app.services.operators import flux_constant, linearized_flux_constant, op_g, op_m, residual
from app.services.oracle import random_shape


@pytest.mark.parametrize("radius", [0.5, 1.0, 2.0])
@pytest.mark.parametrize("c0", [0.0, 24.0, 50.0])
def test_circles_are_solutions_for_every_c0(params, radius, c0):
    shape = FourierShape(coeffs=[radius, 0.0])
    si = sample_interface(shape, 256)

    assert np.max(np.abs(op_m(si, params))) <= 1e-10
    assert np.max(np.abs(op_g(si, params))) <= 1e-10
    assert np.max(np.abs(residual(shape, c0, params, 256))) <= 1e-10


def test_residual_is_affine_in_c0(params, wavy_shape):
    si = sample_interface(wavy_shape, 64)
    expected = op_m(si, params) + 17.5 * op_g(si, params)

    np.testing.assert_allclose(residual(wavy_shape, 17.5, params, 64), expected, rtol=1e-13, atol=1e-13)


@pytest.mark.parametrize("atwood", [-1.0, -0.5])
def test_operators_are_even_nodal_fields(atwood):
    params = PhysicalParams(tau=1.0, k_eff=2.0, atwood=atwood)
    si = sample_interface(random_shape(seed=3, modes=(2, 3, 4, 5), amplitude=0.05), 128)

    for field in (op_m(si, params), op_g(si, params)):
        # node i mirrors node n2 - i across alpha -> 2 pi - alpha
        assert np.max(np.abs(field[1:] - field[:0:-1])) <= 1e-10 * np.max(np.abs(field))


def test_m_of_a_small_mode_four_perturbation(params):
    si = sample_interface(FourierShape.from_modes(5, {4: 1e-3}), 256)
    m = op_m(si, params)

    # eps k (k^2 - 1) / 2 cos(k alpha) with eps = 1e-3, k = 4
    assert np.max(np.abs(m)) == pytest.approx(0.030, rel=0.02)
    np.testing.assert_allclose(m, 0.030 * np.cos(4 * si.alpha), atol=0.02 * 0.030)


@pytest.mark.parametrize("seed", [0, 1, 2])
@pytest.mark.parametrize("beta", [0.5, 1.7])
def test_operator_homogeneity(params, seed, beta):
    shape = random_shape(seed=seed, modes=(2, 3, 4, 5, 6), amplitude=0.02)
    si = sample_interface(shape, 128)
    scaled = sample_interface(FourierShape.from_array(beta * shape.array), 128)

    m, g = op_m(si, params), op_g(si, params)
    assert np.max(np.abs(op_m(scaled, params) * beta ** 2 - m)) <= 1e-10 * np.max(np.abs(m))
    assert np.max(np.abs(op_g(scaled, params) / beta - g)) <= 1e-10 * np.max(np.abs(g))


def test_g_without_contrast_is_the_local_term(wavy_shape):
    si = sample_interface(wavy_shape, 64)
    no_contrast = PhysicalParams(tau=1.0, k_eff=4.0, atwood=0.0)

    # w = (1 - A/(pi |x|^2)) x.n, divided by K_eff
    area_over_pi = 1.0 + 0.5 * (0.02 ** 2 + 0.05 ** 2 + 0.01 ** 2)
    rho2 = si.x ** 2 + si.y ** 2
    w = (1.0 - area_over_pi / rho2) * (si.x * si.normal[0] + si.y * si.normal[1])
    np.testing.assert_allclose(op_g(si, no_contrast), w / 4.0, rtol=1e-12, atol=1e-14)


def test_m_scales_with_surface_tension(wavy_shape):
    si = sample_interface(wavy_shape, 64)

    np.testing.assert_allclose(
        op_m(si, PhysicalParams(tau=3.0)),
        3.0 * op_m(si, PhysicalParams(tau=1.0)),
        rtol=1e-12,
        atol=1e-14,
    )


@pytest.mark.parametrize("k", [3, 4, 5, 6, 7])
def test_small_amplitude_flux_constant_matches_linear_theory(params, k):
    assert linearized_flux_constant(k, params) == pytest.approx(two_phase_flux_constant(k, params), rel=1e-6)


def test_linearized_flux_constants_for_default_params(params):
    assert linearized_flux_constant(3, params) == pytest.approx(24.0, rel=1e-6)
    assert linearized_flux_constant(4, params) == pytest.approx(30.0, rel=1e-6)


@given(
    st.sampled_from([3, 5, 7]),
    st.floats(min_value=-0.25, max_value=0.2),
    st.floats(min_value=0.5, max_value=3.0),
)
def test_small_amplitude_flux_constant_for_two_phase_params(k, atwood, k_eff):
    params = PhysicalParams(tau=2.0, k_eff=k_eff, atwood=atwood)

    assert linearized_flux_constant(k, params) == pytest.approx(two_phase_flux_constant(k, params), rel=1e-5)


def test_flux_constant_of_a_circle_is_degenerate(params):
    with pytest.raises(DegenerateEigenvectorError):
        flux_constant(sample_interface(FourierShape(coeffs=[1.5, 0.0]), 64), params)


def test_flux_constant_of_linear_eigenfunction_is_nearly_uniform(params):
    si = sample_interface(FourierShape.from_modes(4, {3: 1e-6}), 96)
    estimate = flux_constant(si, params)

    assert estimate.c == pytest.approx(24.0, rel=1e-6)
    assert 0.0 <= estimate.spread < 0.05


def test_flux_constant_is_invariant_under_rescaling(params, wavy_shape):
    # (beta x, C / beta^3) solves whenever (x, C) does
    base = flux_constant(sample_interface(wavy_shape, 64), params).c
    scaled = flux_constant(sample_interface(FourierShape.from_array(2.0 * wavy_shape.array), 64), params).c

    assert scaled == pytest.approx(base / 8.0, rel=1e-10)


def test_params_from_mobilities():
    params = PhysicalParams.from_mobilities(tau=1.0, k1=3.0, k2=1.0)

    assert params.k_eff == pytest.approx(1.5)
    assert params.atwood == pytest.approx(-0.5)
    assert params.k1 == pytest.approx(3.0)
    assert params.k2 == pytest.approx(1.0)
    with pytest.raises(ValueError):
        PhysicalParams.from_mobilities(tau=1.0, k1=0.0, k2=1.0)


def test_one_phase_params_match_defaults(params):
    one_phase = PhysicalParams.one_phase()

    assert one_phase == params
    assert one_phase.is_one_phase
    assert one_phase.k1 == float("inf")
    assert one_phase.k2 == pytest.approx(1.0)

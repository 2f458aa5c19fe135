import pytest
from hypothesis import given, strategies as st
from pydantic import ValidationError

from app.exceptions import DomainError
from app.models.params import PhysicalParams
from app.services.linear_theory import (
    LinearMode,
    critical_flux,
    deviation_slope,
    fit_flux_exponent,
    fitted_flux_constant,
    linear_flux_constant,
    linear_table,
    scale_evolution,
    shape_factor_growth_rate,
    two_phase_flux_constant,
)


@pytest.mark.parametrize("k, expected", [(3, 24.0), (4, 30.0), (5, 40.0), (6, 52.5)])
def test_linear_flux_constant(k, expected):
    assert linear_flux_constant(k) == pytest.approx(expected)


def test_fitted_flux_constant():
    assert fitted_flux_constant(4) == pytest.approx(27.41, abs=0.01)
    assert fitted_flux_constant(6) == pytest.approx(46.91, abs=0.01)


@pytest.mark.parametrize("k", range(4, 13))
def test_fitted_curve_lies_below_linear_curve(k):
    assert fitted_flux_constant(k) < linear_flux_constant(k)


def test_flux_constants_outside_their_domain():
    for k in (0, 1, 2):
        with pytest.raises(DomainError):
            linear_flux_constant(k)
    with pytest.raises(DomainError):
        fitted_flux_constant(3)
    with pytest.raises(DomainError):
        two_phase_flux_constant(1, PhysicalParams())


def test_two_phase_reduces_to_linear_for_default_params(params):
    for k in range(3, 10):
        assert two_phase_flux_constant(k, params) == pytest.approx(linear_flux_constant(k), rel=1e-14)


def test_two_phase_pole():
    with pytest.raises(DomainError):
        two_phase_flux_constant(2, PhysicalParams(atwood=-1.0))
    with pytest.raises(DomainError):
        two_phase_flux_constant(4, PhysicalParams(atwood=-0.5))


def test_two_phase_scales_with_tau_and_mobility():
    base = two_phase_flux_constant(5, PhysicalParams(tau=1.0, k_eff=2.0, atwood=-0.5))

    assert two_phase_flux_constant(5, PhysicalParams(tau=3.0, k_eff=1.0, atwood=-0.5)) == pytest.approx(1.5 * base)


def test_growth_rate():
    mode = LinearMode(k=4, J=1.0, R=2.0)

    assert shape_factor_growth_rate(mode, 1.0) == pytest.approx(0.25)
    assert shape_factor_growth_rate(mode, 2.0) == pytest.approx(0.0)
    # the elliptical mode never changes its shape factor
    assert shape_factor_growth_rate(LinearMode(k=2, J=5.0, R=1.0), 0.3) == 0.0


def test_critical_flux_is_neutral():
    J = critical_flux(3, 2.0, 24.0)

    assert J == pytest.approx(12.0)
    assert shape_factor_growth_rate(LinearMode(k=3, J=J, R=2.0), 24.0) == pytest.approx(0.0)
    with pytest.raises(DomainError):
        critical_flux(2, 1.0, 24.0)
    with pytest.raises(DomainError):
        critical_flux(3, 0.0, 24.0)


def test_scale_evolution():
    assert scale_evolution(1.0, 24.0, 1.0) == pytest.approx(73.0 ** (1.0 / 3.0))
    assert scale_evolution(1.0, 24.0, 1.0) == pytest.approx(4.17934, abs=1e-5)
    assert scale_evolution(2.0, 30.0, 0.0) == pytest.approx(2.0)


def test_scale_evolution_satisfies_its_ode():
    C, t, h = 24.0, 0.5, 1e-5
    R = scale_evolution(1.0, C, t)
    dR = (scale_evolution(1.0, C, t + h) - scale_evolution(1.0, C, t - h)) / (2 * h)

    assert dR * R ** 2 == pytest.approx(C, rel=1e-8)


def test_scale_evolution_domain():
    with pytest.raises(DomainError):
        scale_evolution(0.0, 24.0, 1.0)
    with pytest.raises(DomainError):
        scale_evolution(1.0, -1.0, 1.0)


def test_linear_mode_validation():
    with pytest.raises(ValidationError):
        LinearMode(k=0, J=1.0, R=1.0)
    with pytest.raises(ValidationError):
        LinearMode(k=3, J=1.0, R=0.0)


def test_linear_table():
    rows = linear_table(3, 6)

    assert [k for k, _, _ in rows] == [3, 4, 5, 6]
    assert rows[0] == (3, 24.0, None)
    assert rows[1][1] == pytest.approx(30.0)
    assert rows[1][2] == pytest.approx(27.41, abs=0.01)
    with pytest.raises(DomainError):
        linear_table(2, 6)
    with pytest.raises(DomainError):
        linear_table(6, 5)


def test_deviation_slope():
    shape_factors = [0.05, 0.1, 0.2]
    flux_constants = [24.0 + 5.0 * s ** 2 for s in shape_factors]

    assert deviation_slope(shape_factors, flux_constants, 3) == pytest.approx(5.0)
    with pytest.raises(DomainError):
        deviation_slope([0.0], [24.0], 3)


def test_deviation_slope_against_a_two_phase_baseline():
    baseline = two_phase_flux_constant(4, PhysicalParams(atwood=-0.9))
    shape_factors = [0.02, 0.05, 0.08]
    flux_constants = [baseline - 73.3 * s ** 2 for s in shape_factors]

    assert deviation_slope(shape_factors, flux_constants, 4, baseline=baseline) == pytest.approx(-73.3)


def test_fit_flux_exponent_recovers_curve():
    folds = [4, 5, 6, 7, 8]

    assert fit_flux_exponent(folds, [fitted_flux_constant(k) for k in folds]) == pytest.approx(1.939, abs=1e-6)
    assert fit_flux_exponent(folds, [linear_flux_constant(k) for k in folds]) == pytest.approx(2.0, abs=1e-6)


def test_fit_flux_exponent_domain():
    with pytest.raises(DomainError):
        fit_flux_exponent([], [])
    with pytest.raises(DomainError):
        fit_flux_exponent([2, 3], [10.0, 24.0])
    with pytest.raises(DomainError):
        fit_flux_exponent([3, 4], [24.0])


@given(st.integers(min_value=3, max_value=200))
def test_linear_flux_constant_increases_with_fold(k):
    assert linear_flux_constant(k + 1) > linear_flux_constant(k)

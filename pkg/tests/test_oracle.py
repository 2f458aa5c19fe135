import pytest
from pydantic import ValidationError

from app.exceptions import ConfigurationError
from app.models.params import PhysicalParams
from app.models.validation import ValidationReport
from app.services.oracle import (
    circle_identity_suite,
    layer_eigenrelation_check,
    nonlinear_shape,
    oracle_equivalence_check,
    random_shape,
    run_all,
    scaling_identity_check,
)


def failed(reports):
    return [(r.check, r.error) for r in reports if not r.passed]


def test_circle_identities_hold():
    reports = circle_identity_suite(256)

    assert len(reports) == 15
    assert {r.check for r in reports} >= {"circle_R0.5_curvature", "circle_R2_single_layer", "circle_R1_g_vanishes"}
    assert failed(reports) == []


def test_circle_suite_rejects_bad_resolution():
    with pytest.raises(ConfigurationError):
        circle_identity_suite(255)
    with pytest.raises(ConfigurationError):
        circle_identity_suite(8)


def test_layer_eigenrelations_hold():
    reports = layer_eigenrelation_check(8, 256)

    assert len(reports) == 16
    assert failed(reports) == []


def test_eigenrelations_need_resolved_modes():
    with pytest.raises(ConfigurationError):
        layer_eigenrelation_check(8, 32)
    with pytest.raises(ConfigurationError):
        layer_eigenrelation_check(0, 256)


@pytest.mark.parametrize("beta", [0.5, 1.7, 3.0])
def test_scaling_identities_hold(params, beta):
    shape = random_shape(seed=5, modes=(2, 3, 4, 5, 6), amplitude=0.02)

    assert failed(scaling_identity_check(shape, beta, params, 128)) == []


def test_scaling_with_unit_beta_is_exact(params):
    reports = scaling_identity_check(random_shape(seed=3), 1.0, params, 64)

    assert [r.error for r in reports] == [0.0, 0.0]
    with pytest.raises(ConfigurationError):
        scaling_identity_check(random_shape(), 0.0, params, 64)


def test_random_shape_is_reproducible():
    shape = random_shape(seed=7, modes=(2, 5), amplitude=0.01)

    assert shape == random_shape(seed=7, modes=(2, 5), amplitude=0.01)
    assert shape.n1 == 6
    assert shape.coeffs[0] == 1.0
    assert all(abs(c) <= 0.01 for c in shape.coeffs[1:])


@pytest.mark.parametrize("seed", [0, 1])
def test_operators_match_brute_force_reference(params, seed):
    assert failed(oracle_equivalence_check(random_shape(seed=seed), params)) == []


@pytest.mark.parametrize("atwood", [0.0, -0.5])
def test_brute_force_reference_for_other_contrasts(atwood):
    params = PhysicalParams(tau=1.0, k_eff=2.0, atwood=atwood)

    assert failed(oracle_equivalence_check(random_shape(seed=2), params)) == []


def test_operators_match_brute_force_on_a_nonlinear_shape(params):
    shape = nonlinear_shape()
    reports = oracle_equivalence_check(shape, params, n2=128, label="nonlinear")

    assert [r.check for r in reports] == ["nonlinear_M", "nonlinear_G"]
    assert failed(reports) == []


@pytest.mark.parametrize("atwood", [0.0, -0.5])
def test_nonlinear_brute_force_reference_for_other_contrasts(atwood):
    params = PhysicalParams(tau=1.0, k_eff=2.0, atwood=atwood)

    assert failed(oracle_equivalence_check(nonlinear_shape(), params, n2=128)) == []


def test_equivalence_needs_nested_resolutions(params):
    with pytest.raises(ConfigurationError):
        oracle_equivalence_check(random_shape(), params, n2=32, reference_n2=500)


def test_run_all_passes():
    reports = run_all()

    assert all(isinstance(r, ValidationReport) for r in reports)
    assert {"oracle_nonlinear_M", "oracle_nonlinear_G"} <= {r.check for r in reports}
    assert failed(reports) == []


@pytest.mark.parametrize("error", [float("nan"), float("inf"), -float("inf")])
def test_report_flags_non_finite_error(error):
    report = ValidationReport.build("nan", error, 1e-8, 32)

    assert not report.passed
    assert report.error is None


def test_report_rejects_non_finite_error_fields():
    with pytest.raises(ValidationError):
        ValidationReport(check="nan", error=float("nan"), tolerance=1e-8, passed=False, n2=32)
    with pytest.raises(ValidationError):
        ValidationReport(check="neg", error=-1.0, tolerance=1e-8, passed=False, n2=32)

import numpy as np
import pytest
from hypothesis import settings as hypothesis_settings

from app.models.params import PhysicalParams
from app.models.shape import FourierShape
from app.services.geometry import sample_interface

# numpy-heavy properties: no per-example deadline
hypothesis_settings.register_profile("numeric", deadline=None, max_examples=25)
hypothesis_settings.load_profile("numeric")


@pytest.fixture
def params() -> PhysicalParams:
    return PhysicalParams(tau=1.0, k_eff=2.0, atwood=-1.0)


@pytest.fixture
def unit_circle():
    return sample_interface(FourierShape(coeffs=[1.0, 0.0]), 256)


@pytest.fixture
def wavy_shape() -> FourierShape:
    return FourierShape(coeffs=[1.0, 0.0, 0.02, 0.05, -0.01])


@pytest.fixture
def rng():
    return np.random.default_rng(1234)

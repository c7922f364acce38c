import numpy as np
import pytest

from src.physics.core import CanonicalState
from src.physics.fields import FieldSpec, NonrotatingFieldParams, RotatingFieldParams
from src.utils.stepping import IntegratorConfig


@pytest.fixture
def rotating_params():
    return RotatingFieldParams(b0=1.0, b3=0.8, omega=2.0, phi=0.3)


@pytest.fixture
def rotating_spec(rotating_params):
    p = rotating_params
    return FieldSpec.rotating(p.b0, p.b3, p.omega, p.phi)


@pytest.fixture
def nr_params():
    return NonrotatingFieldParams(b0=1.0, b3=1.5, omega=3.0)


@pytest.fixture
def nr_spec(nr_params):
    p = nr_params
    return FieldSpec.nonrotating(p.b0, p.b3, p.omega)


@pytest.fixture
def generic_ic():
    return CanonicalState(0.5, 1.0)


@pytest.fixture
def tight_cfg():
    return IntegratorConfig(rel_tol=1e-12, abs_tol=1e-14)


@pytest.fixture
def rng():
    return np.random.default_rng(20240517)

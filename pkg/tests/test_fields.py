import math

import pytest
from pydantic import ValidationError

from src.errors import DomainError, PeriodError
from src.physics.core import CanonicalState, bloch_from_canonical
from src.physics.fields import (
    FieldSpec,
    FieldVariant,
    RotatingFieldParams,
    drive_frequency,
    energy,
    field_at,
    hamiltonian_value,
    period,
)


def test_rotating_field_at_origin():
    spec = FieldSpec.rotating(1.0, 0.5, 2.0)
    assert field_at(spec, 0.0) == pytest.approx((-2.0, 0.0, -1.0))


def test_rotating_field_quarter_period():
    spec = FieldSpec.rotating(1.0, 0.5, 2.0)
    B = field_at(spec, 0.25 * spec.params.period)
    assert B == pytest.approx((0.0, -2.0, -1.0), abs=1e-15)


def test_nonrotating_field_flips_longitudinal_part_at_half_period():
    spec = FieldSpec.nonrotating(1.0, 1.5, 3.0)
    assert field_at(spec, 0.0) == pytest.approx((-2.0, 0.0, -3.0))
    assert field_at(spec, 0.5 * spec.params.period) == pytest.approx((-2.0, 0.0, 3.0))


def test_mean_field_is_transverse_only():
    spec = FieldSpec.mean_of_nr(0.2, 0.2, 10.0)
    assert field_at(spec, 123.0) == (-0.4, 0.0, 0.0)


def test_hamiltonian_is_minus_b_dot_s(rotating_spec, nr_spec, generic_ic):
    S = bloch_from_canonical(generic_ic).as_array()
    for spec in (rotating_spec, nr_spec):
        for t in (0.0, 0.37, 5.1):
            assert hamiltonian_value(spec, generic_ic, t) == pytest.approx(energy(field_at(spec, t), S), abs=1e-14)


def test_hamiltonian_sign_of_longitudinal_term():
    # B = (0, 0, -2 B3) and S3 = -q give H = -B.S = -2 B3 q
    spec = FieldSpec.rotating(0.0, 1.0, 1.0)
    assert hamiltonian_value(spec, CanonicalState(0.5, 0.0), 0.0) == pytest.approx(-1.0)


def test_derived_rotating_quantities():
    params = RotatingFieldParams(1.0, 0.0, 1.0)
    assert params.detuning == -0.5
    assert params.magnitude == pytest.approx(math.sqrt(5.0))
    assert params.period == pytest.approx(2.0 * math.pi)


def test_period_needs_a_periodic_field():
    with pytest.raises(PeriodError):
        period(FieldSpec.constant((0.0, 0.0, 1.0)))
    with pytest.raises(PeriodError):
        drive_frequency(FieldSpec.mean_of_nr(1.0, 1.0, 1.0))
    assert period(FieldSpec.nonrotating(1.0, 1.0, 4.0)) == pytest.approx(math.pi / 2)


def test_invalid_parameters():
    with pytest.raises(DomainError):
        RotatingFieldParams(1.0, 0.0, 0.0)
    with pytest.raises(DomainError):
        RotatingFieldParams(-1.0, 0.0, 1.0)
    with pytest.raises(DomainError):
        FieldSpec.constant((0.0, math.inf, 0.0))
    with pytest.raises(DomainError):
        field_at(FieldSpec.rotating(1.0, 0.0, 1.0), math.nan)


def test_field_spec_json_form():
    spec = FieldSpec.rotating(1.0, 0.8, 2.0, 0.3)
    data = spec.to_dict()
    assert data == {"variant": "rotating", "b0": 1.0, "b3": 0.8, "omega": 2.0, "phi": 0.3}
    assert FieldSpec.from_dict(data) == spec
    const = FieldSpec.from_dict({"variant": "constant", "vector": [0.0, 0.0, 2.0]})
    assert const.variant is FieldVariant.CONSTANT


def test_field_spec_json_validation():
    with pytest.raises(ValidationError):
        FieldSpec.from_dict({"variant": "nonrotating", "b0": 1.0, "b3": 1.0, "omega": -1.0})
    with pytest.raises(ValidationError):
        FieldSpec.from_dict({"variant": "rotating", "b0": 1.0})
    with pytest.raises(ValidationError):
        FieldSpec.from_dict({"variant": "constant"})

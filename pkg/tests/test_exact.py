import math

import numpy as np
import pytest

from src.errors import DegenerateError, ZeroFieldError
from src.physics.core import CanonicalState, bloch_from_canonical
from src.physics.dynamics import integrate_bloch
from src.physics.exact import (
    RotatingFrameState,
    energy_linearity_check,
    exact_bloch_r,
    exact_bloch_series,
    exact_canonical_r,
    exact_components_r,
    exact_overlap_r,
    fixed_points,
    from_rotating_frame,
    rotating_hamiltonian,
    to_rotating_frame,
)
from src.physics.fields import FieldSpec, RotatingFieldParams, field_at


def test_closed_form_matches_integration(rotating_params, rotating_spec, generic_ic, tight_cfg):
    times = np.linspace(0.0, 5.0 * rotating_params.period, 41)
    traj = integrate_bloch(rotating_spec, bloch_from_canonical(generic_ic), times, tight_cfg)
    exact = exact_bloch_series(rotating_params, generic_ic, times)
    assert np.max(np.abs(traj.states - exact)) < 1e-9


def test_overlap_closed_form_is_a_dot_product(rotating_params, generic_ic):
    S0 = bloch_from_canonical(generic_ic)
    for t in (0.0, 0.4, 3.3, 17.0):
        assert exact_overlap_r(rotating_params, generic_ic, t) == pytest.approx(
            exact_bloch_r(rotating_params, generic_ic, t).dot(S0), abs=1e-14
        )


def test_fixed_point_returns_every_period(rotating_params):
    fp = fixed_points(rotating_params)
    start = fp.lab_states[0]
    for k in (1, 2, 7):
        state = exact_canonical_r(rotating_params, start, k * rotating_params.period)
        assert state.q == pytest.approx(start.q, abs=1e-10)
        assert math.cos(state.p - start.p) == pytest.approx(1.0, abs=1e-10)


def test_fixed_point_energies_and_eigenvalues(rotating_params):
    fp = fixed_points(rotating_params)
    B = rotating_params.magnitude
    assert fp.E_plus == B
    assert fp.quantum_eigenvalues == (0.5 * B, -0.5 * B)
    assert rotating_hamiltonian(rotating_params, RotatingFrameState(fp.Q_bar_plus, 0.0)) == pytest.approx(B)
    assert rotating_hamiltonian(rotating_params, RotatingFrameState(fp.Q_bar_minus, math.pi)) == pytest.approx(-B)
    assert fp.Q_bar_plus == pytest.approx(-2.0 * rotating_params.detuning / B)


def test_zero_field_has_no_fixed_points():
    with pytest.raises(ZeroFieldError):
        fixed_points(RotatingFieldParams(0.0, 1.0, 2.0))


def test_rotating_frame_round_trip(rotating_params, generic_ic):
    rstate = to_rotating_frame(generic_ic, rotating_params, 1.7)
    back = from_rotating_frame(rstate, rotating_params, 1.7)
    assert back.q == pytest.approx(generic_ic.q)
    assert math.cos(back.p - generic_ic.p) == pytest.approx(1.0, abs=1e-13)


def test_rotating_energy_is_conserved(rotating_params, generic_ic):
    K0 = rotating_hamiltonian(rotating_params, to_rotating_frame(generic_ic, rotating_params, 0.0))
    for t in (0.5, 2.2, 9.9):
        state = exact_canonical_r(rotating_params, generic_ic, t)
        K = rotating_hamiltonian(rotating_params, to_rotating_frame(state, rotating_params, t))
        assert K == pytest.approx(K0, abs=1e-12)


def test_lab_energy_is_linear_in_q_with_slope_minus_omega(rotating_params, generic_ic):
    check = energy_linearity_check(rotating_params, generic_ic, np.linspace(0.0, 20.0, 400))
    assert check.slope == pytest.approx(-rotating_params.omega, abs=1e-10)
    assert check.max_residual < 1e-10


def test_linearity_check_rejects_fixed_point(rotating_params):
    start = fixed_points(rotating_params).lab_states[0]
    with pytest.raises(DegenerateError):
        energy_linearity_check(rotating_params, start, np.linspace(0.0, 5.0, 50))


def test_pole_start_stays_on_sphere(rotating_params):
    S = exact_bloch_r(rotating_params, CanonicalState(-1.0, 0.0), 3.0)
    assert S.dot(S) == pytest.approx(1.0, abs=1e-12)


def test_component_forms_match_the_rotation(rng):
    for _ in range(20):
        params = RotatingFieldParams(
            rng.uniform(0.0, 2.0), rng.uniform(-1.0, 2.0), rng.uniform(0.5, 3.0), rng.uniform(0.0, 2 * math.pi)
        )
        initial = CanonicalState(rng.uniform(-1.0, 1.0), rng.uniform(0.0, 2 * math.pi))
        times = rng.uniform(0.0, 10.0 * params.period, 5)
        series = exact_bloch_series(params, initial, times)
        for t, expected in zip(times, series):
            assert np.max(np.abs(exact_components_r(params, initial, t).as_array() - expected)) < 1e-12


def test_component_forms_at_zero_effective_field():
    params = RotatingFieldParams(0.0, 1.0, 2.0, 0.4)
    initial = CanonicalState(0.3, 1.1)
    S = exact_components_r(params, initial, 0.9)
    expected = exact_bloch_r(params, initial, 0.9)
    assert np.allclose(S.as_array(), expected.as_array(), atol=1e-14)


def test_second_component_has_sine_of_precession_in_its_pole_term():
    params = RotatingFieldParams(1.0, 0.8, 2.0)
    t = 0.25 * math.pi / params.omega
    S = exact_components_r(params, CanonicalState(1.0, 0.0), t)
    B, om = params.magnitude, params.detuning
    wt, bt = params.omega * t, B * t
    bracket = 2.0 * om * math.sin(wt) * math.sin(0.5 * bt) ** 2 - 0.5 * B * math.cos(wt) * math.sin(bt)
    expected = -(4.0 * params.b0 / B**2) * bracket
    assert S.s2 == pytest.approx(expected, abs=1e-14)
    assert S.s2 == pytest.approx(exact_bloch_r(params, CanonicalState(1.0, 0.0), t).s2, abs=1e-12)


def test_closed_form_satisfies_the_equation_of_motion(rotating_params, generic_ic):
    p = rotating_params
    spec = FieldSpec.rotating(p.b0, p.b3, p.omega, p.phi)
    h = 1e-5
    for t in (0.3, 2.0, 7.5, 40.0):
        before, now, after = exact_bloch_series(p, generic_ic, [t - h, t, t + h])
        derivative = (after - before) / (2.0 * h)
        assert np.max(np.abs(derivative - np.cross(now, field_at(spec, t)))) < 1e-6

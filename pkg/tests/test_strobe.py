import math
from fractions import Fraction

import numpy as np
import pytest

from src.errors import DegenerateError, PeriodError, ZeroFieldError
from src.physics.core import CanonicalState
from src.physics.exact import fixed_points
from src.physics.fields import FieldSpec, NonrotatingFieldParams, RotatingFieldParams
from src.physics.strobe import (
    MAP_HEADER,
    CurveKind,
    classify_commensurability,
    contour_nr,
    contour_r,
    continued_fraction_terms,
    distinct_points,
    orbit_closure,
    separatrix_r,
    solve_contour,
    stroboscopic_map,
)


def test_strobe_times_are_exact_multiples(rotating_spec, generic_ic):
    smap = stroboscopic_map(rotating_spec, [generic_ic], 12, jobs=1)
    orbit = smap.orbits[0]
    assert np.array_equal(orbit.t, np.arange(13) * (2.0 * math.pi / rotating_spec.params.omega))
    assert orbit.q[0] == pytest.approx(generic_ic.q, abs=1e-15)
    assert orbit.p[0] == pytest.approx(generic_ic.p, abs=1e-12)


def test_fixed_point_strobes_coincide(rotating_params, rotating_spec):
    start = fixed_points(rotating_params).lab_states[1]
    orbit = stroboscopic_map(rotating_spec, [start], 20, jobs=1).orbits[0]
    assert np.max(np.abs(orbit.q - start.q)) < 1e-7
    assert np.max(np.abs(np.cos(orbit.p - start.p) - 1.0)) < 1e-7
    assert distinct_points(orbit.q, orbit.p) == 1


def test_rotating_strobes_lie_on_their_contour(rotating_params, rotating_spec, rng, tight_cfg):
    initials = [CanonicalState(q, p) for q, p in zip(rng.uniform(-0.9, 0.9, 4), rng.uniform(0, 2 * math.pi, 4))]
    smap = stroboscopic_map(rotating_spec, initials, 50, tight_cfg, jobs=1)
    for initial, orbit in zip(initials, smap.orbits):
        curve = contour_r(rotating_params, initial)
        assert np.max(np.abs(curve.residuals(orbit.q, orbit.p))) < 1e-7


def test_contour_points_solve_their_equation(rotating_params, generic_ic):
    curve = contour_r(rotating_params, generic_ic)
    assert curve.kind is CurveKind.R_MAP
    assert curve.q.size > 0
    assert np.max(np.abs(curve.residuals())) < 1e-8


def test_distinct_levels_do_not_cross(rotating_params):
    a = contour_r(rotating_params, CanonicalState(0.1, 0.2))
    b = contour_r(rotating_params, CanonicalState(-0.4, 2.0))
    assert abs(a.level - b.level) > 1e-3
    # a point of one curve is off the other by the level difference
    assert np.min(np.abs(b.residuals(a.q, a.p))) > 1e-9


def test_nr_contour_levels(nr_params):
    assert contour_nr(nr_params, 4.9, CanonicalState(0.0, math.pi / 2)).level == pytest.approx(0.0, abs=1e-12)
    initial = CanonicalState(0.3, 0.7)
    curve = contour_nr(nr_params, 2.0 * nr_params.b3, initial)
    expected = 2.0 * nr_params.b0 * math.sqrt(1.0 - 0.09) * math.cos(0.7)
    assert curve.level == pytest.approx(expected, abs=1e-12)
    assert curve.kind is CurveKind.NR_MAP


def test_lines_appear_when_coupling_and_level_vanish():
    q, p, has_lines = solve_contour(1.0, 0.0, 0.0, 0.0, n_points=64)
    assert has_lines
    assert np.any(np.isclose(p, math.pi / 2)) and np.any(np.isclose(p, 1.5 * math.pi))


def test_separatrix_passes_through_poles():
    params = RotatingFieldParams(1.0, 1.5, 2.0)
    upper, lower = separatrix_r(params)
    assert upper.level == pytest.approx(2.0 * params.detuning)
    assert lower.level == pytest.approx(-2.0 * params.detuning)
    assert np.any(np.isclose(upper.q, -1.0))
    assert np.any(np.isclose(lower.q, 1.0))
    for curve in (upper, lower):
        assert np.max(np.abs(curve.residuals())) < 1e-8
        assert not curve.degenerate


def test_separatrix_on_resonance_is_degenerate():
    params = RotatingFieldParams(1.0, 1.0, 2.0)
    upper, _ = separatrix_r(params)
    assert upper.degenerate
    with pytest.raises(DegenerateError):
        separatrix_r(params, strict=True)
    with pytest.raises(ZeroFieldError):
        separatrix_r(RotatingFieldParams(0.0, 1.0, 2.0))


def test_commensurability_classification():
    sqrt5 = classify_commensurability(RotatingFieldParams(1.0, 0.0, 1.0), 1e-9, 10_000)
    assert sqrt5.ratio == pytest.approx(math.sqrt(5.0))
    assert not sqrt5.rational
    assert sqrt5.classification == "irrational-within-tol"

    closed = classify_commensurability(RotatingFieldParams(1.0, 44.5, 89.0))
    assert (closed.numerator, closed.denominator) == (2, 89)
    assert closed.rational

    unit = classify_commensurability(RotatingFieldParams(0.0, 3.0, 3.0))
    assert (unit.numerator, unit.denominator) == (1, 1)


def test_continued_fraction_terms():
    assert continued_fraction_terms(Fraction(415, 93), 100) == [4, 2, 6, 7]
    assert continued_fraction_terms(Fraction(415, 93), 20) == [4, 2, 6]


def test_rational_torus_closes():
    spec = FieldSpec.rotating(1.0, 44.5, 89.0)
    orbit = stroboscopic_map(spec, [CanonicalState(0.3, 0.5)], 89, jobs=1).orbits[0]
    assert orbit_closure(orbit) == 89
    assert distinct_points(orbit.q, orbit.p) <= 89


def test_strobe_needs_periodic_field(generic_ic):
    with pytest.raises(PeriodError):
        stroboscopic_map(FieldSpec.constant((0.0, 0.0, 1.0)), [generic_ic], 5)


def test_map_csv(tmp_path, nr_spec, generic_ic):
    smap = stroboscopic_map(nr_spec, [generic_ic, CanonicalState(-0.2, 3.0)], 3, jobs=1)
    path = tmp_path / "map.csv"
    smap.to_csv(str(path))
    lines = path.read_text().splitlines()
    assert lines[0] == ",".join(MAP_HEADER)
    assert len(lines) == 1 + 2 * 4
    assert lines[-1].startswith("1,3,")


def test_nr_params_accept_any_sign_of_b0():
    assert NonrotatingFieldParams(-1.0, 1.0, 1.0).period == pytest.approx(2 * math.pi)

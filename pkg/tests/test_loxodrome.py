import math

import numpy as np
import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from lorentzlox import kernels
from lorentzlox.catalog import PROBLEMS, PROFILES, ProblemSpec
from lorentzlox.loxodrome import (AngleSpec, CausalMismatchError, DegenerateSurfaceError,
                                  LoxodromeProblem, NegativeDiscriminantError,
                                  VanishingDenominatorError, arc_length, dvdu_roots,
                                  loxodrome_curve, scan, solve_v, theta_constant)
from lorentzlox.profile import ProfileCurve
from lorentzlox.surfaces import HelicoidalSurface, SurfaceCausal

SPACE, TIME = SurfaceCausal.SPACELIKE, SurfaceCausal.TIMELIKE


def test_theta_constant():
    assert theta_constant(SPACE, 1, 0.0) == 1.0
    assert theta_constant(TIME, 1, 0.8) == math.cosh(0.8)
    assert theta_constant(TIME, -1, 0.8) == math.sinh(0.8)
    with pytest.raises(ValueError):
        theta_constant(SPACE, 1, 3.5)
    with pytest.raises(ValueError):
        theta_constant(SPACE, -1, 0.5)
    with pytest.raises(ValueError):
        theta_constant(TIME, -1, 0.0)
    with pytest.raises(ValueError):
        theta_constant(SurfaceCausal.DEGENERATE, 1, 0.5)


def test_roots_meridian():
    for F, G in [(0.0, 3.0), (0.4, 2.0), (-1.2, 5.0)]:
        assert dvdu_roots(1.0, F, G, AngleSpec(0.0, SPACE, 1)) == (0.0, 0.0)


@pytest.mark.parametrize("theta0", [0.3, math.pi / 4, 1.2, 2.5])
def test_roots_right_type1(theta0):
    u, c = 2.5, 1.0
    plus, minus = dvdu_roots(1.0, 0.0, u * u - c * c, AngleSpec(theta0, SPACE, 1))
    want = abs(math.tan(theta0)) / math.sqrt(u * u - c * c)
    assert sorted([plus, minus]) == pytest.approx([-want, want], rel=1e-14)


def test_roots_errors():
    with pytest.raises(VanishingDenominatorError):
        dvdu_roots(1.0, 0.0, 0.0, AngleSpec(0.7, SPACE, 1))
    with pytest.raises(NegativeDiscriminantError):
        dvdu_roots(1.0, 0.0, -2.0, AngleSpec(0.7, SPACE, 1))
    with pytest.raises(NegativeDiscriminantError):
        dvdu_roots(1.0, 0.0, 2.0, AngleSpec(0.7, TIME, 1))
    with pytest.raises(ValueError):
        dvdu_roots(-1.0, 0.0, 2.0, AngleSpec(0.7, SPACE, 1))


def residual(E, F, G, angle, w):
    t2 = angle.theta_eff ** 2
    eps = angle.epsilon
    a = t2 * G - F * F
    terms = [abs(a * w * w), abs(2 * F * (t2 - eps) * w), abs(1 - eps * t2)]
    return abs(a * w * w + 2 * F * (t2 - eps) * w - (1 - eps * t2)) / max(1.0, *terms)


def metric_cases():
    """(E, F, G, angle) with the surface causal type matching the angle kind."""
    return st.tuples(st.sampled_from(["cos", "cosh", "sinh"]), st.floats(-3, 3), st.floats(-5, 5),
                     st.floats(0.05, 3.0))


@given(metric_cases())
def test_root_residual(case):
    kind, F, G, theta0 = case
    eps = -1 if kind == "sinh" else 1
    det = eps * G - F * F
    causal = SPACE if kind == "cos" else TIME
    assume(abs(det) > 1e-6 and (det > 0) == (causal is SPACE))
    angle = AngleSpec(min(theta0, math.pi), causal, eps)
    a = angle.theta_eff ** 2 * G - F * F
    assume(abs(a) > 1e-6)
    for w in dvdu_roots(float(eps), F, G, angle):
        assert residual(eps, F, G, angle, w) <= 1e-10


@given(metric_cases())
def test_discriminant_closed_form(case):
    kind, F, G, theta0 = case
    eps = -1 if kind == "sinh" else 1
    causal = SPACE if kind == "cos" else TIME
    angle = AngleSpec(min(theta0, math.pi), causal, eps)
    a, h, k, disc = kernels.load("numpy").quadratic(F, G, eps, angle.theta_eff)
    det = eps * G - F * F
    if kind == "cos":
        want = math.sin(2 * theta0) ** 2 / 4 * det
    else:
        want = math.sinh(2 * theta0) ** 2 / 4 * (-det)
    assert disc == pytest.approx(want, rel=1e-9, abs=1e-9 * (1 + h * h + abs(a * k)))


# Closed-form integrands as printed in the literature, one per case. Two of
# them carry typos (see the *_corrected variants); the tests pin down where
# the printed text agrees with the quadratic and where it cannot.

def printed_spacelike_I(x1, xn_d, c, t0, s):
    num = -2 * c * math.sin(t0) ** 2 * xn_d + s * math.sqrt(
        math.sin(2 * t0) ** 2 * (x1 ** 2 - c ** 2 * (1 + xn_d ** 2)))
    return num / (2 * math.cos(t0) ** 2 * (x1 ** 2 - c ** 2) - 2 * c ** 2 * xn_d ** 2)


def printed_spacelike_II(x1_d, xn, c, t0, s, power=2):
    num = 2 * c * x1_d ** power * math.sin(t0) ** 2 + s * math.sqrt(
        math.sin(2 * t0) ** 2 * (xn ** 2 + c ** 2 * (1 - x1_d ** 2)))
    return num / (2 * math.cos(t0) ** 2 * (c ** 2 + xn ** 2) - 2 * c ** 2 * x1_d ** 2)


def printed_spacelike_III(xn, xn_d, c, t0, s, cpow=1):
    num = -2 * c * xn_d * math.sin(t0) ** 2 + s * math.sqrt(
        math.sin(2 * t0) ** 2 * (2 * xn ** 2 - c ** cpow * xn_d ** 2))
    return num / (4 * math.cos(t0) ** 2 * xn ** 2 - 2 * c ** 2 * xn_d ** 2)


def printed_timelike_I(x1, xn_d, c, t0, eps, s):
    T = math.cosh(t0) if eps == 1 else math.sinh(t0)
    num = 2 * c * xn_d * (T * T - eps) + s * math.sqrt(
        math.sinh(2 * t0) ** 2 * (c ** 2 * (eps + xn_d ** 2) - eps * x1 ** 2))
    return num / (2 * T * T * (x1 ** 2 - c ** 2) - 2 * c ** 2 * xn_d ** 2)


def printed_timelike_II(x1_d, xn, c, t0, eps, s):
    T = math.cosh(t0) if eps == 1 else math.sinh(t0)
    num = -2 * c * x1_d * (T * T - eps) + s * math.sqrt(
        math.sinh(2 * t0) ** 2 * (c ** 2 * (x1_d ** 2 - eps) - eps * xn ** 2))
    return num / (2 * T * T * (c ** 2 + xn ** 2) - 2 * c ** 2 * x1_d ** 2)


def printed_timelike_III(xn, xn_d, c, t0, eps, s):
    T = math.cosh(t0) if eps == 1 else math.sinh(t0)
    num = 2 * c * xn_d * (T * T - eps) + s * math.sqrt(
        math.sinh(2 * t0) ** 2 * (c ** 2 * xn_d ** 2 - 2 * eps * xn ** 2))
    return num / (4 * T * T * xn ** 2 - 2 * c ** 2 * xn_d ** 2)


def _close(a, b, tol=1e-9):
    return abs(a - b) <= tol * max(1.0, abs(a), abs(b))


def _both(E, F, G, angle):
    try:
        return dvdu_roots(E, F, G, angle)
    except (VanishingDenominatorError, NegativeDiscriminantError):
        return None


@given(st.floats(0.2, 4), st.floats(-2, 2), st.floats(0.1, 2), st.floats(0.05, 3.1))
def test_printed_spacelike_type1(x1, xn_d, c, t0):
    E, F, G = 1.0, -c * xn_d, x1 * x1 - c * c
    assume(E * G - F * F > 1e-3)
    r = _both(E, F, G, AngleSpec(t0, SPACE, 1))
    assume(r is not None and max(map(abs, r)) < 1e6)
    assert _close(r[0], printed_spacelike_I(x1, xn_d, c, t0, +1))
    assert _close(r[1], printed_spacelike_I(x1, xn_d, c, t0, -1))


@given(st.floats(-0.9, 0.9), st.floats(0.2, 4), st.floats(0.1, 2), st.floats(0.05, 3.1))
def test_spacelike_type2_first_power(x1_d, xn, c, t0):
    E, F, G = 1.0, c * x1_d, xn * xn + c * c
    r = _both(E, F, G, AngleSpec(t0, SPACE, 1))
    assume(r is not None and max(map(abs, r)) < 1e6)
    assert _close(r[0], printed_spacelike_II(x1_d, xn, c, t0, +1, power=1))
    assert _close(r[1], printed_spacelike_II(x1_d, xn, c, t0, -1, power=1))


def test_spacelike_type2_printed_square_only_matches_when_derivative_is_0_or_1():
    xn, c, t0 = 1.5, 0.8, 0.6
    angle = AngleSpec(t0, SPACE, 1)
    for x1_d in (0.0, 1.0):
        r = dvdu_roots(1.0, c * x1_d, xn * xn + c * c, angle)
        assert _close(r[0], printed_spacelike_II(x1_d, xn, c, t0, +1))
    x1_d = 0.5
    r = dvdu_roots(1.0, c * x1_d, xn * xn + c * c, angle)
    assert not _close(r[0], printed_spacelike_II(x1_d, xn, c, t0, +1), 1e-3)


@given(st.floats(0.2, 4), st.floats(-2, 2), st.floats(0.1, 2), st.floats(0.05, 3.1))
def test_spacelike_type3_c_squared(xn, xn_d, c, t0):
    E, F, G = 1.0, -c * xn_d, 2 * xn * xn
    assume(E * G - F * F > 1e-3)
    r = _both(E, F, G, AngleSpec(t0, SPACE, 1))
    assume(r is not None and max(map(abs, r)) < 1e6)
    assert _close(r[0], printed_spacelike_III(xn, xn_d, c, t0, +1, cpow=2))
    assert _close(r[1], printed_spacelike_III(xn, xn_d, c, t0, -1, cpow=2))


def test_spacelike_type3_printed_radicand_only_matches_at_unit_pitch():
    xn, xn_d, t0 = 1.5, 0.7, 0.6
    angle = AngleSpec(t0, SPACE, 1)
    r = dvdu_roots(1.0, -1.0 * xn_d, 2 * xn * xn, angle)
    assert _close(r[0], printed_spacelike_III(xn, xn_d, 1.0, t0, +1))
    c = 1.7
    r = dvdu_roots(1.0, -c * xn_d, 2 * xn * xn, angle)
    assert not _close(r[0], printed_spacelike_III(xn, xn_d, c, t0, +1), 1e-3)


@given(st.floats(0.0, 4), st.floats(-2, 2), st.floats(0.1, 2), st.floats(0.05, 2.0),
       st.sampled_from([1, -1]))
def test_printed_timelike_type1(x1, xn_d, c, t0, eps):
    E, F, G = float(eps), -c * xn_d, x1 * x1 - c * c
    assume(E * G - F * F < -1e-3)
    r = _both(E, F, G, AngleSpec(t0, TIME, eps))
    assume(r is not None and max(map(abs, r)) < 1e6)
    assert _close(r[0], printed_timelike_I(x1, xn_d, c, t0, eps, +1))
    assert _close(r[1], printed_timelike_I(x1, xn_d, c, t0, eps, -1))


@given(st.floats(-3, 3), st.floats(0.0, 4), st.floats(0.1, 2), st.floats(0.05, 2.0),
       st.sampled_from([1, -1]))
def test_printed_timelike_type2(x1_d, xn, c, t0, eps):
    E, F, G = float(eps), c * x1_d, xn * xn + c * c
    assume(E * G - F * F < -1e-3)
    r = _both(E, F, G, AngleSpec(t0, TIME, eps))
    assume(r is not None and max(map(abs, r)) < 1e6)
    assert _close(r[0], printed_timelike_II(x1_d, xn, c, t0, eps, +1))
    assert _close(r[1], printed_timelike_II(x1_d, xn, c, t0, eps, -1))


@given(st.floats(0.0, 4), st.floats(-3, 3), st.floats(0.1, 2), st.floats(0.05, 2.0),
       st.sampled_from([1, -1]))
def test_printed_timelike_type3(xn, xn_d, c, t0, eps):
    E, F, G = float(eps), -c * xn_d, 2 * xn * xn
    assume(E * G - F * F < -1e-3)
    r = _both(E, F, G, AngleSpec(t0, TIME, eps))
    assume(r is not None and max(map(abs, r)) < 1e6)
    assert _close(r[0], printed_timelike_III(xn, xn_d, c, t0, eps, +1))
    assert _close(r[1], printed_timelike_III(xn, xn_d, c, t0, eps, -1))


# -- solving ------------------------------------------------------------------

def right_type1(c=1.0):
    return HelicoidalSurface(PROFILES["type1_line"].build(4), c)


def test_closed_form_arccosh(backend):
    p = LoxodromeProblem.on(right_type1(), math.pi / 4, 2.0)
    u, v = solve_v(p, 3.0, 1000)
    assert u.size == 1001 and u[0] == 2.0 and u[-1] == 3.0
    assert abs(v[-1] - (math.acosh(3) - math.acosh(2))) <= 1e-8
    np.testing.assert_allclose(v, np.arccosh(u) - math.acosh(2), atol=1e-10)


def test_meridian_keeps_v_fixed(backend):
    p = LoxodromeProblem.on(right_type1(), 0.0, 2.0, v0=0.4)
    _, v = solve_v(p, 3.0, 50)
    assert np.all(v == 0.4)
    assert arc_length(p, 3.0) == pytest.approx(1.0, rel=1e-10)
    curve = loxodrome_curve(p, 3.0, 50)
    np.testing.assert_allclose(curve.points, p.surface.position(curve.u, np.full(51, 0.4)))


RIGHT = [PROBLEMS["type1_right"], PROBLEMS["type3_right"], PROBLEMS["type2_timelike"],
         ProblemSpec("type2_planar", 0.7, 0.6, 0.0, 2.0)]


@pytest.mark.parametrize("spec", RIGHT, ids=lambda s: s.profile)
def test_branch_symmetry_on_right_surfaces(backend, spec):
    p = spec.build()
    assert p.surface.is_right_helicoidal(np.linspace(spec.u0, spec.u1, 20))
    q = LoxodromeProblem(p.surface, p.angle, -p.branch, p.u0, 1.5)
    _, v = solve_v(p, spec.u1, 200)
    _, w = solve_v(q, spec.u1, 200)
    np.testing.assert_allclose(w - 1.5, -(v - p.v0), atol=1e-10)


@pytest.mark.parametrize("name", sorted(PROBLEMS))
def test_backends_agree(name):
    spec = PROBLEMS[name]
    out = {}
    for b in ("numpy", "numba"):
        previous = kernels.active
        kernels.use(b)
        try:
            p = spec.build()
            out[b] = (solve_v(p, spec.u1, 300)[1], arc_length(p, spec.u1))
        finally:
            kernels.active = previous
    np.testing.assert_allclose(out["numpy"][0], out["numba"][0], rtol=1e-12, atol=1e-12)
    assert out["numpy"][1] == pytest.approx(out["numba"][1], rel=1e-12)


def test_quadrature_tolerance_controls_error(backend):
    p = LoxodromeProblem.on(right_type1(), 1.2, 1.05)
    exact = math.tan(1.2) * (math.acosh(2.0) - math.acosh(1.05))
    errs = [abs(solve_v(p, 2.0, 4, tol=t)[1][-1] - exact) for t in (1e-4, 1e-8, 1e-12)]
    assert errs[0] <= 1e-4 and errs[1] <= 1e-8 and errs[2] <= 1e-11


def test_right_spacelike_arc_length(backend):
    p = PROBLEMS["type3_right"].build()
    assert arc_length(p, 1.0) == pytest.approx(2.0, rel=1e-10)


def test_right_timelike_type2_arc_length(backend):
    s = HelicoidalSurface(PROFILES["type2_hyperbolic"].build(4), 1.0)
    for t0 in (0.3, 1.0, 1.9):
        p = LoxodromeProblem.on(s, t0, 0.0)
        assert p.angle.surface_causal is TIME
        assert arc_length(p, 1.0) == pytest.approx(1 / math.sinh(t0), rel=1e-9)


def test_degenerate_range_bracketed(backend):
    p = LoxodromeProblem.on(right_type1(), math.pi / 4, 0.5)
    with pytest.raises(DegenerateSurfaceError) as info:
        solve_v(p, 2.0)
    lo, hi = info.value.bracket
    assert lo <= 1.0 <= hi and hi - lo <= 1e-6


def test_vanishing_denominator_bracketed(backend):
    prof = PROFILES["type1_boosted"].build(4).with_constants(a=1.0)
    s = HelicoidalSurface(prof, 1.0)
    t0 = 1.2
    p = LoxodromeProblem.on(s, t0, 1.5)
    with pytest.raises(VanishingDenominatorError) as info:
        solve_v(p, 3.0)
    root = math.sqrt(math.sinh(1) ** 2 / math.cos(t0) ** 2 + 1) / math.cosh(1)
    lo, hi = info.value.bracket
    assert lo <= root <= hi and hi - lo <= 1e-6


def test_causal_mismatch_and_start_on_degenerate(backend):
    s = right_type1()
    p = LoxodromeProblem(s, AngleSpec(0.5, SPACE, 1), 1, 0.5)
    with pytest.raises(CausalMismatchError):
        scan(p, 0.8)
    with pytest.raises(DegenerateSurfaceError):
        LoxodromeProblem.on(s, 0.5, 1.0)


def test_invalid_problem_arguments():
    s = right_type1()
    with pytest.raises(ValueError):
        LoxodromeProblem(s, AngleSpec(0.5, SPACE, 1), branch=0, u0=2.0)
    with pytest.raises(ValueError):
        LoxodromeProblem(s, AngleSpec(0.5, TIME, -1), u0=2.0)
    p = LoxodromeProblem.on(s, 0.5, 2.0)
    with pytest.raises(ValueError):
        solve_v(p, 1.0)
    with pytest.raises(ValueError):
        solve_v(p, 3.0, steps=1)


def test_domain_error_inside_range(backend):
    prof = ProfileCurve.from_strings("I", 4, {1: "2 + sqrt(u)", 3: "0"}, 1)
    s = HelicoidalSurface(prof, 0.5)
    from lorentzlox.expr import DomainError
    with pytest.raises(DomainError):
        LoxodromeProblem.on(s, 0.3, -1.0)


def test_sampled_curve_consistency(backend):
    p = PROBLEMS["type1_right"].build()
    c = loxodrome_curve(p, 3.0, 100)
    assert len(c) == 101
    assert np.all(np.diff(c.u) > 0)
    np.testing.assert_allclose(c.points[0], p.surface.position(2.0, 0.0))
    np.testing.assert_allclose(c.points[-1], p.surface.position(3.0, math.acosh(3) - math.acosh(2)),
                               atol=1e-9)
    assert c.max_angle_deviation <= 1e-6
    assert c.samples[0][0] == 2.0

"""Spacelike loxodromes on helicoidal surfaces.

Along ``alpha(u) = x(u, v(u))`` the tangent is ``x_u + w x_v`` with
``w = dv/du``. Requiring a constant Lorentzian angle with the meridian
direction ``x_u`` and squaring gives, with ``E = eps``,

    (T^2 G - F^2) w^2 + 2 F (T^2 - eps) w = 1 - eps T^2

where ``T`` is cos, cosh or sinh of the angle depending on the causal types
involved. Its discriminant is a positive multiple of ``EG - F^2`` for the
circular case and of ``F^2 - EG`` for the hyperbolic ones, so real roots exist
exactly on surfaces of the matching causal type. ``v(u)`` is the integral of
the chosen root.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .kernels._numpy import quadratic, roots
from .surfaces import (DEGENERACY_TOL, HelicoidalSurface, SurfaceCausal,
                       classify_determinant)

QUAD_TOL = 1e-10
SCAN_POINTS = 256
BRACKET_WIDTH = 1e-6
MAX_DEPTH = 50


class InadmissibleError(ValueError):
    """The requested loxodrome lies outside the region where the equations hold.

    ``bracket`` is a ``(lo, hi)`` interval containing the offending point,
    or ``None`` when the problem fails everywhere.
    """

    def __init__(self, message: str, bracket: tuple[float, float] | None = None):
        if bracket is not None:
            message = f"{message} in [{bracket[0]!r}, {bracket[1]!r}]"
        super().__init__(message)
        self.bracket = bracket


class DegenerateSurfaceError(InadmissibleError):
    pass


class CausalMismatchError(InadmissibleError):
    pass


class VanishingDenominatorError(InadmissibleError):
    pass


class NegativeDiscriminantError(InadmissibleError):
    pass


class SingularIntegrandError(InadmissibleError):
    pass


def theta_constant(surface_causal, epsilon: int, theta0: float) -> float:
    """The constant T entering the loxodrome equation.

    cos(theta0) on a spacelike surface; cosh(theta0) on a timelike surface with
    spacelike meridians (eps = +1); sinh(theta0) with timelike meridians.
    """
    surface_causal = SurfaceCausal(surface_causal)
    theta0 = float(theta0)
    if epsilon not in (1, -1):
        raise ValueError(f"epsilon must be +1 or -1, got {epsilon!r}")
    if surface_causal is SurfaceCausal.SPACELIKE:
        if not 0.0 <= theta0 <= math.pi:
            raise ValueError(f"theta0 must lie in [0, pi] on a spacelike surface, got {theta0!r}")
        if epsilon != 1:
            raise ValueError("spacelike helicoidal surfaces have spacelike meridians (epsilon = +1)")
        return math.cos(theta0)
    if surface_causal is SurfaceCausal.TIMELIKE:
        if epsilon == 1:
            return math.cosh(theta0)
        value = math.sinh(theta0)
        if value == 0.0:
            raise ValueError("theta0 = 0 with timelike meridians makes the loxodrome "
                             "orthogonal to the meridians; not a valid loxodrome angle")
        return value
    raise ValueError("no loxodrome angle on a degenerate surface")


@dataclass(frozen=True)
class AngleSpec:
    theta0: float
    surface_causal: SurfaceCausal
    epsilon: int
    theta_eff: float = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "surface_causal", SurfaceCausal(self.surface_causal))
        object.__setattr__(self, "theta_eff",
                           theta_constant(self.surface_causal, self.epsilon, self.theta0))


def dvdu_roots(E: float, F: float, G: float, angle: AngleSpec,
               tol: float = DEGENERACY_TOL) -> tuple[float, float]:
    """Both roots (plus branch, minus branch) of the dv/du quadratic.

    Raises
    ------
    VanishingDenominatorError
        ``T^2 G - F^2`` is zero within ``tol``.
    NegativeDiscriminantError
        No real root: the angle does not fit the surface's causal type.
    """
    if abs(E - angle.epsilon) > 1e-8:
        raise ValueError(f"E = {E!r} is inconsistent with epsilon = {angle.epsilon}")
    eps, theta = angle.epsilon, angle.theta_eff
    a, h, k, disc = quadratic(F, G, eps, theta)
    if abs(a) <= tol * max(1.0, theta * theta * abs(G), F * F):
        raise VanishingDenominatorError("T^2 G - F^2 vanishes")
    if disc < -tol * max(1.0, h * h + abs(a * k)):
        raise NegativeDiscriminantError(
            f"no real dv/du: discriminant {disc!r} < 0 (angle kind does not match the surface)")
    plus, minus = roots(np.float64(F), np.float64(G), eps, theta)
    return float(plus), float(minus)


@dataclass(frozen=True)
class LoxodromeProblem:
    surface: HelicoidalSurface
    angle: AngleSpec
    branch: int = 1
    u0: float = 0.0
    v0: float = 0.0

    def __post_init__(self):
        if self.branch not in (1, -1):
            raise ValueError(f"branch must be +1 or -1, got {self.branch!r}")
        if self.angle.epsilon != self.surface.epsilon:
            raise ValueError("angle epsilon differs from the profile's epsilon")

    @classmethod
    def on(cls, surface: HelicoidalSurface, theta0: float, u0: float, *, branch: int = 1,
           v0: float = 0.0, tol: float = DEGENERACY_TOL) -> "LoxodromeProblem":
        """Problem whose angle kind follows the surface's causal type at ``u0``."""
        causal = surface.causal_type(u0, tol)
        if causal is SurfaceCausal.DEGENERATE:
            raise DegenerateSurfaceError("surface is degenerate at u0", (u0, u0))
        return cls(surface, AngleSpec(theta0, causal, surface.epsilon), branch, float(u0), float(v0))

    def _args(self):
        s = self.surface
        t1 = s.profile.tapes[0]
        tn = s.profile.tapes[s.n - 1]
        return (s.kind.code, s.c, float(s.epsilon), self.angle.theta_eff, self.branch,
                t1.ops, t1.args, tn.ops, tn.args)

    # scalar helpers on u -----------------------------------------------------

    def _coefficients(self, u):
        E, F, G = self.surface.metric(u)
        a, h, k, disc = quadratic(F, G, self.angle.epsilon, self.angle.theta_eff)
        return E, F, G, a, h, k, disc

    def _signs(self, u, tol):
        """Banded signs of (EG - F^2, denominator, discriminant) on an array of u."""
        E, F, G, a, h, k, disc = self._coefficients(u)
        t2 = self.angle.theta_eff ** 2
        det_sign = classify_determinant(E, F, G, tol)
        a_band = tol * np.maximum(1.0, np.maximum(t2 * np.abs(G), F * F))
        a_sign = np.where(np.abs(a) <= a_band, 0, np.sign(a)).astype(int)
        d_band = tol * np.maximum(1.0, h * h + np.abs(a * k))
        d_sign = np.where(disc < -d_band, -1, 1).astype(int)
        return det_sign, a_sign, d_sign


def _refine(sign_at, lo: float, hi: float, good: int, width: float) -> tuple[float, float]:
    """Shrink [lo, hi] around the first point where sign_at(u) != good."""
    while hi - lo > width:
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        if sign_at(mid) == good:
            lo = mid
        else:
            hi = mid
    return lo, hi


def scan(problem: LoxodromeProblem, u1: float, *, points: int = SCAN_POINTS,
         tol: float = DEGENERACY_TOL, width: float = BRACKET_WIDTH) -> None:
    """Refuse ranges that meet the excluded sets of the loxodrome equation.

    Samples EG - F^2, the denominator T^2 G - F^2 and the discriminant on a
    grid over [u0, u1]; the first failure is narrowed by bisection to an
    interval no wider than ``width`` and raised as an
    :class:`InadmissibleError` subclass.
    """
    u0 = problem.u0
    grid = np.linspace(u0, u1, max(int(points), 2))
    det_sign, a_sign, d_sign = problem._signs(grid, tol)
    want = 1 if problem.angle.surface_causal is SurfaceCausal.SPACELIKE else -1

    if det_sign[0] != want and det_sign[0] != 0:
        raise CausalMismatchError(
            f"surface is {'spacelike' if det_sign[0] > 0 else 'timelike'} at u0={u0!r} "
            f"but the angle was set up for a {problem.angle.surface_causal.value} surface")

    checks = [
        (0, det_sign, DegenerateSurfaceError, "EG - F^2 vanishes (surface degenerate)"),
        (1, a_sign, VanishingDenominatorError, "T^2 G - F^2 vanishes"),
        (2, d_sign, NegativeDiscriminantError, "discriminant turns negative"),
    ]
    failures = []
    for slot, signs, exc, msg in checks:
        good = want if slot == 0 else (signs[0] if slot == 1 and signs[0] != 0 else 1)
        bad = np.nonzero(signs != good)[0]
        if bad.size:
            failures.append((int(bad[0]), slot, good, exc, msg))
    if not failures:
        return
    j, slot, good, exc, msg = min(failures, key=lambda f: (f[0], f[1]))
    if j == 0:
        raise exc(msg, (float(grid[0]), float(grid[0])))

    def sign_at(x):
        return int(problem._signs(np.array([x]), tol)[slot][0])

    lo, hi = _refine(sign_at, float(grid[j - 1]), float(grid[j]), good, width)
    raise exc(msg, (lo, hi))


def _check_range(problem: LoxodromeProblem, u1: float, steps: int) -> None:
    if not u1 > problem.u0:
        raise ValueError(f"u1 must exceed u0 = {problem.u0!r}, got {u1!r}")
    if int(steps) < 2:
        raise ValueError("steps must be at least 2")


def _integrate(which: int, problem: LoxodromeProblem, knots: np.ndarray, tol: float):
    inc, status = kernels.active.simpson_increments(which, *problem._args(), knots, tol, MAX_DEPTH)
    if status == 1:
        w = kernels.active.integrand(which, *problem._args(), knots)
        bad = np.nonzero(~np.isfinite(w))[0]
        j = int(bad[0]) if bad.size else 0
        lo = float(knots[max(j - 1, 0)])
        hi = float(knots[min(j + 1, knots.size - 1)])
        raise SingularIntegrandError("integrand is not finite", (lo, hi))
    if status == 2:
        raise SingularIntegrandError(f"quadrature did not converge within {MAX_DEPTH} bisections")
    return inc


def solve_v(problem: LoxodromeProblem, u1: float, steps: int = 1000, *,
            tol: float = QUAD_TOL, scan_points: int = SCAN_POINTS,
            degeneracy_tol: float = DEGENERACY_TOL) -> tuple[np.ndarray, np.ndarray]:
    """v(u) on ``steps + 1`` equally spaced points of [u0, u1].

    Each step is integrated by adaptive Simpson with absolute tolerance
    ``tol`` per unit length; values are accumulated from ``v0``.
    """
    _check_range(problem, u1, steps)
    scan(problem, u1, points=scan_points, tol=degeneracy_tol)
    u = np.linspace(problem.u0, u1, int(steps) + 1)
    inc = _integrate(kernels.DVDU, problem, u, tol)
    v = problem.v0 + np.concatenate([[0.0], np.cumsum(inc)])
    return u, v


def arc_length(problem: LoxodromeProblem, u1: float, *, tol: float = QUAD_TOL,
               pieces: int = 64, scan_points: int = SCAN_POINTS,
               degeneracy_tol: float = DEGENERACY_TOL) -> float:
    """Length of the loxodrome between u0 and u1: integral of sqrt|E + 2F w + G w^2|."""
    _check_range(problem, u1, 2)
    scan(problem, u1, points=scan_points, tol=degeneracy_tol)
    knots = np.linspace(problem.u0, u1, int(pieces) + 1)
    return float(np.sum(_integrate(kernels.SPEED, problem, knots, tol)))


@dataclass(frozen=True, eq=False)
class SampledCurve:
    u: np.ndarray
    v: np.ndarray
    points: np.ndarray
    arc_length: float
    max_angle_deviation: float

    @property
    def samples(self):
        return list(zip(self.u.tolist(), self.v.tolist(), self.points))

    def __len__(self):
        return self.u.size


def loxodrome_curve(problem: LoxodromeProblem, u1: float, steps: int = 1000, *,
                    tol: float = QUAD_TOL, degeneracy_tol: float = DEGENERACY_TOL) -> SampledCurve:
    """Sampled loxodrome with its arc length and oracle angle deviation attached."""
    from .oracle import angle_along_curve

    u, v = solve_v(problem, u1, steps, tol=tol, degeneracy_tol=degeneracy_tol)
    points = problem.surface.position(u, v)
    length = arc_length(problem, u1, tol=tol, degeneracy_tol=degeneracy_tol)
    curve = SampledCurve(u, v, points, length, float("nan"))
    trace = angle_along_curve(curve, problem.surface, problem.angle.theta0)
    return SampledCurve(u, v, points, length, trace.max_deviation)

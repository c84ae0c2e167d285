"""Independent checks on computed loxodromes.

Nothing here touches the solver's quadrature. Angles are recomputed from
surface positions by central differences, and the ODE cross-check integrates
dv/du with classic RK4.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .lorentz import AngleError, AngleKind, angle_between, lorentz_inner
from .surfaces import DEGENERACY_TOL, HelicoidalSurface, classify_determinant


@dataclass(frozen=True)
class AngleTrace:
    u: np.ndarray
    angles: np.ndarray          # NaN where the angle could not be formed
    kinds: tuple
    deviations: np.ndarray
    failures: tuple             # (u, message) for samples with no defined angle

    @property
    def max_deviation(self) -> float:
        if self.failures or self.deviations.size == 0:
            return math.inf
        return float(np.max(self.deviations))


def angle_deviation(angle: float, kind: AngleKind, theta0: float) -> float:
    """Distance between a measured angle and theta0 for an unoriented meridian.

    Flipping x_u to -x_u maps a circular angle t to pi - t and a sinh angle
    t to -t; the squared loxodrome equation cannot tell them apart.
    """
    if kind is AngleKind.SPACELIKE_PLANE:
        return min(abs(angle - theta0), abs((math.pi - angle) - theta0))
    return abs(abs(angle) - abs(theta0))


def _lagrange_weights(nodes: np.ndarray, x: np.ndarray) -> np.ndarray:
    """Interpolation weights of each row of ``nodes`` (m, k) at ``x`` (m,)."""
    m, k = nodes.shape
    w = np.ones((m, k))
    for j in range(k):
        for i in range(k):
            if i != j:
                w[:, j] *= (x - nodes[:, i]) / (nodes[:, j] - nodes[:, i])
    return w


def curve_tangents(u: np.ndarray, v: np.ndarray, surface: HelicoidalSurface, stencil: int = 5):
    """alpha'(u) at interior samples by central differences.

    The step is (u-range)/(10 * samples); v between samples comes from a
    local Lagrange interpolant through ``stencil`` neighbouring samples.
    Returns (interior indices, tangents).
    """
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    m = u.size
    if m < 3:
        raise ValueError("need at least 3 samples")
    k = min(stencil, m)
    idx = np.arange(1, m - 1)
    start = np.clip(idx - k // 2, 0, m - k)
    cols = start[:, None] + np.arange(k)[None, :]
    h = (u[-1] - u[0]) / (10.0 * m)
    nodes = u[cols]
    vals = v[cols]
    up = u[idx] + h
    um = u[idx] - h
    vp = np.sum(_lagrange_weights(nodes, up) * vals, axis=1)
    vm = np.sum(_lagrange_weights(nodes, um) * vals, axis=1)
    tangent = (surface.position(up, vp) - surface.position(um, vm)) / (2.0 * h)
    return idx, tangent


def angle_along_curve(curve, surface: HelicoidalSurface, theta0: float | None = None) -> AngleTrace:
    """Definition-based angle between the curve and the meridians at interior samples.

    ``curve`` needs ``u`` and ``v`` arrays. When ``theta0`` is given the
    per-sample deviations are filled in, otherwise they are zero.
    """
    idx, tangent = curve_tangents(curve.u, curve.v, surface)
    u = np.asarray(curve.u, dtype=float)[idx]
    v = np.asarray(curve.v, dtype=float)[idx]
    xu, _ = surface.tangent_basis(u, v)
    angles = np.full(u.size, np.nan)
    devs = np.zeros(u.size)
    kinds = []
    failures = []
    for i in range(u.size):
        try:
            ang = angle_between(tangent[i], xu[i])
        except AngleError as exc:
            kinds.append(None)
            failures.append((float(u[i]), str(exc)))
            devs[i] = np.nan
            continue
        angles[i] = ang.value
        kinds.append(ang.kind)
        if theta0 is not None:
            devs[i] = angle_deviation(ang.value, ang.kind, theta0)
    return AngleTrace(u, angles, tuple(kinds), devs, tuple(failures))


def rk4(f, u0: float, y0: float, u1: float, steps: int):
    """Classic fourth-order Runge-Kutta for dy/du = f(u, y) on a uniform grid."""
    if steps < 1:
        raise ValueError("steps must be positive")
    h = (u1 - u0) / steps
    us = u0 + h * np.arange(steps + 1)
    us[-1] = u1
    ys = np.empty(steps + 1)
    y = float(y0)
    ys[0] = y
    for i in range(steps):
        u = us[i]
        k1 = f(u, y)
        k2 = f(u + 0.5 * h, y + 0.5 * h * k1)
        k3 = f(u + 0.5 * h, y + 0.5 * h * k2)
        k4 = f(u + h, y + h * k3)
        y = y + h * (k1 + 2.0 * k2 + 2.0 * k3 + k4) / 6.0
        ys[i + 1] = y
    return us, ys


def rk4_v(problem, u1: float, steps: int = 1000, *, start: tuple[float, float] | None = None):
    """v(u) from RK4 on dv/du = chosen root of the loxodrome quadratic.

    Integration starts at ``(problem.u0, problem.v0)`` unless ``start`` gives
    another ``(u, v)`` pair.
    """
    from .loxodrome import dvdu_roots

    surface = problem.surface
    pick = 0 if problem.branch > 0 else 1

    def w(u, _v):
        m = surface.first_fundamental_form(u)
        return dvdu_roots(m.E, m.F, m.G, problem.angle)[pick]

    u0, v0 = (problem.u0, problem.v0) if start is None else start
    return rk4(w, u0, v0, u1, int(steps))


@dataclass
class VerificationReport:
    max_angle_deviation: float = 0.0
    max_metric_residual: float = 0.0
    ode_vs_quadrature_max_gap: float = 0.0
    spacelike_violations: int = 0
    notes: list = field(default_factory=list)

    def passed(self, angle_tol: float = 1e-6, metric_tol: float = 1e-9,
               ode_tol: float = 1e-7) -> bool:
        return (self.max_angle_deviation <= angle_tol
                and self.max_metric_residual <= metric_tol
                and self.ode_vs_quadrature_max_gap <= ode_tol
                and self.spacelike_violations == 0)

    def as_dict(self) -> dict:
        def num(x):
            return float(x) if math.isfinite(x) else None
        return {
            "max_angle_deviation": num(self.max_angle_deviation),
            "max_metric_residual": num(self.max_metric_residual),
            "ode_vs_quadrature_max_gap": num(self.ode_vs_quadrature_max_gap),
            "spacelike_violations": int(self.spacelike_violations),
            "notes": list(self.notes),
        }


def _metric_residual(curve, surface: HelicoidalSurface) -> float:
    u = np.asarray(curve.u, dtype=float)
    v = np.asarray(curve.v, dtype=float)
    on_surface = np.abs(np.asarray(curve.points) - surface.position(u, v))
    scale = np.maximum(1.0, np.abs(np.asarray(curve.points)))
    xu, xv = surface.tangent_basis(u, v)
    E, F, G = surface.metric(u)
    fff = np.stack([
        np.abs(lorentz_inner(xu, xu) - E) / np.maximum(1.0, np.abs(E)),
        np.abs(lorentz_inner(xu, xv) - F) / np.maximum(1.0, np.abs(F)),
        np.abs(lorentz_inner(xv, xv) - G) / np.maximum(1.0, np.abs(G)),
    ])
    return float(max(np.max(on_surface / scale), np.max(fff)))


def verify(curve, problem, tol: float = DEGENERACY_TOL) -> VerificationReport:
    """Run every independent check on ``curve``; never raises on bad data."""
    surface = problem.surface
    report = VerificationReport()
    u = np.asarray(curve.u, dtype=float)
    v = np.asarray(curve.v, dtype=float)

    E, F, G = surface.metric(u)
    signs = classify_determinant(E, F, G, tol)
    for j in np.nonzero(signs == 0)[0]:
        report.notes.append(f"surface degenerate at u={float(u[j])!r}: bracket [{float(u[j])!r}, {float(u[j])!r}]")
    flips = np.nonzero((signs[:-1] * signs[1:]) < 0)[0]
    for j in flips:
        report.notes.append(
            f"EG - F^2 changes sign: bracket [{float(u[j])!r}, {float(u[j + 1])!r}]")

    report.max_metric_residual = _metric_residual(curve, surface)

    if u.size >= 3:
        trace = angle_along_curve(curve, surface, problem.angle.theta0)
        report.max_angle_deviation = trace.max_deviation
        for where, msg in trace.failures[:5]:
            report.notes.append(f"no angle at u={where!r}: {msg}")
        _, tangent = curve_tangents(u, v, surface)
        speed2 = lorentz_inner(tangent, tangent)
        report.spacelike_violations = int(np.count_nonzero(~(speed2 > 0)))
    else:
        report.notes.append("fewer than 3 samples: angle check skipped")

    try:
        u_rk, v_rk = rk4_v(problem, float(u[-1]), u.size - 1, start=(float(u[0]), float(v[0])))
        # identity on uniform grids, linear interpolation otherwise
        report.ode_vs_quadrature_max_gap = float(np.max(np.abs(np.interp(u, u_rk, v_rk) - v)))
    except (ValueError, ArithmeticError) as exc:
        report.ode_vs_quadrature_max_gap = math.inf
        report.notes.append(f"RK4 cross-check failed: {exc}")
    return report

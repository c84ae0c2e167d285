"""Helicoidal surfaces of types I, II and III in Lorentzian n-space.

A surface is the orbit of a profile curve under a one-parameter rotation that
fixes an (n-2)-plane, composed with a translation proportional to the
rotation parameter (pitch ``c``). All coordinates returned here are standard
coordinates; type III is assembled in the pseudo-orthonormal basis and
converted once at the end.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .lorentz import SQRT2, pseudo_to_standard
from .profile import ProfileCurve, SurfaceKind

DEGENERACY_TOL = 1e-9


class SurfaceCausal(str, enum.Enum):
    SPACELIKE = "spacelike"
    TIMELIKE = "timelike"
    DEGENERATE = "degenerate"


@dataclass(frozen=True)
class MetricSample:
    u: float
    E: float
    F: float
    G: float
    causal: SurfaceCausal

    @property
    def determinant(self) -> float:
        return self.E * self.G - self.F * self.F


def classify_determinant(E, F, G, tol: float = DEGENERACY_TOL):
    """Tolerance-banded sign of EG - F^2; returns -1, 0, +1 (arrays allowed)."""
    EG = E * G
    F2 = F * F
    det = EG - F2
    band = tol * np.maximum(1.0, np.maximum(np.abs(EG), F2))
    return np.where(np.abs(det) <= band, 0, np.sign(det)).astype(int)


_CAUSAL_BY_SIGN = {1: SurfaceCausal.SPACELIKE, -1: SurfaceCausal.TIMELIKE, 0: SurfaceCausal.DEGENERATE}


class HelicoidalSurface:
    """Helicoidal surface generated by ``profile`` with pitch ``c``.

    Parameters
    ----------
    profile : ProfileCurve
        Meridian; its ``surface_type`` selects the construction.
    c : float
        Positive pitch. Use :meth:`rotational` for the ``c = 0`` limit.
    """

    def __init__(self, profile: ProfileCurve, c: float, *, rotational: bool = False):
        c = float(c)
        if rotational:
            if c != 0.0:
                raise ValueError("rotational surfaces have c = 0")
        elif not c > 0.0:
            raise ValueError(f"pitch c must be positive, got {c!r}")
        self.profile = profile
        self.c = c
        self.is_rotational = rotational

    @classmethod
    def rotational(cls, profile: ProfileCurve) -> "HelicoidalSurface":
        """The c = 0 member of the family: a rotational surface."""
        return cls(profile, 0.0, rotational=True)

    def __repr__(self):
        return f"HelicoidalSurface(kind={self.kind.value}, n={self.n}, c={self.c!r})"

    @property
    def kind(self) -> SurfaceKind:
        return self.profile.surface_type

    @property
    def n(self) -> int:
        return self.profile.n

    @property
    def epsilon(self) -> int:
        return self.profile.epsilon

    # -- geometry ---------------------------------------------------------

    def position(self, u, v) -> np.ndarray:
        """Point x(u, v); broadcasts ``u`` and ``v``, coordinates on the last axis."""
        u, v = np.broadcast_arrays(np.asarray(u, dtype=float), np.asarray(v, dtype=float))
        x, _ = self.profile.evaluate(u)
        n, c = self.n, self.c
        out = np.array(x)
        if self.kind is SurfaceKind.I:
            out[..., 0] = x[..., 0] * np.cos(v)
            out[..., 1] = x[..., 0] * np.sin(v)
            out[..., n - 1] = x[..., n - 1] + c * v
            return out
        if self.kind is SurfaceKind.II:
            out[..., 0] = x[..., 0] + c * v
            out[..., n - 2] = x[..., n - 1] * np.sinh(v)
            out[..., n - 1] = x[..., n - 1] * np.cosh(v)
            return out
        xn = x[..., n - 1]
        out[..., 1] = SQRT2 * v * xn
        out[..., n - 2] = x[..., n - 2] + v * v * xn + c * v
        return pseudo_to_standard(out)

    def tangent_basis(self, u, v) -> tuple[np.ndarray, np.ndarray]:
        """Partial derivatives (x_u, x_v)."""
        u, v = np.broadcast_arrays(np.asarray(u, dtype=float), np.asarray(v, dtype=float))
        x, d = self.profile.evaluate(u)
        n, c = self.n, self.c
        xu = np.array(d)
        xv = np.zeros_like(x)
        if self.kind is SurfaceKind.I:
            xu[..., 0] = d[..., 0] * np.cos(v)
            xu[..., 1] = d[..., 0] * np.sin(v)
            xv[..., 0] = -x[..., 0] * np.sin(v)
            xv[..., 1] = x[..., 0] * np.cos(v)
            xv[..., n - 1] = c
            return xu, xv
        if self.kind is SurfaceKind.II:
            xu[..., n - 2] = d[..., n - 1] * np.sinh(v)
            xu[..., n - 1] = d[..., n - 1] * np.cosh(v)
            xv[..., 0] = c
            xv[..., n - 2] = x[..., n - 1] * np.cosh(v)
            xv[..., n - 1] = x[..., n - 1] * np.sinh(v)
            return xu, xv
        xu[..., 1] = SQRT2 * v * d[..., n - 1]
        xu[..., n - 2] = d[..., n - 2] + v * v * d[..., n - 1]
        xv[..., 1] = SQRT2 * x[..., n - 1]
        xv[..., n - 2] = 2.0 * v * x[..., n - 1] + c
        return pseudo_to_standard(xu), pseudo_to_standard(xv)

    def rotation(self, v: float) -> np.ndarray:
        """Matrix of the rotation by ``v`` in standard coordinates.

        ``position(u, v) == rotation(v) @ beta(u) + c*v*translation_axis()``
        where ``beta`` is the profile in standard coordinates.
        """
        n = self.n
        R = np.eye(n)
        if self.kind is SurfaceKind.I:
            R[0, 0] = R[1, 1] = np.cos(v)
            R[0, 1] = -np.sin(v)
            R[1, 0] = np.sin(v)
            return R
        if self.kind is SurfaceKind.II:
            R[n - 2, n - 2] = R[n - 1, n - 1] = np.cosh(v)
            R[n - 2, n - 1] = R[n - 1, n - 2] = np.sinh(v)
            return R
        # columns are images of e_1..e_{n-2}, xi_{n-1}, xi_n in pseudo coefficients
        T = np.eye(n)
        T[n - 2, 1] = SQRT2 * v           # e_2 -> e_2 + sqrt2 v xi_{n-1}
        T[1, n - 1] = SQRT2 * v           # xi_n -> sqrt2 v e_2 + v^2 xi_{n-1} + xi_n
        T[n - 2, n - 1] = v * v
        P = pseudo_to_standard(np.eye(n)).T  # columns: basis vectors in standard coords
        return P @ T @ np.linalg.inv(P)

    def translation_axis(self) -> np.ndarray:
        n = self.n
        axis = np.zeros(n)
        if self.kind is SurfaceKind.I:
            axis[n - 1] = 1.0
        elif self.kind is SurfaceKind.II:
            axis[0] = 1.0
        else:
            axis[n - 2] = 1.0
            axis = pseudo_to_standard(axis)
        return axis

    def profile_point(self, u) -> np.ndarray:
        """beta(u) in standard coordinates."""
        x, _ = self.profile.evaluate(np.asarray(u, dtype=float))
        return pseudo_to_standard(x) if self.kind is SurfaceKind.III else x

    # -- first fundamental form -------------------------------------------

    def metric(self, u):
        """Closed-form (E, F, G) arrays over ``u``; independent of v."""
        u = np.asarray(u, dtype=float)
        n, c = self.n, self.c
        x1, dx1 = self.profile.component(1, u)
        xn, dxn = self.profile.component(n, u)
        E = np.full(u.shape, float(self.epsilon))
        if self.kind is SurfaceKind.I:
            return E, 0.0 - c * dxn, x1 * x1 - c * c
        if self.kind is SurfaceKind.II:
            return E, c * dx1, xn * xn + c * c
        return E, 0.0 - c * dxn, 2.0 * xn * xn

    def first_fundamental_form(self, u: float, tol: float = DEGENERACY_TOL) -> MetricSample:
        E, F, G = (float(a) for a in self.metric(np.array(float(u))))
        causal = _CAUSAL_BY_SIGN[int(classify_determinant(E, F, G, tol))]
        return MetricSample(float(u), E, F, G, causal)

    def nondegeneracy(self, u):
        """The explicit non-degeneracy expression for this surface type (equals EG - F^2)."""
        u = np.asarray(u, dtype=float)
        n, c, eps = self.n, self.c, self.epsilon
        x1, dx1 = self.profile.component(1, u)
        xn, dxn = self.profile.component(n, u)
        if self.kind is SurfaceKind.I:
            return eps * x1 ** 2 - c ** 2 * (eps + dxn ** 2)
        if self.kind is SurfaceKind.II:
            return eps * xn ** 2 + c ** 2 * (eps - dx1 ** 2)
        return 2.0 * eps * xn ** 2 - c ** 2 * dxn ** 2

    def causal_type(self, u: float, tol: float = DEGENERACY_TOL) -> SurfaceCausal:
        """Spacelike / timelike / degenerate at ``u`` from the sign of EG - F^2."""
        return self.first_fundamental_form(u, tol).causal

    def is_right_helicoidal(self, u_samples, tol: float = 1e-12) -> bool:
        """True when the axial component (x_n for I and III, x_1 for II) is constant on the samples."""
        u = np.atleast_1d(np.asarray(u_samples, dtype=float))
        if u.size == 0:
            raise ValueError("need at least one sample")
        idx = 1 if self.kind is SurfaceKind.II else self.n
        _, d = self.profile.component(idx, u)
        return bool(np.all(np.abs(d) <= tol))

"""Profile (meridian) curves of helicoidal surfaces."""
from __future__ import annotations

import enum
from dataclasses import dataclass, field
from functools import cached_property
from typing import Mapping

import numpy as np

from . import kernels
from .expr import (BUILTIN_CONSTANTS, ZERO_TAPE, BinOp, DomainError, Expr, Num, Tape,
                   compile_tape, depends_on_u, parse, params_used)
from .lorentz import MIN_DIM

MAX_TAPE_DEPTH = 64


class SurfaceKind(str, enum.Enum):
    I = "I"      # rotation fixing a timelike (n-2)-plane, translation along e_n
    II = "II"    # boost fixing a spacelike (n-2)-plane, translation along e_1
    III = "III"  # null rotation fixing a degenerate (n-2)-plane, translation along xi_{n-1}

    @property
    def code(self) -> int:
        return {"I": 1, "II": 2, "III": 3}[self.value]


def forbidden_component(kind: SurfaceKind, n: int) -> int:
    """1-based index that must vanish in the profile (the rotated direction)."""
    return n - 1 if kind is SurfaceKind.II else 2


@dataclass(frozen=True, eq=False)
class ProfileCurve:
    """Meridian ``u -> (x_1(u), ..., x_n(u))`` of a helicoidal surface.

    ``components`` maps 1-based coordinate indices to expressions; missing
    indices are the constant 0. For type III the last two indices are the
    coefficients along the null vectors xi_{n-1}, xi_n. ``epsilon`` is the
    causal sign of the unit-speed meridian (+1 spacelike, -1 timelike).
    """

    surface_type: SurfaceKind
    n: int
    components: Mapping[int, Expr]
    epsilon: int
    constants: Mapping[str, float] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "surface_type", SurfaceKind(self.surface_type))
        object.__setattr__(self, "components", {int(k): v for k, v in self.components.items()})
        object.__setattr__(self, "constants", {str(k): float(v) for k, v in self.constants.items()})
        if self.n < MIN_DIM:
            raise ValueError(f"dimension n must be >= {MIN_DIM}, got {self.n}")
        if self.epsilon not in (1, -1):
            raise ValueError(f"epsilon must be +1 or -1, got {self.epsilon!r}")
        bad = forbidden_component(self.surface_type, self.n)
        for idx, e in self.components.items():
            if not 1 <= idx <= self.n:
                raise ValueError(f"component index {idx} outside 1..{self.n}")
            missing = params_used(e) - set(self.constants) - set(BUILTIN_CONSTANTS)
            if missing:
                raise ValueError(f"component {idx} uses undeclared constants {sorted(missing)}")
            if idx == bad and not (isinstance(e, Num) and e.value == 0.0):
                raise ValueError(
                    f"type {self.surface_type.value} profiles must have x_{bad} identically 0")
        for idx in self.components:
            if self.tapes[idx - 1].depth > MAX_TAPE_DEPTH:
                raise ValueError(f"component {idx} nests deeper than {MAX_TAPE_DEPTH}")

    @classmethod
    def from_strings(cls, surface_type, n: int, components: Mapping[int, str], epsilon: int,
                     constants: Mapping[str, float] | None = None) -> "ProfileCurve":
        constants = dict(constants or {})
        exprs = {int(k): parse(src, constants) for k, src in components.items()}
        return cls(SurfaceKind(surface_type), n, exprs, epsilon, constants)

    def with_constants(self, **values: float) -> "ProfileCurve":
        """Same expressions, new constant values (no re-parsing)."""
        merged = {**self.constants, **values}
        return ProfileCurve(self.surface_type, self.n, self.components, self.epsilon, merged)

    def with_epsilon(self, epsilon: int) -> "ProfileCurve":
        return ProfileCurve(self.surface_type, self.n, self.components, epsilon, self.constants)

    def scaled(self, index: int, factor: float) -> "ProfileCurve":
        comps = dict(self.components)
        comps[index] = BinOp("*", Num(float(factor)), comps.get(index, Num(0.0)))
        return ProfileCurve(self.surface_type, self.n, comps, self.epsilon, self.constants)

    @cached_property
    def tapes(self) -> tuple[Tape, ...]:
        return tuple(compile_tape(self.components[i], self.constants) if i in self.components
                     else ZERO_TAPE for i in range(1, self.n + 1))

    def is_constant(self, index: int) -> bool:
        e = self.components.get(index)
        return e is None or not depends_on_u(e)

    def component(self, index: int, u):
        """Value and derivative arrays of one component."""
        tape = self.tapes[index - 1]
        val, der = kernels.active.eval_tape(tape.ops, tape.args, np.asarray(u, dtype=float))
        if not (np.all(np.isfinite(val)) and np.all(np.isfinite(der))):
            bad = np.asarray(u, dtype=float).reshape(-1)[~(np.isfinite(val) & np.isfinite(der)).reshape(-1)]
            raise DomainError(f"component x_{index} not defined (or not differentiable) at u={bad[0]!r}")
        return val, der

    def evaluate(self, u):
        """Values and derivatives of all components, shape ``u.shape + (n,)``."""
        u = np.asarray(u, dtype=float)
        vals = np.empty(u.shape + (self.n,))
        ders = np.empty(u.shape + (self.n,))
        for i in range(1, self.n + 1):
            vals[..., i - 1], ders[..., i - 1] = self.component(i, u)
        return vals, ders

    def speed_form(self, u):
        """The arc-length quadratic form of the derivatives; equals epsilon on a unit-speed profile."""
        _, d = self.evaluate(u)
        n = self.n
        if self.surface_type is SurfaceKind.I:
            idx = [0] + list(range(2, n - 1))
            return np.sum(d[..., idx] ** 2, axis=-1) - d[..., n - 1] ** 2
        if self.surface_type is SurfaceKind.II:
            return np.sum(d[..., : n - 2] ** 2, axis=-1) - d[..., n - 1] ** 2
        idx = [0] + list(range(2, n - 2))
        return np.sum(d[..., idx] ** 2, axis=-1) - 2.0 * d[..., n - 2] * d[..., n - 1]


@dataclass(frozen=True)
class UnitSpeedReport:
    passed: bool
    epsilon: int
    worst_u: float
    worst_form: float
    worst_violation: float
    tol: float


def check_unit_speed(profile: ProfileCurve, u_samples, tol: float = 1e-9) -> UnitSpeedReport:
    """Check the arc-length identity ``form(u) == epsilon`` at every sample.

    Raises :class:`~lorentzlox.expr.DomainError` when a component cannot be
    evaluated at some sample.
    """
    u = np.atleast_1d(np.asarray(u_samples, dtype=float))
    if u.size == 0:
        raise ValueError("need at least one sample")
    form = profile.speed_form(u)
    gap = np.abs(form - profile.epsilon)
    j = int(np.argmax(gap))
    return UnitSpeedReport(bool(gap[j] <= tol), profile.epsilon, float(u[j]),
                           float(form[j]), float(gap[j]), tol)


def infer_epsilon(profile: ProfileCurve, u: float) -> int:
    """Sign of the arc-length form at ``u``."""
    form = float(profile.speed_form(np.array([u]))[0])
    if form == 0.0:
        raise ValueError(f"profile is null at u={u!r}; cannot infer epsilon")
    return 1 if form > 0 else -1

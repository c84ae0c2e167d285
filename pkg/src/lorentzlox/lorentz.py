"""Linear algebra in Lorentzian n-space.

Vectors are plain array-likes whose last axis holds the n coordinates in the
standard basis; the last coordinate carries the minus sign of the metric.
Everything here is a pure function on immutable inputs.
"""
from __future__ import annotations

import enum
import math
from typing import NamedTuple

import numpy as np

MIN_DIM = 4
CAUSAL_TOL = 1e-10
GRAM_TOL = 1e-10
COS_CLAMP_TOL = 1e-9
SQRT2 = math.sqrt(2.0)


class CausalCharacter(str, enum.Enum):
    SPACELIKE = "spacelike"
    TIMELIKE = "timelike"
    LIGHTLIKE = "lightlike"


class AngleKind(str, enum.Enum):
    # spacelike vectors spanning a spacelike plane: circular angle in [0, pi]
    SPACELIKE_PLANE = "spacelike-spacelike-spacelikeplane"
    # spacelike vectors spanning a timelike plane: cosh
    TIMELIKE_PLANE = "spacelike-spacelike-timelikeplane"
    # one spacelike, one timelike: sinh
    MIXED = "spacelike-timelike"


class LorentzAngle(NamedTuple):
    value: float
    kind: AngleKind


class AngleError(ValueError):
    """Raised when no Lorentzian angle is defined for a pair of vectors."""


def _as_vector(x) -> np.ndarray:
    arr = np.asarray(x, dtype=float)
    if arr.ndim == 0 or arr.shape[-1] < MIN_DIM:
        raise ValueError(f"Lorentz vectors need at least {MIN_DIM} coordinates, got shape {arr.shape}")
    return arr


def lorentz_inner(x, y):
    """Lorentzian inner product along the last axis.

    Broadcasts over leading axes; returns a float for 1-D inputs.
    """
    x = _as_vector(x)
    y = _as_vector(y)
    if x.shape[-1] != y.shape[-1]:
        raise ValueError(f"dimension mismatch: {x.shape[-1]} != {y.shape[-1]}")
    out = np.sum(x[..., :-1] * y[..., :-1], axis=-1) - x[..., -1] * y[..., -1]
    return float(out) if np.ndim(out) == 0 else out


def lorentz_norm(x):
    """sqrt(|<x, x>|)."""
    return np.sqrt(np.abs(lorentz_inner(x, x)))


def causal_character(x, tol: float = CAUSAL_TOL) -> CausalCharacter:
    """Classify a single vector by the sign of <x, x>.

    The band is relative to the squared largest coordinate; the zero vector
    counts as spacelike.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    x = _as_vector(x)
    if x.ndim != 1:
        raise ValueError("causal_character classifies one vector at a time")
    scale = float(np.max(np.abs(x))) ** 2
    if scale == 0.0:
        return CausalCharacter.SPACELIKE
    q = lorentz_inner(x, x)
    if q > tol * scale:
        return CausalCharacter.SPACELIKE
    if q < -tol * scale:
        return CausalCharacter.TIMELIKE
    return CausalCharacter.LIGHTLIKE


def _parallel(x: np.ndarray, y: np.ndarray, tol: float) -> bool:
    # Euclidean test; a null plane also has zero Gram determinant
    nx = np.linalg.norm(x)
    ny = np.linalg.norm(y)
    if nx == 0.0 or ny == 0.0:
        return True
    cross = np.abs(np.outer(x, y) - np.outer(y, x)).max()
    return cross <= math.sqrt(tol) * nx * ny


def angle_between(x, y, tol: float = CAUSAL_TOL) -> LorentzAngle:
    """Lorentzian angle between two non-null vectors.

    The case is picked from the causal characters of ``x`` and ``y`` and the
    sign of the Gram determinant of their span:

    * both spacelike, spacelike span: ``<x,y> = |x||y| cos t``, t in [0, pi]
    * both spacelike, timelike span: ``|<x,y>| = |x||y| cosh t``, t >= 0
    * spacelike and timelike: ``<x,y> = |x||y| sinh t`` (t signed)

    Parallel spacelike vectors are treated as the circular case, so
    ``angle_between(x, x) == 0``.
    """
    x = _as_vector(x)
    y = _as_vector(y)
    cx = causal_character(x, tol)
    cy = causal_character(y, tol)
    if CausalCharacter.LIGHTLIKE in (cx, cy):
        raise AngleError("angle undefined for lightlike vectors")
    if cx is CausalCharacter.TIMELIKE and cy is CausalCharacter.TIMELIKE:
        raise AngleError("angle between two timelike vectors is not supported")
    if not np.any(x) or not np.any(y):
        raise AngleError("angle undefined for the zero vector")

    xx = lorentz_inner(x, x)
    yy = lorentz_inner(y, y)
    xy = lorentz_inner(x, y)
    nx = math.sqrt(abs(xx))
    ny = math.sqrt(abs(yy))
    gram = xx * yy - xy * xy
    scale = abs(xx * yy) + xy * xy

    if abs(gram) <= GRAM_TOL * scale:
        if cx is CausalCharacter.SPACELIKE and cy is CausalCharacter.SPACELIKE and _parallel(x, y, GRAM_TOL):
            cos_t = max(-1.0, min(1.0, xy / (nx * ny)))
            return LorentzAngle(math.acos(cos_t), AngleKind.SPACELIKE_PLANE)
        raise AngleError("vectors span a degenerate plane")

    if cx is CausalCharacter.SPACELIKE and cy is CausalCharacter.SPACELIKE:
        if gram > 0:
            cos_t = xy / (nx * ny)
            if abs(cos_t) > 1.0 + COS_CLAMP_TOL:
                raise AngleError(f"cosine argument {cos_t!r} outside [-1, 1]")
            cos_t = max(-1.0, min(1.0, cos_t))
            return LorentzAngle(math.acos(cos_t), AngleKind.SPACELIKE_PLANE)
        cosh_t = max(1.0, abs(xy) / (nx * ny))
        return LorentzAngle(math.acosh(cosh_t), AngleKind.TIMELIKE_PLANE)

    return LorentzAngle(math.asinh(xy / (nx * ny)), AngleKind.MIXED)


def pseudo_to_standard(p) -> np.ndarray:
    """Coefficients in {e_1..e_{n-2}, xi_{n-1}, xi_n} to standard coordinates.

    ``xi_{n-1} = (e_n - e_{n-1})/sqrt2`` and ``xi_n = (e_n + e_{n-1})/sqrt2``.
    Works along the last axis.
    """
    p = _as_vector(p)
    out = p.copy()
    a = p[..., -2]
    b = p[..., -1]
    out[..., -2] = (b - a) / SQRT2
    out[..., -1] = (a + b) / SQRT2
    return out


def standard_to_pseudo(x) -> np.ndarray:
    """Inverse of :func:`pseudo_to_standard`."""
    x = _as_vector(x)
    out = x.copy()
    s = x[..., -2]
    t = x[..., -1]
    out[..., -2] = (t - s) / SQRT2
    out[..., -1] = (t + s) / SQRT2
    return out


def pseudo_inner(p, q):
    """Inner product written directly in pseudo-basis coefficients."""
    p = _as_vector(p)
    q = _as_vector(q)
    out = (np.sum(p[..., :-2] * q[..., :-2], axis=-1)
           - p[..., -2] * q[..., -1] - p[..., -1] * q[..., -2])
    return float(out) if np.ndim(out) == 0 else out

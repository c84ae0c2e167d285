"""numba-compiled kernels; same signatures and semantics as ``_numpy``."""
import math

import numpy as np
from numba import njit

from ..expr import (OP_ADD, OP_CONST, OP_COS, OP_COSH, OP_DIV, OP_EXP, OP_LOG,
                    OP_MUL, OP_NEG, OP_POW, OP_SIN, OP_SINH, OP_SQRT, OP_SUB,
                    OP_VAR)
from ._numpy import DVDU, ROOT_CLAMP, SPEED  # noqa: F401

NAME = "numba"
_STACK = 64  # max tape depth handled without reallocation


@njit(cache=True)
def _powi(x, k):
    # repeated squaring; numba's generic float ** int is slow even on untaken branches
    r = 1.0
    while k > 0:
        if k & 1:
            r *= x
        x *= x
        k >>= 1
    return r


@njit(cache=True)
def _eval_point(ops, args, u, sv, sd):
    sp = 0
    for i in range(ops.size):
        op = ops[i]
        if op == OP_CONST:
            sv[sp] = args[i]
            sd[sp] = 0.0
            sp += 1
        elif op == OP_VAR:
            sv[sp] = u
            sd[sp] = 1.0
            sp += 1
        elif op <= OP_DIV:
            sp -= 1
            bv = sv[sp]
            bd = sd[sp]
            av = sv[sp - 1]
            ad = sd[sp - 1]
            if op == OP_ADD:
                sv[sp - 1] = av + bv
                sd[sp - 1] = ad + bd
            elif op == OP_SUB:
                sv[sp - 1] = av - bv
                sd[sp - 1] = ad - bd
            elif op == OP_MUL:
                sv[sp - 1] = av * bv
                sd[sp - 1] = ad * bv + av * bd
            else:
                if bv == 0.0:
                    sv[sp - 1] = np.nan
                    sd[sp - 1] = np.nan
                else:
                    q = av / bv
                    sv[sp - 1] = q
                    sd[sp - 1] = (ad - q * bd) / bv
        else:
            x = sv[sp - 1]
            dx = sd[sp - 1]
            if op == OP_NEG:
                v = -x
                d = -dx
            elif op == OP_POW:
                k = int(args[i])
                if k == 0:
                    v = 1.0
                    d = 0.0
                elif k > 0:
                    p = _powi(x, k - 1)
                    v = p * x
                    d = k * p * dx
                elif x == 0.0:
                    v = np.nan
                    d = np.nan
                else:
                    inv = 1.0 / x
                    v = _powi(inv, -k)
                    d = k * v * inv * dx
            elif op == OP_SIN:
                v = math.sin(x)
                d = math.cos(x) * dx
            elif op == OP_COS:
                v = math.cos(x)
                d = -math.sin(x) * dx
            elif op == OP_SINH:
                v = math.sinh(x)
                d = math.cosh(x) * dx
            elif op == OP_COSH:
                v = math.cosh(x)
                d = math.sinh(x) * dx
            elif op == OP_EXP:
                v = math.exp(x)
                d = v * dx
            elif op == OP_LOG:
                if x > 0.0:
                    v = math.log(x)
                    d = dx / x
                else:
                    v = np.nan
                    d = np.nan
            elif op == OP_SQRT:
                if x > 0.0:
                    v = math.sqrt(x)
                    d = dx / (2.0 * v)
                else:
                    v = np.nan
                    d = np.nan
            else:
                v = np.nan
                d = np.nan
            sv[sp - 1] = v
            sd[sp - 1] = d
    return sv[0], sd[0]


@njit(cache=True)
def _eval_array(ops, args, u):
    n = u.size
    val = np.empty(n)
    der = np.empty(n)
    sv = np.empty(_STACK)
    sd = np.empty(_STACK)
    for j in range(n):
        val[j], der[j] = _eval_point(ops, args, u[j], sv, sd)
    return val, der


def eval_tape(ops, args, u):
    """Value and derivative of a compiled tape at every point of ``u``."""
    u = np.asarray(u, dtype=np.float64)
    flat = np.ascontiguousarray(u.reshape(-1))
    val, der = _eval_array(ops, args, flat)
    return val.reshape(u.shape), der.reshape(u.shape)


@njit(cache=True)
def _metric(kind, c, x1, dx1, xn, dxn):
    if kind == 1:
        return -c * dxn, x1 * x1 - c * c
    if kind == 2:
        return c * dx1, xn * xn + c * c
    return -c * dxn, 2.0 * xn * xn


@njit(cache=True)
def _root(F, G, eps, theta, branch):
    t2 = theta * theta
    a = t2 * G - F * F
    h = F * (t2 - eps)
    k = 1.0 - eps * t2
    disc = h * h + a * k
    if disc < 0.0:
        if disc >= -ROOT_CLAMP * (h * h + abs(a * k)):
            disc = 0.0
        else:
            return np.nan
    sq = math.sqrt(disc)
    if h >= 0.0:
        q = -h - sq
    else:
        q = -h + sq
    if q == 0.0:
        return 0.0 if k == 0.0 else np.nan
    big = q / a
    small = -k / q
    if (h >= 0.0) == (branch > 0):
        return small
    return big


@njit(cache=True)
def _integrand(which, kind, c, eps, theta, branch, ops1, args1, opsn, argsn, u, sv, sd):
    x1, dx1 = _eval_point(ops1, args1, u, sv, sd)
    xn, dxn = _eval_point(opsn, argsn, u, sv, sd)
    F, G = _metric(kind, c, x1, dx1, xn, dxn)
    w = _root(F, G, eps, theta, branch)
    if which == DVDU:
        return w
    return math.sqrt(abs(eps + 2.0 * F * w + G * w * w))


@njit(cache=True)
def _simpson(which, kind, c, eps, theta, branch, ops1, args1, opsn, argsn,
             knots, tol, max_depth):
    nint = knots.size - 1
    out = np.zeros(nint)
    status = 0
    sv = np.empty(_STACK)
    sd = np.empty(_STACK)
    cap = 2 * max_depth + 8
    # stack rows: a, m, b, fa, fm, fb, whole, eps, depth
    st = np.empty((cap, 9))
    fb = _integrand(which, kind, c, eps, theta, branch, ops1, args1, opsn, argsn, knots[0], sv, sd)
    for i in range(nint):
        a = knots[i]
        b = knots[i + 1]
        m = 0.5 * (a + b)
        fa = fb  # shared knot
        fm = _integrand(which, kind, c, eps, theta, branch, ops1, args1, opsn, argsn, m, sv, sd)
        fb = _integrand(which, kind, c, eps, theta, branch, ops1, args1, opsn, argsn, b, sv, sd)
        if not (math.isfinite(fa) and math.isfinite(fm) and math.isfinite(fb)):
            return out, 1
        top = 0
        st[0, 0] = a
        st[0, 1] = m
        st[0, 2] = b
        st[0, 3] = fa
        st[0, 4] = fm
        st[0, 5] = fb
        st[0, 6] = (b - a) / 6.0 * (fa + 4.0 * fm + fb)
        st[0, 7] = tol * (b - a)
        st[0, 8] = 0.0
        top = 1
        total = 0.0
        while top > 0:
            top -= 1
            a = st[top, 0]
            m = st[top, 1]
            b = st[top, 2]
            fa = st[top, 3]
            fm = st[top, 4]
            fb = st[top, 5]
            whole = st[top, 6]
            e = st[top, 7]
            depth = st[top, 8]
            lm = 0.5 * (a + m)
            rm = 0.5 * (m + b)
            flm = _integrand(which, kind, c, eps, theta, branch, ops1, args1, opsn, argsn, lm, sv, sd)
            frm = _integrand(which, kind, c, eps, theta, branch, ops1, args1, opsn, argsn, rm, sv, sd)
            if not (math.isfinite(flm) and math.isfinite(frm)):
                return out, 1
            left = (m - a) / 6.0 * (fa + 4.0 * flm + fm)
            right = (b - m) / 6.0 * (fm + 4.0 * frm + fb)
            diff = left + right - whole
            if abs(diff) <= 15.0 * e or depth >= max_depth:
                if depth >= max_depth and abs(diff) > 15.0 * e:
                    status = 2
                total += left + right + diff / 15.0
                continue
            # right pushed first so the left half is refined first
            st[top, 0] = m
            st[top, 1] = rm
            st[top, 2] = b
            st[top, 3] = fm
            st[top, 4] = frm
            st[top, 5] = fb
            st[top, 6] = right
            st[top, 7] = 0.5 * e
            st[top, 8] = depth + 1.0
            top += 1
            st[top, 0] = a
            st[top, 1] = lm
            st[top, 2] = m
            st[top, 3] = fa
            st[top, 4] = flm
            st[top, 5] = fm
            st[top, 6] = left
            st[top, 7] = 0.5 * e
            st[top, 8] = depth + 1.0
            top += 1
        out[i] = total
    return out, status


def integrand(which, kind, c, eps, theta, branch, ops1, args1, opsn, argsn, u):
    u = np.atleast_1d(np.asarray(u, dtype=np.float64))
    sv = np.empty(_STACK)
    sd = np.empty(_STACK)
    return np.array([_integrand(which, kind, c, float(eps), theta, branch,
                                ops1, args1, opsn, argsn, x, sv, sd) for x in u])


def simpson_increments(which, kind, c, eps, theta, branch, ops1, args1, opsn, argsn,
                       knots, tol, max_depth):
    """Adaptive Simpson per interval; see the numpy backend for the contract."""
    knots = np.ascontiguousarray(knots, dtype=np.float64)
    return _simpson(int(which), int(kind), float(c), float(eps), float(theta), int(branch),
                    ops1, args1, opsn, argsn, knots, float(tol), int(max_depth))
